#pragma once

// Reactions, CRNs, stats, dual-rail encode/decode, and the CRN text format.
//
// Text format (line oriented, UTF-8):
//   # comment
//   rxn: R1 + 2*R2 -> P1 + 3*P2 @ <k>     (empty product list written "0")
//   init <species> <nonnegative decimal>
//   input <i> <Xi+> <Xi->
//   output <j> <Yj+> <Yj->
// Multiplicity prefixes ("2*") default to 1. Decimals print via to_chars,
// so parse(print(crn)) reproduces every value exactly.

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molnet/species.hpp"

namespace molnet {

struct CrnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Term {
    Species sp;
    int64_t mult = 1;
    auto operator<=>(const Term&) const = default;
};

struct Reaction {
    std::vector<Term> reactants;  // canonical: sorted by species, merged, mult >= 1
    std::vector<Term> products;
    double k = 1.0;

    // Sorts and merges both sides, dropping zero terms.
    void canonicalize();
    // Total reactant molecule count (multiplicity included).
    int64_t reactant_size() const;
    int64_t product_size() const;
    bool unimolecular() const { return reactant_size() == 1; }
    bool bimolecular() const { return reactant_size() == 2; }

    std::string str() const;  // "X1+ -> I2,1+ + I2,2- @ 1", no "rxn:" prefix

    bool operator==(const Reaction&) const = default;
};

struct Crn {
    std::vector<Reaction> reactions;
    std::map<Species, double> init;  // absent reads as 0
    std::vector<std::pair<Species, Species>> inputs;   // (Xi+, Xi-)
    std::vector<std::pair<Species, Species>> outputs;  // (Yj+, Yj-)

    double conc(const Species& s) const {
        auto it = init.find(s);
        return it == init.end() ? 0.0 : it->second;
    }

    // Sorted species universe: reactions, initial concentrations, io pairs.
    std::vector<Species> species() const;

    // Throws CrnError on any invariant violation (negative or non-finite
    // concentration, empty reactant list, k <= 0, input/output overlap,
    // malformed io pairs).
    void validate() const;
};

struct CrnStats {
    size_t species = 0;
    size_t reactions = 0;
    size_t unimolecular = 0;
    size_t bimolecular = 0;
    int64_t max_products = 0;  // largest product multiset size
};

CrnStats crn_stats(const Crn& crn);

// Canonical dual-rail input encoding over the CRN's input pairs:
// x >= 0 puts x on the plus rail, otherwise -x on the minus rail; the
// other rail is set to 0 explicitly.
std::map<Species, double> encode_input(std::span<const double> x);

double decode_output(const std::map<Species, double>& state,
                     const std::pair<Species, Species>& pair);

Crn parse_crn(std::istream& in);
Crn parse_crn(const std::string& text);
Crn load_crn(const std::string& path);
std::string print_crn(const Crn& crn);
void save_crn(const Crn& crn, const std::string& path);

// Shortest decimal that round-trips the exact double.
std::string format_double(double v);

}  // namespace molnet
