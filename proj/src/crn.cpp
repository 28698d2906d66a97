#include "molnet/crn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace molnet {

void Reaction::canonicalize() {
    auto merge = [](std::vector<Term>& terms) {
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return a.sp < b.sp; });
        std::vector<Term> out;
        for (const Term& t : terms) {
            if (!out.empty() && out.back().sp == t.sp) out.back().mult += t.mult;
            else out.push_back(t);
        }
        std::erase_if(out, [](const Term& t) { return t.mult == 0; });
        terms = std::move(out);
    };
    merge(reactants);
    merge(products);
}

int64_t Reaction::reactant_size() const {
    int64_t n = 0;
    for (const Term& t : reactants) n += t.mult;
    return n;
}

int64_t Reaction::product_size() const {
    int64_t n = 0;
    for (const Term& t : products) n += t.mult;
    return n;
}

std::string Reaction::str() const {
    std::string s;
    auto side = [&s](const std::vector<Term>& terms) {
        if (terms.empty()) {
            s += "0";
            return;
        }
        bool first = true;
        for (const Term& t : terms) {
            if (!first) s += " + ";
            first = false;
            if (t.mult != 1) s += std::to_string(t.mult) + "*";
            s += t.sp.str();
        }
    };
    side(reactants);
    s += " -> ";
    side(products);
    s += " @ " + format_double(k);
    return s;
}

std::vector<Species> Crn::species() const {
    std::set<Species> all;
    for (const Reaction& r : reactions) {
        for (const Term& t : r.reactants) all.insert(t.sp);
        for (const Term& t : r.products) all.insert(t.sp);
    }
    for (const auto& [sp, c] : init) all.insert(sp);
    for (const auto& [p, m] : inputs) {
        all.insert(p);
        all.insert(m);
    }
    for (const auto& [p, m] : outputs) {
        all.insert(p);
        all.insert(m);
    }
    return {all.begin(), all.end()};
}

void Crn::validate() const {
    for (size_t i = 0; i < reactions.size(); ++i) {
        const Reaction& r = reactions[i];
        if (r.reactants.empty())
            throw CrnError("reaction " + std::to_string(i + 1) + ": empty reactant list");
        if (!(r.k > 0.0) || !std::isfinite(r.k))
            throw CrnError("reaction " + std::to_string(i + 1) + ": rate constant must be positive");
        for (const Term& t : r.reactants)
            if (t.mult < 1) throw CrnError("reaction " + std::to_string(i + 1) + ": bad multiplicity");
        for (const Term& t : r.products)
            if (t.mult < 1) throw CrnError("reaction " + std::to_string(i + 1) + ": bad multiplicity");
    }
    for (const auto& [sp, c] : init) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw CrnError("negative or non-finite concentration for " + sp.str());
    }
    std::set<Species> in_set, out_set;
    auto check_pair = [](const std::pair<Species, Species>& p, const char* what) {
        if (!p.first.has_rail() || p.first.rail != Rail::plus || p.second != p.first.partner())
            throw CrnError(std::string(what) + " pair must be (S+, S-): " + p.first.str() + " " +
                           p.second.str());
    };
    for (const auto& p : inputs) {
        check_pair(p, "input");
        in_set.insert(p.first);
        in_set.insert(p.second);
    }
    for (const auto& p : outputs) {
        check_pair(p, "output");
        out_set.insert(p.first);
        out_set.insert(p.second);
    }
    for (const Species& s : out_set)
        if (in_set.count(s)) throw CrnError("input and output species overlap: " + s.str());
}

CrnStats crn_stats(const Crn& crn) {
    CrnStats st;
    st.species = crn.species().size();
    st.reactions = crn.reactions.size();
    for (const Reaction& r : crn.reactions) {
        int64_t n = r.reactant_size();
        if (n == 1) ++st.unimolecular;
        else if (n == 2) ++st.bimolecular;
        st.max_products = std::max(st.max_products, r.product_size());
    }
    return st;
}

std::map<Species, double> encode_input(std::span<const double> x) {
    std::map<Species, double> m;
    for (size_t i = 0; i < x.size(); ++i) {
        Species plus = Species::input(int(i) + 1, Rail::plus);
        Species minus = Species::input(int(i) + 1, Rail::minus);
        if (x[i] >= 0.0) {
            m[plus] = x[i];
            m[minus] = 0.0;
        } else {
            m[plus] = 0.0;
            m[minus] = -x[i];
        }
    }
    return m;
}

double decode_output(const std::map<Species, double>& state,
                     const std::pair<Species, Species>& pair) {
    auto get = [&state](const Species& s) {
        auto it = state.find(s);
        return it == state.end() ? 0.0 : it->second;
    };
    return get(pair.first) - get(pair.second);
}

std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

namespace {

struct LineError : CrnError {
    using CrnError::CrnError;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw CrnError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

Species parse_species_tok(const std::string& tok, int line) {
    auto sp = Species::parse(tok);
    if (!sp) fail(line, "unknown species-name shape: " + tok);
    return *sp;
}

double parse_number(const std::string& tok, int line) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail(line, "bad number: " + tok);
    return v;
}

// One "term" token: species name with optional "n*" multiplicity prefix.
Term parse_term(const std::string& tok, int line) {
    auto star = tok.find('*');
    if (star == std::string::npos) return {parse_species_tok(tok, line), 1};
    int64_t mult = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + star, mult);
    if (ec != std::errc() || p != tok.data() + star || mult < 1)
        fail(line, "bad multiplicity prefix: " + tok);
    return {parse_species_tok(tok.substr(star + 1), line), mult};
}

// Term list of the shape "T", "T + T + ...", or (products only) "0".
std::vector<Term> parse_side(const std::vector<std::string>& toks, size_t lo, size_t hi,
                             bool allow_empty, int line) {
    if (allow_empty && hi == lo + 1 && toks[lo] == "0") return {};
    std::vector<Term> terms;
    for (size_t i = lo; i < hi; ++i) {
        if ((i - lo) % 2 == 1) {
            if (toks[i] != "+") fail(line, "expected '+' between terms, got: " + toks[i]);
            continue;
        }
        terms.push_back(parse_term(toks[i], line));
    }
    if (terms.empty() || (hi - lo) % 2 == 0) fail(line, "malformed term list");
    return terms;
}

}  // namespace

Crn parse_crn(std::istream& in) {
    Crn crn;
    std::string line;
    int lineno = 0;
    int next_input = 1, next_output = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty() || toks[0][0] == '#') continue;

        if (toks[0] == "rxn:") {
            size_t arrow = 0, at = 0;
            for (size_t i = 1; i < toks.size(); ++i) {
                if (toks[i] == "->") arrow = i;
                else if (toks[i] == "@") at = i;
            }
            if (arrow == 0 || at == 0 || at < arrow || at + 2 != toks.size())
                fail(lineno, "malformed reaction (want: rxn: R [+ R] -> P [+ P] @ k)");
            Reaction r;
            r.reactants = parse_side(toks, 1, arrow, false, lineno);
            r.products = parse_side(toks, arrow + 1, at, true, lineno);
            r.k = parse_number(toks[at + 1], lineno);
            if (!(r.k > 0.0)) fail(lineno, "rate constant must be positive");
            r.canonicalize();
            crn.reactions.push_back(std::move(r));
        } else if (toks[0] == "init") {
            if (toks.size() != 3) fail(lineno, "malformed init line");
            Species sp = parse_species_tok(toks[1], lineno);
            double c = parse_number(toks[2], lineno);
            if (c < 0.0) fail(lineno, "negative concentration");
            if (crn.init.count(sp)) fail(lineno, "duplicate init for " + sp.str());
            crn.init[sp] = c;
        } else if (toks[0] == "input" || toks[0] == "output") {
            if (toks.size() != 4) fail(lineno, "malformed " + toks[0] + " line");
            int idx = int(parse_number(toks[1], lineno));
            int& next = toks[0] == "input" ? next_input : next_output;
            if (idx != next) fail(lineno, toks[0] + " index out of order: " + toks[1]);
            ++next;
            Species plus = parse_species_tok(toks[2], lineno);
            Species minus = parse_species_tok(toks[3], lineno);
            auto& list = toks[0] == "input" ? crn.inputs : crn.outputs;
            list.emplace_back(plus, minus);
        } else {
            fail(lineno, "unknown directive: " + toks[0]);
        }
    }
    crn.validate();
    return crn;
}

Crn parse_crn(const std::string& text) {
    std::istringstream ss(text);
    return parse_crn(ss);
}

Crn load_crn(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CrnError("cannot open " + path);
    return parse_crn(f);
}

std::string print_crn(const Crn& crn) {
    std::string out;
    for (const Reaction& r : crn.reactions) {
        out += "rxn: ";
        out += r.str();
        out += "\n";
    }
    for (const auto& [sp, c] : crn.init) {
        out += "init " + sp.str() + " " + format_double(c) + "\n";
    }
    for (size_t i = 0; i < crn.inputs.size(); ++i)
        out += "input " + std::to_string(i + 1) + " " + crn.inputs[i].first.str() + " " +
               crn.inputs[i].second.str() + "\n";
    for (size_t i = 0; i < crn.outputs.size(); ++i)
        out += "output " + std::to_string(i + 1) + " " + crn.outputs[i].first.str() + " " +
               crn.outputs[i].second.str() + "\n";
    return out;
}

void save_crn(const Crn& crn, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw CrnError("cannot write " + path);
    f << print_crn(crn);
}

}  // namespace molnet
