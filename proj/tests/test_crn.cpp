#include "doctest.h"
#include "molnet/crn.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace molnet;

namespace {

Species sp(const char* s) { return Species::named(s); }

Reaction rxn(const std::string& text) {
    Crn c = parse_crn("rxn: " + text + "\n");
    return c.reactions.at(0);
}

}  // namespace

TEST_CASE("canonicalize merges duplicate terms and sorts") {
    Reaction r;
    r.reactants = {{sp("B"), 1}, {sp("A"), 1}, {sp("B"), 1}};
    r.products = {{sp("C"), 2}, {sp("C"), -2}, {sp("D"), 1}};
    r.canonicalize();
    REQUIRE(r.reactants.size() == 2);
    CHECK(r.reactants[0].sp == sp("A"));
    CHECK(r.reactants[1] == Term{sp("B"), 2});
    REQUIRE(r.products.size() == 1);  // the C terms cancel to zero
    CHECK(r.products[0] == Term{sp("D"), 1});
}

TEST_CASE("molecularity counts multiplicity") {
    CHECK(rxn("A -> B @ 1").unimolecular());
    CHECK(rxn("A + B -> C @ 1").bimolecular());
    CHECK(rxn("2*A -> B @ 1").bimolecular());
    CHECK_FALSE(rxn("2*A + B -> C @ 1").bimolecular());
    CHECK(rxn("A -> 0 @ 1").product_size() == 0);
}

TEST_CASE("reaction text keeps multiplicities and rate") {
    CHECK(rxn("X1+ -> 2*I2,1+ + I2,2- @ 0.5").str() == "X1+ -> 2*I2,1+ + I2,2- @ 0.5");
    CHECK(rxn("A + B -> 0 @ 1").str() == "A + B -> 0 @ 1");
}

TEST_CASE("parse print round-trip is byte exact") {
    std::string text =
        "rxn: X1+ -> I2,1+ + I2,2- @ 1\n"
        "rxn: M2,1 + I2,1- -> H2,1- @ 0.125\n"
        "rxn: 2*A -> 3*B @ 10\n"
        "init H2,1- 1.5\n"
        "init M2,1 0.1000000000000000055511151231257827\n"
        "input 1 X1+ X1-\n"
        "output 1 H2,1+ H2,1-\n";
    Crn crn = parse_crn(text);
    std::string printed = print_crn(crn);
    CHECK(parse_crn(printed).reactions == crn.reactions);
    CHECK(print_crn(parse_crn(printed)) == printed);
    // Exact doubles survive: 0.1 prints short and parses back to the bit.
    CHECK(crn.conc(*Species::parse("M2,1")) == 0.1);
}

TEST_CASE("format_double round-trips arbitrary doubles") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        double v = std::ldexp(u(g), int(g() % 40) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("parse errors carry line numbers") {
    auto bad = [](const std::string& text, const std::string& needle) {
        try {
            parse_crn(text);
            FAIL_CHECK("expected CrnError for: " << text);
        } catch (const CrnError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    bad("rxn: A -> B\n", "line 1");                         // missing @ k
    bad("rxn: A -> B @ 1\nrxn: A B @ 2\n", "line 2");       // missing ->
    bad("rxn: A -> B @ 0\n", "positive");                   // k = 0
    bad("rxn: A -> B @ -1\n", "positive");
    bad("rxn: -> B @ 1\n", "malformed");                    // empty reactants
    bad("rxn: A + -> B @ 1\n", "malformed");
    bad("rxn: A A -> B @ 1\n", "expected '+'");
    bad("rxn: 0*A -> B @ 1\n", "multiplicity");
    bad("rxn: A -> X1 @ 1\n", "species");                   // reserved prefix, bad shape
    bad("init A -1\n", "negative");
    bad("init A 1\ninit A 2\n", "duplicate");
    bad("frob A\n", "unknown directive");
    bad("input 2 X1+ X1-\n", "out of order");
    bad("input 1 X1+ X2-\n", "pair");                       // partner mismatch
}

TEST_CASE("blank lines and comments are skipped") {
    Crn crn = parse_crn("# header\n\nrxn: A -> B @ 1\n   \n# done\n");
    CHECK(crn.reactions.size() == 1);
}

TEST_CASE("validate rejects io overlap") {
    Crn crn;
    crn.inputs.emplace_back(sp("A+"), sp("A-"));
    crn.outputs.emplace_back(sp("A+"), sp("A-"));
    Reaction r;
    r.reactants = {{sp("A+"), 1}};
    r.products = {{sp("B"), 1}};
    crn.reactions.push_back(r);
    CHECK_THROWS_AS(crn.validate(), CrnError);
}

TEST_CASE("encode_input puts magnitudes on one rail") {
    auto m = encode_input(std::vector<double>{1.5, -2.0, 0.0});
    CHECK(m.at(*Species::parse("X1+")) == 1.5);
    CHECK(m.at(*Species::parse("X1-")) == 0.0);
    CHECK(m.at(*Species::parse("X2+")) == 0.0);
    CHECK(m.at(*Species::parse("X2-")) == 2.0);
    CHECK(m.at(*Species::parse("X3+")) == 0.0);
    CHECK(m.at(*Species::parse("X3-")) == 0.0);
}

TEST_CASE("decode_output subtracts the rails, absent species read 0") {
    std::map<Species, double> state{{sp("Y+"), 1.0}};
    CHECK(decode_output(state, {sp("Y+"), sp("Y-")}) == 1.0);
    state[sp("Y-")] = 2.5;
    CHECK(decode_output(state, {sp("Y+"), sp("Y-")}) == -1.5);
}

TEST_CASE("crn_stats") {
    Crn crn = parse_crn(
        "rxn: A -> B + C @ 1\n"
        "rxn: B + C -> 3*D @ 1\n"
        "rxn: 2*D + A -> 0 @ 1\n"
        "init A 1\n");
    CrnStats st = crn_stats(crn);
    CHECK(st.species == 4);
    CHECK(st.reactions == 3);
    CHECK(st.unimolecular == 1);
    CHECK(st.bimolecular == 1);
    CHECK(st.max_products == 3);
}
