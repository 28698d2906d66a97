#include "molnet/reducer.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <vector>

namespace molnet {

namespace {

// Reducer workspace with species interned to dense ids; product lists
// stay sorted by id so substitution is a linear merge.
struct Workspace {
    std::vector<Species> id2sp;
    std::unordered_map<Species, int, SpeciesHash> sp2id;

    struct Rxn {
        std::vector<std::pair<int, int64_t>> reactants, products;
        double k = 1.0;
        bool alive = true;
    };
    std::vector<Rxn> rxns;
    std::vector<double> conc;
    std::vector<std::vector<int>> producers;  // species id -> reaction indices (may hold stale entries)

    int intern(const Species& s) {
        auto [it, fresh] = sp2id.try_emplace(s, int(id2sp.size()));
        if (fresh) {
            id2sp.push_back(s);
            conc.push_back(0.0);
            producers.emplace_back();
        }
        return it->second;
    }
};

int64_t find_mult(const std::vector<std::pair<int, int64_t>>& side, int id) {
    for (const auto& [sp, m] : side)
        if (sp == id) return m;
    return 0;
}

// products := products - {R} + m * P, keeping the id order.
void substitute(std::vector<std::pair<int, int64_t>>& products, int r_id, int64_t m,
                const std::vector<std::pair<int, int64_t>>& p) {
    std::vector<std::pair<int, int64_t>> merged;
    merged.reserve(products.size() + p.size());
    size_t a = 0, b = 0;
    while (a < products.size() || b < p.size()) {
        int ida = a < products.size() ? products[a].first : INT32_MAX;
        int idb = b < p.size() ? p[b].first : INT32_MAX;
        if (ida == r_id && ida <= idb) {  // dropped
            ++a;
            continue;
        }
        if (ida < idb) {
            merged.push_back(products[a++]);
        } else if (idb < ida) {
            merged.emplace_back(idb, m * p[b].second);
            ++b;
        } else {
            merged.emplace_back(ida, products[a].second + m * p[b].second);
            ++a;
            ++b;
        }
    }
    products = std::move(merged);
}

}  // namespace

Crn reduce(const Crn& input) {
    input.validate();

    Workspace ws;
    for (const Reaction& r : input.reactions) {
        Workspace::Rxn rx;
        rx.k = r.k;
        for (const Term& t : r.reactants) rx.reactants.emplace_back(ws.intern(t.sp), t.mult);
        for (const Term& t : r.products) rx.products.emplace_back(ws.intern(t.sp), t.mult);
        std::sort(rx.reactants.begin(), rx.reactants.end());
        std::sort(rx.products.begin(), rx.products.end());
        ws.rxns.push_back(std::move(rx));
    }
    for (const auto& [sp, c] : input.init) ws.conc[ws.intern(sp)] = c;

    // Precondition scan: a species consumed by two reactions cannot be
    // substituted away, and the compiled CRNs never produce one.
    {
        std::vector<int> seen(ws.id2sp.size(), -1);
        for (size_t i = 0; i < ws.rxns.size(); ++i)
            for (const auto& [sp, m] : ws.rxns[i].reactants) {
                if (seen[sp] >= 0)
                    throw ReduceError("species " + ws.id2sp[sp].str() +
                                      " is a reactant in more than one reaction");
                seen[sp] = int(i);
            }
    }

    for (size_t i = 0; i < ws.rxns.size(); ++i)
        for (const auto& [sp, m] : ws.rxns[i].products) ws.producers[sp].push_back(int(i));

    std::set<int> input_ids;
    for (const auto& [plus, minus] : input.inputs) {
        input_ids.insert(ws.intern(plus));
        input_ids.insert(ws.intern(minus));
    }

    // Reactant sides never change, so the unimolecular reactions present
    // now are all there will ever be. Later reactions tend to sit deeper
    // in compiled networks; eliminating them first keeps the growing
    // product lists from being rewritten repeatedly.
    std::vector<int> worklist;
    for (int i = int(ws.rxns.size()) - 1; i >= 0; --i) {
        const auto& rx = ws.rxns[i];
        if (rx.reactants.size() == 1 && rx.reactants[0].second == 1 &&
            !input_ids.count(rx.reactants[0].first))
            worklist.push_back(i);
    }

    for (int ui : worklist) {
        auto& uni = ws.rxns[ui];
        int r_id = uni.reactants[0].first;
        if (find_mult(uni.products, r_id) != 0)
            throw ReduceError("unimolecular reaction produces its own reactant " +
                              ws.id2sp[r_id].str());

        auto prods = uni.products;  // copy; substitution edits the source otherwise
        uni.alive = false;

        std::vector<int>& producer_list = ws.producers[r_id];
        std::sort(producer_list.begin(), producer_list.end());
        producer_list.erase(std::unique(producer_list.begin(), producer_list.end()),
                            producer_list.end());
        for (int pi : producer_list) {
            if (pi == ui || !ws.rxns[pi].alive) continue;
            int64_t m = find_mult(ws.rxns[pi].products, r_id);
            if (m == 0) continue;  // stale entry
            substitute(ws.rxns[pi].products, r_id, m, prods);
            for (const auto& [sp, pm] : prods) ws.producers[sp].push_back(pi);
        }
        producer_list.clear();

        // The reactant's initial stock converts fully; fold it forward.
        double r0 = ws.conc[r_id];
        if (r0 > 0.0)
            for (const auto& [sp, pm] : prods) ws.conc[sp] += double(pm) * r0;
        ws.conc[r_id] = 0.0;
    }

    // Dual-rail cancellation inside product lists: equal amounts of S+
    // and S- carry no signal.
    for (auto& rx : ws.rxns) {
        if (!rx.alive) continue;
        bool changed = false;
        for (auto& [sp, m] : rx.products) {
            const Species& s = ws.id2sp[sp];
            if (s.rail != Rail::plus) continue;
            auto it = ws.sp2id.find(s.partner());
            if (it == ws.sp2id.end()) continue;
            int64_t other = find_mult(rx.products, it->second);
            if (other == 0) continue;
            int64_t cancel = std::min(m, other);
            m -= cancel;
            for (auto& [sp2, m2] : rx.products)
                if (sp2 == it->second) m2 -= cancel;
            changed = true;
        }
        if (changed)
            std::erase_if(rx.products, [](const auto& t) { return t.second == 0; });
    }

    // Same for initial concentrations: shift each pair so the smaller
    // rail reads zero.
    for (int id = 0; id < int(ws.id2sp.size()); ++id) {
        const Species& s = ws.id2sp[id];
        if (s.rail != Rail::plus || ws.conc[id] == 0.0) continue;
        auto it = ws.sp2id.find(s.partner());
        if (it == ws.sp2id.end()) continue;
        double shift = std::min(ws.conc[id], ws.conc[it->second]);
        if (shift > 0.0) {
            ws.conc[id] -= shift;
            ws.conc[it->second] -= shift;
        }
    }

    Crn out;
    out.inputs = input.inputs;
    out.outputs = input.outputs;
    for (const auto& rx : ws.rxns) {
        if (!rx.alive) continue;
        Reaction r;
        r.k = rx.k;
        for (const auto& [sp, m] : rx.reactants) r.reactants.push_back({ws.id2sp[sp], m});
        for (const auto& [sp, m] : rx.products) r.products.push_back({ws.id2sp[sp], m});
        r.canonicalize();
        out.reactions.push_back(std::move(r));
    }
    for (int id = 0; id < int(ws.id2sp.size()); ++id)
        if (ws.conc[id] != 0.0) out.init[ws.id2sp[id]] = ws.conc[id];
    out.validate();
    return out;
}

std::vector<std::pair<Species, Species>> dual_rail_pairs(const Crn& crn) {
    std::set<Species> bases;
    for (const Species& s : crn.species())
        if (s.has_rail()) bases.insert(s.base());
    std::vector<std::pair<Species, Species>> pairs;
    for (const Species& b : bases) pairs.emplace_back(b, b.partner());
    return pairs;
}

Crn add_cancellation(const Crn& crn, const std::vector<std::pair<Species, Species>>& pairs) {
    Crn out = crn;
    std::set<Species> universe;
    for (const Species& s : crn.species()) universe.insert(s);
    for (const Reaction& r : crn.reactions)
        for (const Term& t : r.reactants)
            if (t.sp == Species::waste())
                throw ReduceError("W is consumed by this CRN and cannot serve as waste");
    for (const auto& [plus, minus] : pairs) {
        if (!plus.has_rail() || plus.rail != Rail::plus || minus != plus.partner())
            throw ReduceError("not a dual-rail pair: " + plus.str() + " " + minus.str());
        if (!universe.count(plus) && !universe.count(minus))
            throw ReduceError("pair not found in CRN: " + plus.str() + " " + minus.str());
        Reaction r;
        r.reactants.push_back({plus, 1});
        r.reactants.push_back({minus, 1});
        r.products.push_back({Species::waste(), 1});
        r.canonicalize();
        out.reactions.push_back(std::move(r));
    }
    out.validate();
    return out;
}

}  // namespace molnet
