#pragma once

// Random DAG hypergraphs and an exhaustive minimum-support oracle.

#include "geodeduce/hypergraph.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace graph_oracle {

using gd::NodeSpec;
using gd::Literal;
using gd::Arg;
using gd::ProofHypergraph;

inline NodeSpec fact(int i) {
    Literal l = Literal::app("Fact", {Arg::id("N" + std::to_string(i))});
    return {l, l.str()};
}

// Forward chaining restricted to an edge subset.
inline bool derives(const ProofHypergraph& g, const std::vector<int>& edges, int goal) {
    std::set<int> have{ProofHypergraph::kStart};
    bool grew = true;
    while (grew) {
        grew = false;
        for (int e : edges) {
            const auto& E = g.edge(e);
            bool ok = std::all_of(E.premises.begin(), E.premises.end(), [&](int p) { return have.count(p) > 0; });
            if (!ok) continue;
            for (int c : E.conclusions) grew |= have.insert(c).second;
        }
    }
    return have.count(goal) > 0;
}

inline size_t brute_min(const ProofHypergraph& g, int goal) {
    size_t m = g.edge_count(), best = m + 1;
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        size_t k = static_cast<size_t>(__builtin_popcount(mask));
        if (k >= best) continue;
        std::vector<int> es;
        for (size_t e = 0; e < m; ++e)
            if (mask & (1u << e)) es.push_back(static_cast<int>(e));
        if (derives(g, es, goal)) best = k;
    }
    return best;
}

inline ProofHypergraph random_graph(std::mt19937& rng, int max_edges) {
    int next = 0;
    std::vector<NodeSpec> known;
    int k = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) known.push_back(fact(next++));
    ProofHypergraph g(known);
    int attempts = 0;
    while (static_cast<int>(g.edge_count()) < max_edges && attempts++ < 200) {
        int n = static_cast<int>(g.node_count());
        std::vector<int> prem;
        int np = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < np; ++i) prem.push_back(1 + static_cast<int>(rng() % (n - 1)));
        std::vector<NodeSpec> conc;
        int nc = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < nc; ++i) {
            if (rng() % 3 == 0 && n > 2) {
                int old = 1 + static_cast<int>(rng() % (n - 1));
                conc.push_back({g.literal(old), g.key(old)});
            } else {
                conc.push_back(fact(next++));
            }
        }
        g.add_step(prem, "T" + std::to_string(rng() % 4), conc);
    }
    return g;
}

}  // namespace graph_oracle
