#include "geodeduce/hypergraph.hpp"

#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <set>
#include <tuple>

namespace gd {

NodeSpec node_spec(const Literal& lit) {
    if (lit.form == Literal::Form::App && lit.pred == "Equals" && lit.arity() == 2) {
        try {
            return {lit, "eq:" + equation_from_literal(lit).key};
        } catch (const std::exception&) {
        }
    }
    return {lit, lit.str()};
}

namespace {

std::vector<NodeSpec> specs(const std::vector<Literal>& ls) {
    std::vector<NodeSpec> out;
    out.reserve(ls.size());
    for (const auto& l : ls) out.push_back(node_spec(l));
    return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool better(const std::vector<int>& a, const std::vector<int>& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
}

}  // namespace

ProofHypergraph::ProofHypergraph(const std::vector<Literal>& known) : ProofHypergraph(specs(known)) {}

ProofHypergraph::ProofHypergraph(const std::vector<NodeSpec>& known) {
    if (known.empty()) throw HypergraphError(HypergraphError::Kind::EmptyFacts, "no known facts");
    Literal start;
    start.form = Literal::Form::BareId;
    start.pred = "start";
    bool created = false;
    intern({start, "\x01start"}, created);
    Hyperedge e{kKnownFacts, {kStart}, {}};
    for (const auto& k : known) e.conclusions.push_back(intern(k, created));
    e.conclusions = sorted_unique(e.conclusions);
    for (int c : e.conclusions) {
        producers_[c].push_back(0);
        ancestors_[c].set(kStart);
    }
    consumers_[kStart].push_back(0);
    edges_.push_back(e);
}

int ProofHypergraph::intern(const NodeSpec& n, bool& created) {
    auto it = index_.find(n.key);
    created = it == index_.end();
    if (!created) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({n.lit, n.key});
    index_.emplace(n.key, id);
    producers_.emplace_back();
    consumers_.emplace_back();
    ancestors_.emplace_back();
    grow_bitsets();
    return id;
}

void ProofHypergraph::grow_bitsets() {
    size_t n = nodes_.size();
    if (ancestors_[0].size() >= n) {
        ancestors_.back().resize(ancestors_[0].size());
        return;
    }
    size_t cap = std::max<size_t>(64, ancestors_[0].size());
    while (cap < n) cap *= 2;
    for (auto& b : ancestors_) b.resize(cap);
}

std::optional<int> ProofHypergraph::find(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

AddResult ProofHypergraph::add_step(const std::vector<int>& premises_in, const std::string& theorem,
                                    const std::vector<Literal>& conclusions) {
    return add_step(premises_in, theorem, specs(conclusions));
}

AddResult ProofHypergraph::add_step(const std::vector<int>& premises_in, const std::string& theorem,
                                    const std::vector<NodeSpec>& conclusions) {
    AddResult res;
    std::vector<int> prem = sorted_unique(premises_in);
    if (prem.empty()) throw HypergraphError(HypergraphError::Kind::UnknownNode, "step without premises");
    for (int p : prem)
        if (p < 0 || p >= static_cast<int>(nodes_.size()))
            throw HypergraphError(HypergraphError::Kind::UnknownNode, "unknown premise node");

    std::vector<int> existing;
    std::vector<const NodeSpec*> fresh;
    std::set<std::string> fresh_keys;
    for (const auto& c : conclusions) {
        auto id = find(c.key);
        if (!id) {
            if (fresh_keys.insert(c.key).second) fresh.push_back(&c);
            continue;
        }
        if (std::binary_search(prem.begin(), prem.end(), *id)) continue;
        if (*id == kStart) {
            res.status = AddResult::Status::Cycle;
            return res;
        }
        for (int p : prem)
            if (ancestors_[p].test(*id)) {
                res.status = AddResult::Status::Cycle;
                return res;
            }
        existing.push_back(*id);
    }
    existing = sorted_unique(existing);
    if (existing.empty() && fresh.empty()) {
        res.status = AddResult::Status::Trivial;
        return res;
    }
    auto signature = [&](const std::vector<int>& conc) {
        std::string sig = theorem + "\x1f";
        for (int p : prem) sig += std::to_string(p) + ",";
        sig += "\x1f";
        for (int c : conc) sig += std::to_string(c) + ",";
        return sig;
    };
    if (fresh.empty() && edge_index_.count(signature(existing))) {
        res.status = AddResult::Status::Redundant;
        return res;
    }

    std::vector<int> conc = existing;
    for (const auto* f : fresh) {
        bool created = false;
        int id = intern(*f, created);
        res.new_nodes.push_back(id);
        conc.push_back(id);
    }
    conc = sorted_unique(conc);
    int eid = static_cast<int>(edges_.size());
    edges_.push_back({theorem, prem, conc});
    edge_index_.emplace(signature(conc), eid);
    for (int p : prem) consumers_[p].push_back(eid);

    boost::dynamic_bitset<> anc(ancestors_[0].size());
    for (int p : prem) {
        anc |= ancestors_[p];
        anc.set(p);
    }
    std::deque<int> work;
    for (int c : conc) {
        producers_[c].push_back(eid);
        boost::dynamic_bitset<> merged = ancestors_[c] | anc;
        if (merged != ancestors_[c]) {
            ancestors_[c] = merged;
            work.push_back(c);
        }
    }
    // Existing conclusions may already have descendants.
    while (!work.empty()) {
        int x = work.front();
        work.pop_front();
        boost::dynamic_bitset<> up = ancestors_[x];
        up.set(x);
        for (int e : consumers_[x])
            for (int y : edges_[e].conclusions) {
                boost::dynamic_bitset<> merged = ancestors_[y] | up;
                if (merged != ancestors_[y]) {
                    ancestors_[y] = merged;
                    work.push_back(y);
                }
            }
    }
    res.edge = eid;
    return res;
}

Subgraph ProofHypergraph::find_minimal_subgraph(int goal, size_t beam, size_t exact_budget) const {
    if (goal < 0 || goal >= static_cast<int>(nodes_.size()))
        throw HypergraphError(HypergraphError::Kind::UnknownNode, "unknown goal node");
    if (goal == kStart || producers_[goal].empty())
        throw HypergraphError(HypergraphError::Kind::Unreachable, "goal has no derivation");

    boost::dynamic_bitset<> relevant = ancestors_[goal];
    relevant.set(goal);
    std::vector<int> rel_edges;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
        for (int c : edges_[e].conclusions)
            if (relevant.test(c)) {
                rel_edges.push_back(e);
                break;
            }

    Subgraph sub;
    // DP over candidate supports, iterated to a fixpoint.
    std::vector<std::vector<std::vector<int>>> cand(nodes_.size());
    cand[kStart] = {{}};
    bool changed = true;
    while (changed) {
        changed = false;
        for (int e : rel_edges) {
            const auto& E = edges_[e];
            std::vector<std::vector<int>> combos = {{}};
            bool ready = true;
            for (int p : E.premises) {
                if (cand[p].empty()) {
                    ready = false;
                    break;
                }
                std::vector<std::vector<int>> next;
                for (const auto& c : combos)
                    for (const auto& k : cand[p]) next.push_back(set_union(c, k));
                std::sort(next.begin(), next.end(), better);
                next.erase(std::unique(next.begin(), next.end()), next.end());
                if (next.size() > beam) {
                    next.resize(beam);
                    sub.beam_bound = true;
                }
                combos = std::move(next);
            }
            if (!ready) continue;
            for (auto& c : combos) c = set_union(c, {e});
            for (int c : E.conclusions) {
                if (!relevant.test(c)) continue;
                auto& list = cand[c];
                size_t before = list.size();
                std::vector<std::vector<int>> old = list;
                list.insert(list.end(), combos.begin(), combos.end());
                std::sort(list.begin(), list.end(), better);
                list.erase(std::unique(list.begin(), list.end()), list.end());
                if (list.size() > beam) {
                    list.resize(beam);
                    sub.beam_bound = true;
                }
                if (list != old || list.size() != before) changed = true;
            }
        }
    }
    if (cand[goal].empty()) throw HypergraphError(HypergraphError::Kind::Unreachable, "goal unreachable from start");
    std::vector<int> best = cand[goal][0];

    // Exact branch and bound below the DP bound.
    {
        std::vector<char> chosen(edges_.size(), 0);
        std::vector<int> support(nodes_.size(), 0);  // how many chosen edges conclude each node
        std::vector<int> needed{goal};
        std::vector<int> picked;
        size_t visits = 0;
        bool aborted = false;
        support[kStart] = 1;
        std::function<void()> rec = [&]() {
            if (aborted) return;
            if (++visits > exact_budget) {
                aborted = true;
                return;
            }
            int open = -1;
            size_t fewest = 0;
            for (int n : needed) {
                if (support[n]) continue;
                size_t k = producers_[n].size();
                if (open < 0 || k < fewest || (k == fewest && n < open)) {
                    open = n;
                    fewest = k;
                }
            }
            if (open < 0) {
                std::vector<int> s = picked;
                std::sort(s.begin(), s.end());
                if (better(s, best)) best = s;
                return;
            }
            if (picked.size() + 1 >= best.size()) return;
            for (int e : producers_[open]) {
                if (chosen[e]) continue;
                chosen[e] = 1;
                picked.push_back(e);
                for (int c : edges_[e].conclusions) ++support[c];
                size_t mark = needed.size();
                for (int p : edges_[e].premises)
                    if (!support[p]) needed.push_back(p);
                rec();
                needed.resize(mark);
                for (int c : edges_[e].conclusions) --support[c];
                picked.pop_back();
                chosen[e] = 0;
            }
        };
        rec();
        sub.exact = !aborted;
    }

    sub.edges = best;
    std::set<int> used_premises, nodes{kStart};
    for (int e : best)
        for (int p : edges_[e].premises) used_premises.insert(p);
    for (int e : best) {
        for (int c : edges_[e].conclusions) {
            if (c == goal || used_premises.count(c)) {
                sub.conclusions[e].push_back(c);
                nodes.insert(c);
            } else {
                sub.pruned[e].push_back(c);
            }
        }
        for (int p : edges_[e].premises) nodes.insert(p);
    }
    sub.nodes.assign(nodes.begin(), nodes.end());
    return sub;
}

std::vector<int> ProofHypergraph::topological_order(const Subgraph& sub) const {
    std::map<int, int> indeg;
    std::map<int, std::vector<int>> after;  // edge -> edges waiting on it
    std::map<int, std::vector<int>> concluded_by;
    for (int e : sub.edges) {
        auto it = sub.conclusions.find(e);
        if (it == sub.conclusions.end()) continue;
        for (int c : it->second) concluded_by[c].push_back(e);
    }
    for (int e : sub.edges) {
        std::set<int> deps;
        for (int p : edges_[e].premises) {
            auto it = concluded_by.find(p);
            if (it == concluded_by.end()) continue;
            for (int f : it->second)
                if (f != e) deps.insert(f);
        }
        indeg[e] = static_cast<int>(deps.size());
        for (int f : deps) after[f].push_back(e);
    }
    auto rank = [&](int e) {
        std::string prem;
        for (int p : edges_[e].premises) prem += nodes_[p].lit.str() + "\x1f";
        return std::make_tuple(edges_[e].theorem, prem, e);
    };
    std::set<std::tuple<std::string, std::string, int>> ready;
    for (auto [e, d] : indeg)
        if (d == 0) ready.insert(rank(e));
    std::vector<int> out;
    while (!ready.empty()) {
        int e = std::get<2>(*ready.begin());
        ready.erase(ready.begin());
        out.push_back(e);
        for (int f : after[e])
            if (--indeg[f] == 0) ready.insert(rank(f));
    }
    return out;
}

std::string ProofHypergraph::dump_json() const {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < nodes_.size(); ++i)
        j["nodes"].push_back({{"id", i}, {"literal", nodes_[i].lit.str()}});
    j["edges"] = nlohmann::ordered_json::array();
    for (size_t e = 0; e < edges_.size(); ++e)
        j["edges"].push_back({{"id", e},
                              {"theorem", edges_[e].theorem},
                              {"premises", edges_[e].premises},
                              {"conclusions", edges_[e].conclusions}});
    return j.dump(2);
}

std::string ProofHypergraph::dump_json(const Subgraph& sub) const {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (int n : sub.nodes) j["nodes"].push_back({{"id", n}, {"literal", nodes_[n].lit.str()}});
    j["edges"] = nlohmann::ordered_json::array();
    for (int e : topological_order(sub)) {
        nlohmann::ordered_json ej = {{"id", e},
                                     {"theorem", edges_[e].theorem},
                                     {"premises", edges_[e].premises},
                                     {"conclusions", sub.conclusions.count(e) ? sub.conclusions.at(e) : std::vector<int>{}}};
        if (sub.pruned.count(e)) ej["pruned_conclusions"] = sub.pruned.at(e);
        j["edges"].push_back(ej);
    }
    j["exact"] = sub.exact;
    j["beam_bound"] = sub.beam_bound;
    return j.dump(2);
}

}  // namespace gd
