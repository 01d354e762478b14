#pragma once

#include "geodeduce/formal_lang.hpp"

#include <boost/dynamic_bitset.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gd {

class HypergraphError : public std::runtime_error {
public:
    enum class Kind { EmptyFacts, UnknownNode, Unreachable };
    HypergraphError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// Node identity. Equations are keyed by their canonical residual, anything else by its literal text.
struct NodeSpec {
    Literal lit;
    std::string key;
};
NodeSpec node_spec(const Literal& lit);

struct Hyperedge {
    std::string theorem;
    std::vector<int> premises;     // sorted node ids
    std::vector<int> conclusions;  // sorted node ids
};

struct AddResult {
    enum class Status { Added, Cycle, Redundant, Trivial };
    Status status = Status::Added;
    int edge = -1;
    std::vector<int> new_nodes;  // conclusion nodes created by this step
    bool added() const { return status == Status::Added; }
};

struct Subgraph {
    std::vector<int> edges;  // kept edge ids, ascending
    std::vector<int> nodes;  // start, then every kept node, ascending
    std::map<int, std::vector<int>> conclusions;  // edge -> conclusions kept after pruning
    std::map<int, std::vector<int>> pruned;       // edge -> conclusions dropped (unused downstream)
    bool exact = true;       // minimality proven by exhaustive search
    bool beam_bound = false;  // the DP beam cap discarded candidates
};

class ProofHypergraph {
public:
    static constexpr int kStart = 0;
    static constexpr const char* kKnownFacts = "Known Facts";

    explicit ProofHypergraph(const std::vector<Literal>& known);
    explicit ProofHypergraph(const std::vector<NodeSpec>& known);

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }
    const Literal& literal(int node) const { return nodes_.at(node).lit; }
    const std::string& key(int node) const { return nodes_.at(node).key; }
    const Hyperedge& edge(int e) const { return edges_.at(e); }
    std::optional<int> find(const std::string& key) const;
    std::optional<int> find(const Literal& lit) const { return find(node_spec(lit).key); }

    // Edges concluding a node, in insertion order.
    const std::vector<int>& producers(int node) const { return producers_.at(node); }
    bool is_ancestor(int anc, int node) const { return anc != node && ancestors_.at(node).test(anc); }

    AddResult add_step(const std::vector<int>& premises, const std::string& theorem,
                       const std::vector<NodeSpec>& conclusions);
    AddResult add_step(const std::vector<int>& premises, const std::string& theorem,
                       const std::vector<Literal>& conclusions);

    // Smallest edge set deriving `goal` from start; see Subgraph.
    Subgraph find_minimal_subgraph(int goal, size_t beam = 8, size_t exact_budget = 2000000) const;

    // Kahn order of the kept edges; ties broken by (theorem, premise literal strings, edge id).
    std::vector<int> topological_order(const Subgraph& sub) const;

    std::string dump_json() const;
    std::string dump_json(const Subgraph& sub) const;

private:
    struct Node {
        Literal lit;
        std::string key;
    };
    std::vector<Node> nodes_;
    std::vector<Hyperedge> edges_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> producers_;
    std::vector<std::vector<int>> consumers_;
    std::vector<boost::dynamic_bitset<>> ancestors_;
    std::map<std::string, int> edge_index_;

    int intern(const NodeSpec& n, bool& created);
    void grow_bitsets();
};

}  // namespace gd
