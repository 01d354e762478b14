#pragma once

#include "geodeduce/algebra.hpp"
#include "geodeduce/hypergraph.hpp"
#include "geodeduce/validation.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gd {

struct TheoremInfo {
    std::string name;
    std::string statement;
};

// Compiled rule registry, in matching order.
const std::vector<TheoremInfo>& theorem_catalog();
const TheoremInfo* find_theorem(const std::string& name);

// One rule application: premises are graph nodes, conclusions are new literals.
struct Instance {
    std::string theorem;
    std::vector<int> premises;
    std::vector<NodeSpec> conclusions;
};

NodeSpec eq_spec(const Equation& e);
// Equation between two single quantities, sides ordered by display text.
Equation atom_equation(const Expr& a, const Expr& b);

// Incremental view of the graph's nodes used by the matchers.
class FactIndex {
public:
    FactIndex(const GeometrySketch& sketch, std::set<std::string> wanted = {});

    // Ingest nodes added since the previous call.
    void sync(const ProofHypergraph& g);

    const GeometrySketch& sketch() const { return *sketch_; }
    const std::set<std::string>& wanted() const { return wanted_; }
    size_t size() const { return lits_.size(); }
    const Literal& literal(int n) const { return lits_.at(n); }
    const std::optional<Equation>& equation(int n) const { return eqs_.at(n); }

    // Nodes whose top-level predicate is `pred`, ascending.
    const std::vector<int>& with_pred(const std::string& pred) const;
    // First node mentioning a quantity variable or a figure literal string.
    std::optional<int> mention(const std::string& name) const;
    // First node binding a quantity to a numeric constant.
    std::optional<std::pair<int, Number>> value(const std::string& var) const;
    // Node stating q1 = q2 for two single quantities.
    std::optional<int> atom_eq(const std::string& a, const std::string& b) const;
    // Premises showing two quantities equal: empty when identical, nullopt when unknown.
    std::optional<std::vector<int>> equal_evidence(const std::string& a, const std::string& b) const;
    // First node whose top-level literal is `l`, then the first node containing it as a subterm.
    std::optional<int> node_of(const Literal& l) const;
    std::optional<int> containing(const Literal& l) const;
    // Node establishing the strict betweenness a-m-b, if any.
    std::optional<std::vector<int>> between_evidence(const std::string& a, const std::string& m, const std::string& b) const;

    // Triangles with all three sides present as lines, sorted canonical vertex triples.
    const std::vector<std::array<std::string, 3>>& triangles() const { return triangles_; }

private:
    const GeometrySketch* sketch_;
    std::set<std::string> wanted_;
    std::vector<Literal> lits_;
    std::vector<std::optional<Equation>> eqs_;
    std::map<std::string, std::vector<int>> by_pred_;
    std::map<std::string, int> mention_;
    std::map<std::string, int> top_;
    std::map<std::string, int> nested_;
    std::map<std::string, std::pair<int, Number>> value_;
    std::map<std::string, int> atom_eq_;
    std::vector<std::array<std::string, 3>> triangles_;
};

// All instantiations of one rule over the indexed nodes, in deterministic order.
std::vector<Instance> match(const std::string& rule, const FactIndex& idx);

// Saturating DR pass: repeats sweeps over the enabled rules (all when empty) until nothing is added.
size_t deductive_pass(ProofHypergraph& g, FactIndex& idx, const std::set<std::string>& enabled = {},
                      size_t max_sweeps = 50);

// Adds one instance, dropping conclusions that are premises or their ancestors. Requires a new conclusion.
AddResult apply_instance(ProofHypergraph& g, const Instance& inst);

}  // namespace gd
