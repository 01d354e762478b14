#pragma once

#include "geodeduce/algebra.hpp"
#include "geodeduce/hypergraph.hpp"
#include "geodeduce/theorems.hpp"
#include "geodeduce/validation.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gd {

struct SolverConfig {
    size_t max_iterations = 100;
    double timeout = 1800;  // seconds
    size_t max_refinements = 5;
    size_t beam = 8;
    bool enable_dr = true;
    bool enable_ar = true;
    bool keep_graph = false;  // fill Solution::graph_json
};

struct Step {
    std::string theorem;
    std::vector<Literal> premises;
    std::vector<Literal> conclusions;
};

struct SolveStats {
    size_t iterations = 0;
    size_t nodes = 0;
    size_t edges = 0;
    size_t edges_in_minimal = 0;
    double wall_seconds = 0;
};

struct Solution {
    Literal answer;  // Equals(goal, value)
    Number value;
    std::vector<Step> steps;
    SolveStats stats;
    std::vector<std::string> notes;  // alternative roots and similar remarks
    std::string graph_json;
};

enum class UnsolvableReason { Saturated, MaxIterations, Timeout, NumericContradiction };
std::string reason_name(UnsolvableReason r);

struct Unsolvable {
    UnsolvableReason reason = UnsolvableReason::Saturated;
    std::string detail;
    SolveStats stats;
};

struct Inconsistent {
    ValidationReport report;
};

using SolveResult = std::variant<Solution, Unsolvable, Inconsistent>;

// Outcome of algebraic reasoning that the caller must act on.
struct AlgebraLog {
    std::optional<std::string> contradiction;
    std::vector<std::string> notes;
};

// Labels of the algebraic steps.
inline constexpr const char* kSubstitution = "Substitution";
inline constexpr const char* kTransitivity = "Transitivity of Equivalence";
inline constexpr const char* kLinear = "Solve Linear Equation System";
inline constexpr const char* kUnivariate = "Solve Univariate Equation";
inline constexpr const char* kConstEval = "Constant Evaluation";

// Saturating algebraic pass over the graph's equation nodes. Stops early past `deadline` (steady-clock seconds, 0 = none).
size_t algebraic_pass(ProofHypergraph& g, AlgebraLog& log, double deadline = 0);

SolveResult solve(const Formalization& f, const SolverConfig& cfg = {});

std::string display_literal(const Literal& l, PrintStyle st = {});
std::string render_solution(const Solution& s, PrintStyle st = {});
std::string result_json(const SolveResult& r, PrintStyle st = {});

// Every premise of every step is a known fact or an earlier conclusion, and the answer is established.
bool check_closure(const Solution& s, std::string* why = nullptr);

}  // namespace gd
