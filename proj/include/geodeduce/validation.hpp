#pragma once

#include "geodeduce/formal_lang.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gd {

// A maximal set of collinear points. `order` is a canonical consistent ordering;
// only betweenness facts implied by every consistent ordering are recorded.
struct Chain {
    std::vector<std::string> order;
    std::set<std::string> points;
    std::set<std::string> between;  // "A|M|B" with A < B: M strictly between A and B
    std::vector<Literal> sources;   // literals that put these points on one line
    bool ordered = true;            // false for plain Collinear groups

    bool has(const std::string& p) const { return points.count(p) > 0; }
};

struct CircleInfo {
    std::string center;
    std::set<std::string> points;
    std::optional<Arg> radius;  // from Circle(O, r)
};

struct Contradiction {
    std::vector<Literal> literals;  // first entry is the literal reported against the rest
    std::string message;
};

struct Completion {
    Literal lit;
    std::string rule;
};

struct ValidationReport {
    bool consistent = true;
    std::vector<Contradiction> contradictions;
    std::vector<Completion> completions;  // relation literals added to the representation
    std::vector<Completion> staged;       // implied equations; the solver re-derives these as named steps
};

class GeometrySketch {
public:
    std::set<std::string> points;
    std::vector<Chain> lines;
    std::map<std::string, CircleInfo> circles;
    std::vector<Literal> polygons;   // canonical polygon-family literals, deduplicated
    std::vector<Literal> relations;  // non-figure facts
    std::vector<Literal> angles;     // Angle(...) literals mentioned anywhere
    std::vector<Literal> derived;    // completions
    std::map<std::string, Literal> figure_source;  // figure literal -> first fact mentioning it
    std::vector<Contradiction> build_conflicts;    // betweenness facts with no consistent order

    // Index of the chain holding both points, or -1.
    int chain_of(const std::string& a, const std::string& b) const;
    bool collinear(const std::string& a, const std::string& b, const std::string& c) const;
    // m strictly between a and b on a common chain (implied by the facts).
    bool between(const std::string& a, const std::string& m, const std::string& b) const;
    // Relative side of p and q with respect to line ab: +1 same, -1 opposite, 0 unknown.
    int side(const std::string& a, const std::string& b, const std::string& p, const std::string& q) const;
    // Points of the chain through a and b (just {a, b} when no chain holds both).
    std::vector<std::string> line_points(const std::string& a, const std::string& b) const;
    // Points lying on circle centered at c.
    std::set<std::string> on_circle(const std::string& c) const;

    bool is_convex_polygon(const Literal& poly) const;

private:
    struct SideCache;
    mutable std::shared_ptr<SideCache> side_cache_;
};

GeometrySketch build_sketch_only(const Formalization& f);
std::pair<GeometrySketch, ValidationReport> build_sketch(const Formalization& f);
std::vector<Completion> complete_relations(GeometrySketch& sketch);
std::vector<Completion> staged_equations(const GeometrySketch& sketch);
std::vector<Contradiction> check_consistency(const GeometrySketch& sketch);
std::string format_feedback(const ValidationReport& report);

// Convenience: full validation of a formalization.
ValidationReport validate(const Formalization& f);

}  // namespace gd
