#include "doctest.h"
#include "geodeduce/algebra.hpp"
#include "geodeduce/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace gd;

namespace {

Formalization problem(std::vector<std::string> facts, const std::string& goal = "Find(x)") {
    std::string text;
    for (const auto& f : facts) text += f + "\n";
    return parse_problem(text + goal + "\n");
}

using Coords = std::map<std::string, std::pair<long double, long double>>;

long double dist(const Coords& c, const std::string& a, const std::string& b) {
    auto [ax, ay] = c.at(a);
    auto [bx, by] = c.at(b);
    return std::hypot(ax - bx, ay - by);
}

long double angle_deg(const Coords& c, const std::string& a, const std::string& v, const std::string& b) {
    auto [ax, ay] = c.at(a);
    auto [vx, vy] = c.at(v);
    auto [bx, by] = c.at(b);
    long double ux = ax - vx, uy = ay - vy, wx = bx - vx, wy = by - vy;
    return std::atan2(std::fabs(ux * wy - uy * wx), ux * wx + uy * wy) * 180 / M_PI;
}

// Value of a quantity variable under a coordinate embedding.
long double quantity(const Coords& c, const std::string& name, const std::map<std::string, long double>& radii) {
    Literal q = parse_literal(name);
    const Literal& inner = *q.arg(0).lit;
    if (q.pred == "LengthOf") return dist(c, inner.arg(0).text, inner.arg(1).text);
    if (q.pred == "MeasureOf") return angle_deg(c, inner.arg(0).text, inner.arg(1).text, inner.arg(2).text);
    if (q.pred == "RadiusOf") return radii.at(inner.arg(0).text);
    throw std::runtime_error("unhandled quantity " + name);
}

bool holds(const Literal& l, const Coords& c, const std::map<std::string, long double>& radii) {
    if (l.pred == "Perpendicular" || l.pred == "Parallel") {
        auto dir = [&](const Arg& a) {
            auto [px, py] = c.at(a.lit->arg(0).text);
            auto [qx, qy] = c.at(a.lit->arg(1).text);
            return std::make_pair(qx - px, qy - py);
        };
        auto [ux, uy] = dir(l.arg(0));
        auto [wx, wy] = dir(l.arg(1));
        long double v = l.pred == "Perpendicular" ? ux * wx + uy * wy : ux * wy - uy * wx;
        return std::fabs(v) < 1e-9L * std::max(1.0L, std::hypot(ux, uy) * std::hypot(wx, wy));
    }
    if (l.pred == "Equals") {
        Equation e = equation_from_literal(l);
        Assignment a;
        for (const auto& side : {e.lhs, e.rhs})
            for (const auto& v : vars_of(side)) a[v] = quantity(c, v, radii);
        long double lv = eval(e.lhs, a), rv = eval(e.rhs, a);
        return std::fabs(lv - rv) < 1e-9L * std::max(1.0L, std::fabs(lv));
    }
    return true;  // figure literals
}

std::vector<std::string> lines_of(const std::string& feedback) {
    std::vector<std::string> out;
    size_t p = 0;
    while (p < feedback.size()) {
        size_t e = feedback.find('\n', p);
        out.push_back(feedback.substr(p, e - p));
        p = e + 1;
    }
    return out;
}

struct Embedded {
    std::vector<std::string> facts;
    Coords coords;
    std::map<std::string, long double> radii;
};

std::vector<Embedded> embedded_corpus() {
    std::vector<Embedded> out;
    out.push_back({{"Perpendicular(Line(P,H),Line(A,B))", "PointLiesOnLine(H,Line(A,B))"},
                   {{"A", {0, 0}}, {"B", {4, 0}}, {"H", {1, 0}}, {"P", {1, 3}}},
                   {}});
    Coords c1 = {{"M", {0, 0}}, {"O", {8, 2}}, {"P", {3, 7}}};
    c1["N"] = {8 * 0.625L, 2 * 0.625L};
    c1["Q"] = {3 * 0.625L, 7 * 0.625L};
    out.push_back({{"Parallel(Line(N,Q),Line(O,P))", "PointLiesOnLine(Q,Line(M,P))", "PointLiesOnLine(N,Line(M,O))",
                    "Angle(N,M,P)", "Angle(O,M,P)"},
                   c1,
                   {}});
    out.push_back({{"IsDiameterOf(Line(A,B),Circle(O))", "PointLiesOnCircle(C,Circle(O))", "Triangle(A,B,C)"},
                   {{"O", {0, 0}}, {"A", {5, 0}}, {"B", {-5, 0}}, {"C", {3, 4}}},
                   {{"O", 5}}});
    out.push_back({{"PointLiesOnLine(E,Line(A,B))", "PointLiesOnLine(E,Line(C,D))", "Angle(A,E,C)"},
                   {{"A", {-2, -1}}, {"B", {4, 2}}, {"C", {-1, 3}}, {"D", {1, -3}}, {"E", {0, 0}}},
                   {}});
    out.push_back({{"Parallel(Line(A,D),Line(B,C))", "PointLiesOnLine(E,Line(B,C))", "PointLiesOnLine(F,Line(A,D))",
                    "Perpendicular(Line(A,B),Line(B,C))", "Quadrilateral(A,B,C,D)"},
                   {{"A", {0, 4}}, {"B", {0, 0}}, {"C", {6, 0}}, {"D", {3, 4}}, {"E", {2, 0}}, {"F", {1, 4}}},
                   {}});
    return out;
}

}  // namespace

TEST_CASE("collinear chains carry only implied betweenness") {
    auto s = build_sketch_only(problem({"PointLiesOnLine(D,Line(E,C))"}));
    int c = s.chain_of("E", "C");
    REQUIRE(c >= 0);
    CHECK(s.lines[c].order == std::vector<std::string>{"C", "D", "E"});
    CHECK(s.between("E", "D", "C"));
    CHECK_FALSE(s.between("D", "E", "C"));

    auto t = build_sketch_only(problem({"PointLiesOnLine(B,Line(A,C))", "PointLiesOnLine(C,Line(A,D))"}));
    CHECK(t.lines.size() == 1);
    CHECK(t.lines[0].order == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(t.between("A", "B", "D"));
    CHECK(t.between("B", "C", "D"));

    // B and D both inside AC: their relative order is not determined.
    auto u = build_sketch_only(problem({"PointLiesOnLine(B,Line(A,C))", "PointLiesOnLine(D,Line(A,C))"}));
    CHECK(u.between("A", "B", "C"));
    CHECK(u.between("A", "D", "C"));
    CHECK_FALSE(u.between("A", "B", "D"));
    CHECK_FALSE(u.between("A", "D", "B"));

    auto col = build_sketch_only(problem({"Collinear(A,B,C)"}));
    REQUIRE(col.lines.size() == 1);
    CHECK_FALSE(col.lines[0].ordered);
    CHECK(col.collinear("C", "A", "B"));
}

TEST_CASE("perpendicular completion adds exactly the two sub-segment relations") {
    auto [s, r] = build_sketch(problem({"Perpendicular(Line(P,H),Line(A,B))", "PointLiesOnLine(H,Line(A,B))"}));
    CHECK(r.consistent);
    REQUIRE(r.completions.size() == 2);
    std::set<std::string> got;
    for (const auto& c : r.completions) {
        got.insert(c.lit.str());
        CHECK(c.rule == "perpendicular_propagation");
    }
    CHECK(got == std::set<std::string>{"Perpendicular(Line(A,H),Line(H,P))", "Perpendicular(Line(B,H),Line(H,P))"});
    CHECK(format_feedback(r) ==
          "ADDED: Perpendicular(Line(A,H),Line(H,P)) [perpendicular_propagation]\n"
          "ADDED: Perpendicular(Line(B,H),Line(H,P)) [perpendicular_propagation]\n");

    bool split = false;
    for (const auto& st : r.staged)
        if (st.rule == "segment_split" &&
            st.lit.str() == "Equals(LengthOf(Line(A,B)),Add(LengthOf(Line(A,H)),LengthOf(Line(B,H))))")
            split = true;
    CHECK(split);
}

TEST_CASE("triangle with collinear vertices is one contradiction") {
    auto r = validate(problem({"Triangle(A,B,C)", "PointLiesOnLine(B,Line(A,C))"}));
    CHECK_FALSE(r.consistent);
    REQUIRE(r.contradictions.size() == 1);
    CHECK(r.contradictions[0].message == "Triangle(A,B,C) conflicts with PointLiesOnLine(B,Line(A,C))");
    CHECK(r.contradictions[0].literals.size() == 2);

    auto r2 = validate(problem({"Triangle(A,B,C)", "Collinear(A,B,C)"}));
    REQUIRE(r2.contradictions.size() == 1);
    CHECK(r2.contradictions[0].message == "Triangle(A,B,C) conflicts with Collinear(A,B,C)");
    auto lines = lines_of(format_feedback(r2));
    CHECK(lines[0] == "ERROR: Triangle(A,B,C) conflicts with Collinear(A,B,C)");
}

TEST_CASE("other inconsistencies") {
    auto par = validate(problem({"Parallel(Line(A,B),Line(A,C))"}));
    REQUIRE(par.contradictions.size() == 1);
    CHECK(par.contradictions[0].message.find("meet at A") != std::string::npos);

    auto pp = validate(problem({"Parallel(Line(A,B),Line(C,D))", "Perpendicular(Line(A,B),Line(C,D))"}));
    REQUIRE(pp.contradictions.size() == 1);
    CHECK(pp.contradictions[0].literals.size() == 2);

    CHECK(validate(problem({"PointLiesOnCircle(O,Circle(O))"})).contradictions.size() == 1);
    CHECK(validate(problem({"PointLiesOnLine(A,Line(A,B))"})).contradictions.size() == 1);
    CHECK(validate(problem({"Triangle(A,A,B)"})).contradictions.size() == 1);

    auto order = validate(problem({"PointLiesOnLine(B,Line(A,C))", "PointLiesOnLine(A,Line(B,C))"}));
    REQUIRE(order.contradictions.size() == 1);
    CHECK(order.contradictions[0].literals.size() == 2);
}

TEST_CASE("worked example formalization is consistent and complete") {
    auto [s, r] = build_sketch(problem({"Parallel(Line(N,Q),Line(O,P))", "PointLiesOnLine(Q,Line(M,P))",
                                        "PointLiesOnLine(N,Line(M,O))", "Equals(LengthOf(Line(M,N)),6)",
                                        "Equals(LengthOf(Line(N,O)),3+3/5)", "Equals(LengthOf(Line(M,Q)),5)",
                                        "Equals(LengthOf(Line(P,Q)),x)", "Angle(N,M,P)", "Angle(O,M,P)"},
                                       "Find(LengthOf(Line(Q,P)))"));
    CHECK(r.contradictions.empty());
    CHECK(check_consistency(s).empty());
    CHECK(r.completions.empty());
    CHECK(format_feedback(r) == "OK\n");

    std::set<std::string> staged;
    for (const auto& st : r.staged) staged.insert(st.lit.str());
    CHECK(staged.count("Equals(MeasureOf(Angle(N,M,P)),MeasureOf(Angle(O,M,P)))"));
    CHECK(staged.count("Equals(LengthOf(Line(M,O)),Add(LengthOf(Line(M,N)),LengthOf(Line(N,O))))"));
    CHECK(staged.count("Equals(LengthOf(Line(M,P)),Add(LengthOf(Line(M,Q)),LengthOf(Line(P,Q))))"));

    // Sidedness used by the angle rules.
    CHECK(s.side("M", "P", "N", "O") == 1);
    CHECK(s.side("N", "Q", "M", "O") == -1);
    CHECK(s.side("N", "Q", "M", "P") == -1);
    CHECK(s.side("N", "Q", "O", "P") == 1);
    CHECK(s.side("M", "P", "M", "O") == 0);
}

TEST_CASE("polygon sides and convexity") {
    auto [s, r] = build_sketch(problem({"Triangle(A,B,C)", "PointLiesOnLine(D,Line(B,C))"}));
    CHECK(r.consistent);
    CHECK(s.side("A", "D", "B", "C") == -1);
    CHECK(s.side("B", "C", "A", "A") == 1);
    CHECK(s.is_convex_polygon(parse_literal("Triangle(A,B,C)")));
    size_t sides = 0, angles = 0;
    for (const auto& c : r.completions) {
        sides += c.rule == "polygon_sides";
        angles += c.rule == "polygon_angles";
    }
    CHECK(sides == 2);  // Line(B,C) is already mentioned
    CHECK(angles == 3);
}

TEST_CASE("feedback is deterministic and independent of fact order") {
    std::vector<std::string> facts = {"Perpendicular(Line(P,H),Line(A,B))", "PointLiesOnLine(H,Line(A,B))",
                                      "Triangle(X,Y,Z)", "Collinear(X,Y,Z)", "Parallel(Line(A,B),Line(A,C))"};
    std::string first = format_feedback(validate(problem(facts)));
    CHECK(first == format_feedback(validate(problem(facts))));
    std::mt19937 rng(4);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(facts.begin(), facts.end(), rng);
        CHECK(format_feedback(validate(problem(facts))) == first);
    }
    auto lines = lines_of(first);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0].rfind("ERROR: ", 0) == 0);
    CHECK(lines[1].rfind("ERROR: ", 0) == 0);
    CHECK(lines.back().rfind("ADDED: ", 0) == 0);
}

TEST_CASE("completion reaches a fixpoint") {
    for (const auto& e : embedded_corpus()) {
        auto s = build_sketch_only(problem(e.facts));
        complete_relations(s);
        CHECK(complete_relations(s).empty());
    }
}

TEST_CASE("completions and staged equations hold on coordinate embeddings") {
    for (const auto& e : embedded_corpus()) {
        auto f = problem(e.facts);
        for (const auto& fact : f.facts) REQUIRE(holds(fact, e.coords, e.radii));
        auto [s, r] = build_sketch(f);
        CHECK(r.consistent);
        for (const auto& c : r.completions) {
            CAPTURE(c.lit.str());
            CHECK(holds(c.lit, e.coords, e.radii));
        }
        for (const auto& st : r.staged) {
            CAPTURE(st.lit.str());
            CHECK(holds(st.lit, e.coords, e.radii));
        }
        // The sidedness oracle agrees with the embedding wherever it answers.
        for (const auto& ch : s.lines) {
            if (ch.order.size() < 2) continue;
            const auto &a = ch.order.front(), &b = ch.order.back();
            auto cross = [&](const std::string& p) {
                auto [ax, ay] = e.coords.at(a);
                auto [bx, by] = e.coords.at(b);
                auto [px, py] = e.coords.at(p);
                return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            };
            for (const auto& p : s.points)
                for (const auto& q : s.points) {
                    int sd = s.side(a, b, p, q);
                    if (sd == 0) continue;
                    CAPTURE(a + b + ":" + p + q);
                    CHECK(sd == (cross(p) * cross(q) > 0 ? 1 : -1));
                }
        }
    }
}
