#include "doctest.h"
#include "geodeduce/algebra.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace gd;

static Equation eq(const std::string& l, const std::string& r) { return Equation(parse_expr(l), parse_expr(r)); }
static Expr L(const char* a, const char* b) { return var("LengthOf(Line(" + std::string(a) + "," + b + "))"); }

TEST_CASE("normal form and equation identity") {
    CHECK(parse_expr("a+b")->key == parse_expr("b+a")->key);
    CHECK(parse_expr("(a+b)+c")->key == parse_expr("a+(b+c)")->key);
    CHECK(parse_expr("2*a*3")->key == parse_expr("6a")->key);
    CHECK(parse_expr("0+x")->key == parse_expr("x")->key);
    CHECK(eq("x", "y+1").key == eq("y+1", "x").key);
    CHECK(eq("a-b", "0").key == eq("b", "a").key);
    // Unfolded constants stay distinct from their folded value.
    CHECK(eq("6+(3+3/5)", "m").key != eq("9.6", "m").key);
    CHECK(print_expr(parse_expr("6/9.6")) == "6/9.6");
    CHECK(print_expr(div(num(5), add({num(5), var("x")}))) == "5/(5 + x)");
}

TEST_CASE("expression parser") {
    CHECK(print_expr(parse_expr("\\frac{1}{2}")) == "1/2");
    CHECK(const_value(parse_expr("\\frac{1}{2}"))->str() == "0.5");
    CHECK(const_value(parse_expr("\\sqrt{16}"))->str() == "4");
    CHECK(const_value(parse_expr("2^3"))->str() == "8");
    CHECK(const_value(parse_expr("-2^2"))->str() == "-4");
    CHECK(const_value(parse_expr("3+3/5"))->str() == "3.6");
    CHECK(parse_expr("3x")->key == parse_expr("3*x")->key);
    CHECK(std::fabs(static_cast<double>(const_value(parse_expr("2\\pi"))->value()) - 2 * M_PI) < 1e-12);
    CHECK(vars_of(parse_expr("LengthOf(Line(B,A))+1")) == std::set<std::string>{"LengthOf(Line(A,B))"});
    CHECK_THROWS_AS(parse_expr("3+"), AlgebraError);
    CHECK_THROWS_AS(parse_expr(""), AlgebraError);
}

TEST_CASE("quantity names and literals") {
    Literal q = parse_literal("AreaOf(Triangle(C,B,A))");
    CHECK(quantity_name(q) == "AreaOf(Polygon(A,B,C))");
    CHECK(quantity_name(parse_literal("RadiusOf(Circle(O,r))")) == "RadiusOf(Circle(O))");
    CHECK(quantity_name(parse_literal("PerimeterOf(Circle(O))")) == "CircumferenceOf(Circle(O))");
    Equation e = equation_from_literal(parse_literal("Equals(LengthOf(Line(M,N)),6)"));
    CHECK(e.str() == "MN = 6");
    CHECK(equation_literal(e).str() == "Equals(LengthOf(Line(M,N)),6)");
    Equation a = equation_from_literal(parse_literal("Equals(MeasureOf(Angle(P,M,N)),MeasureOf(Angle(O,M,P)))"));
    CHECK(a.str() == "\xE2\x88\xA0NMP = \xE2\x88\xA0OMP");
    CHECK(a.str({false}) == "angle NMP = angle OMP");
    CHECK(infer_domain("MeasureOf(Angle(A,B,C))") == Domain::AngleDeg);
    CHECK(infer_domain("LengthOf(Line(A,B))") == Domain::NonnegLength);
    CHECK(infer_domain("x") == Domain::Free);
    // Formal text round-trips through the parser.
    Equation s(var("sim_ratio_MNQ_MOP"), div(L("M", "N"), L("M", "O")));
    Equation back = equation_from_literal(parse_literal(s.formal()));
    CHECK(back.key == s.key);
}

TEST_CASE("substitute") {
    Equation r = substitute(eq("a", "b"), eq("b", "sin(x)"));
    CHECK(r.key == eq("a", "sin(x)").key);

    Equation split(L("M", "P"), add({L("M", "Q"), L("P", "Q")}));
    Equation out = substitute_many(split, {{"LengthOf(Line(P,Q))", var("x")}, {"LengthOf(Line(M,Q))", num(5)}});
    CHECK(out.key == Equation(add({num(5), var("x")}), L("M", "P")).key);
    CHECK(Equation(add({num(5), var("x")}), L("M", "P")).str() == "5 + x = MP");

    CHECK_THROWS_AS(substitute(eq("a", "b"), eq("c", "d")), AlgebraError);
}

TEST_CASE("evaluate_constants") {
    Equation e(add({num(6), add({num(3), div(num(3), num(5))})}), L("M", "O"));
    Equation f = evaluate_constants(e);
    CHECK(f.str() == "9.6 = MO");
    CHECK(f.lhs->num.exact());
    try {
        evaluate_constants(eq("0+x", "x"));
        FAIL("expected NotApplicable");
    } catch (const AlgebraError& err) {
        CHECK(err.kind == AlgebraError::Kind::NotApplicable);
    }
    Equation t = evaluate_constants(eq("sin(30)*10", "c"));
    CHECK(t.key == eq("5", "c").key);
    Equation circ = evaluate_constants(eq("(2+3)*\\pi", "C"));
    CHECK(circ.key == eq("5\\pi", "C").key);
    CHECK_THROWS_AS(evaluate_constants(eq("2*\\pi*5", "C")), AlgebraError);
}

TEST_CASE("solve_univariate") {
    auto r = solve_univariate(eq("x^2", "25"), "x", Domain::NonnegLength);
    REQUIRE(r.size() == 1);
    CHECK(r[0].key == eq("x", "5").key);
    CHECK(r[0].rhs->num.exact());

    auto h = solve_univariate(eq("19^2+27^2", "h^2"), "h", Domain::NonnegLength);
    REQUIRE(h.size() == 1);
    CHECK(std::fabs(static_cast<double>(h[0].rhs->num.value()) - std::sqrt(1090.0)) < 1e-9);
    CHECK_FALSE(h[0].rhs->num.approx_equal(Number(41)));

    try {
        solve_univariate(eq("cos(x)", "2"), "x", Domain::AngleDeg);
        FAIL("expected NoRealSolution");
    } catch (const AlgebraError& e) {
        CHECK(e.kind == AlgebraError::Kind::NoRealSolution);
    }
    try {
        solve_univariate(eq("x+10", "4"), "x", Domain::NonnegLength);
        FAIL("expected DomainEmpty");
    } catch (const AlgebraError& e) {
        CHECK(e.kind == AlgebraError::Kind::DomainEmpty);
    }
    auto s = solve_univariate(eq("sin(x)", "1/2"), "x", Domain::AngleDeg);
    REQUIRE(s.size() == 2);
    CHECK(s[0].rhs->num.str() == "30");
    CHECK(s[1].rhs->num.str() == "150");
    auto lin = solve_univariate(eq("3x+10", "5x-20"), "x", Domain::Free);
    REQUIRE(lin.size() == 1);
    CHECK(lin[0].rhs->num.str() == "15");
}

TEST_CASE("solve_linear_system worked examples") {
    Expr PQ = L("P", "Q");
    std::vector<Equation> sys = {Equation(div(num(6), num(Number::ratio(48, 5))), div(num(5), add({num(5), var("x")}))),
                                 Equation(var("x"), PQ)};
    auto res = solve_linear_system(sys);
    CHECK_FALSE(res.inconsistent);
    bool found = false;
    for (auto& d : res.derived) {
        if (d.eq.key == Equation(num(3), PQ).key) {
            found = true;
            CHECK(d.premises == std::vector<size_t>{0, 1});
            CHECK(d.eq.str() == "3 = PQ");
        }
    }
    CHECK(found);

    std::vector<Equation> abc = {eq("a", "1"), eq("b", "2"), eq("d", "4"), eq("a+b", "c")};
    auto r2 = solve_linear_system(abc);
    found = false;
    for (auto& d : r2.derived)
        if (d.eq.key == eq("c", "3").key) {
            found = true;
            CHECK(d.premises == std::vector<size_t>{0, 1, 3});
        }
    CHECK(found);

    std::vector<Equation> xy = {eq("x+y", "2"), eq("x-y", "0"), eq("x", "1")};
    auto p = minimal_premises(xy, eq("y", "1"));
    REQUIRE(p);
    CHECK(p->size() == 2);

    std::vector<Equation> bad = {eq("x", "1"), eq("y", "3"), eq("x", "2")};
    auto r3 = solve_linear_system(bad);
    REQUIRE(r3.inconsistent);
    CHECK(*r3.inconsistent == std::vector<size_t>{0, 2});
}

TEST_CASE("numeric_check") {
    CHECK(numeric_check(eq("a", "sin(x)"), 100, nullptr, [](Assignment& a, std::mt19937_64&) {
        a["a"] = std::sin(a["x"] * M_PI / 180);
    }));
    CHECK_FALSE(numeric_check(eq("x", "x+1"), 100));
    CHECK(numeric_check(Equation(div(num(6), num(Number::ratio(48, 5))), var("sim_ratio")), 10, nullptr,
                        [](Assignment& a, std::mt19937_64&) { a["sim_ratio"] = 0.625; }));
    CHECK(numeric_check(eq("(a+b)^2", "a^2+2a*b+b^2"), 100));
}

TEST_CASE("oracle: minimal premise sets match exhaustive enumeration") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto sys = oracle::random_linear_system(rng, 2 + static_cast<int>(rng() % 7));
        auto res = solve_linear_system(sys);
        if (res.inconsistent) {
            auto best = oracle::min_infeasible_size(sys);
            REQUIRE(best);
            CHECK(res.inconsistent->size() == *best);
            continue;
        }
        for (auto& d : res.derived) {
            CAPTURE(d.eq.str());
            auto best = oracle::min_implying_size(sys, d.eq);
            REQUIRE(best);
            CHECK(d.premises.size() == *best);
            CHECK(oracle::subset_implies(sys, d.premises, d.eq));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("oracle: substitution and folding are numerically sound") {
    std::mt19937_64 rng(5);
    int pass = 0;
    for (int i = 0; i < 500; ++i) {
        Expr e1 = oracle::random_expr(rng, {"a", "b", "c"}, 3);
        Expr e2 = oracle::random_expr(rng, {"a", "c"}, 2);
        Equation target(var("t"), e1);
        Equation source(var("b"), e2);
        if (!contains_var(e1, "b")) continue;
        Equation out = substitute(target, source);
        bool ok = numeric_check(out, 20, nullptr, [&](Assignment& a, std::mt19937_64&) {
            a["b"] = eval(e2, a);
            a["t"] = eval(e1, a);
        });
        CHECK(ok);
        pass += ok;

        Expr c = oracle::random_const_expr(rng, 3);
        CHECK(numeric_check(Equation(c, fold(c, false)), 1));
    }
    CHECK(pass > 100);
}

TEST_CASE("oracle: univariate roots match a dense grid") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 60; ++i) {
        auto [e, dom] = oracle::random_univariate(rng);
        CAPTURE(e.str());
        std::vector<Equation> got;
        try {
            got = solve_univariate(e, "x", dom);
        } catch (const AlgebraError&) {
        }
        auto want = oracle::grid_roots(e, "x", dom);
        REQUIRE(got.size() == want.size());
        for (size_t k = 0; k < got.size(); ++k) CHECK(std::fabs(got[k].rhs->num.value() - want[k]) < 1e-9L);
    }
}

TEST_CASE("exactness on rational inputs") {
    auto res = solve_linear_system({eq("2a+3b", "7/3"), eq("a-b", "1/6")});
    REQUIRE(res.derived.size() == 2);
    for (auto& d : res.derived) CHECK(d.eq.lhs->num.exact());
}
