#include "doctest.h"

#include "geodeduce/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

using namespace gd;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Formalization problem_file(const std::string& rel) { return parse_problem(slurp(std::string(GEODEDUCE_DATA_DIR) + "/" + rel)); }

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::string shown(const std::vector<Literal>& ls) {
    std::vector<std::string> v;
    for (const auto& l : ls) v.push_back(display_literal(l));
    std::sort(v.begin(), v.end());
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : " | ") + x;
    return out;
}

}  // namespace

TEST_CASE("parallel-cut triangle: PQ = 3 with the 16-step trace") {
    auto f = problem_file("corpus/c1/problem.txt");
    auto t0 = std::chrono::steady_clock::now();
    auto r = solve(f);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 10);
    REQUIRE(std::holds_alternative<Solution>(r));
    const auto& s = std::get<Solution>(r);
    CHECK(std::fabs(static_cast<double>(s.value.value()) - 3) < 1e-6);
    CHECK(s.answer == parse_literal("Equals(LengthOf(Line(P,Q)),3)"));

    // Step multiset: (theorem, conclusions), ordering left to the partial order.
    std::multiset<std::pair<std::string, std::string>> want = {
        {"Known Facts", "MN = 6 | MQ = 5 | N on MO | NO = 3 + 3/5 | NQ ∥ OP | PQ = x | Q on MP | ∠NMP | ∠OMP"},
        {"Corresponding Angle Theorem", "∠MNQ = ∠MOP | ∠MPO = ∠MQN"},
        {"Line Segment Split", "MO = MN + NO"},
        {"Line Segment Split", "MP = MQ + PQ"},
        {"Same Angle", "∠NMP = ∠OMP"},
        {"Same Angle", "∠NMP = ∠NMQ"},
        {"Substitution", "3 + 6 + 3/5 = MO"},
        {"Solve Linear Equation System", "9.6 = MO"},
        {"Substitution", "5 + x = MP"},
        {"Transitivity of Equivalence", "∠NMQ = ∠OMP"},
        {"Angle-Angle Similarity Theorem", "△MNQ ∼ △MOP"},
        {"Similar Definition", "sim_ratio_MNQ_MOP = MN/MO | sim_ratio_MNQ_MOP = MQ/MP"},
        {"Substitution", "6/9.6 = sim_ratio_MNQ_MOP"},
        {"Substitution", "5/(5 + x) = sim_ratio_MNQ_MOP"},
        {"Transitivity of Equivalence", "6/9.6 = 5/(5 + x)"},
        {"Solve Linear Equation System", "3 = PQ"},
    };
    std::multiset<std::pair<std::string, std::string>> got;
    for (const auto& st : s.steps) got.insert({st.theorem, shown(st.conclusions)});
    CHECK(s.steps.size() == 16);
    CHECK(got == want);
    CHECK(s.steps.front().theorem == "Known Facts");

    std::string why;
    CHECK_MESSAGE(check_closure(s, &why), why);
    CHECK(s.stats.edges_in_minimal == 16);
    CHECK(s.stats.edges_in_minimal < s.stats.edges);

    auto text = render_solution(s);
    auto ls = lines_of(text);
    CHECK(ls.size() == 17);
    CHECK(ls.back() == "Answer: PQ = 3");
    bool corresponding = false;
    for (const auto& l : ls)
        corresponding |= l.find(": Corresponding Angle Theorem: NQ ∥ OP ⟹ ∠MNQ = ∠MOP, ∠MPO = ∠MQN") != std::string::npos;
    CHECK(corresponding);
}

TEST_CASE("rendering and JSON are byte-stable") {
    auto f = problem_file("corpus/c1/problem.txt");
    auto a = solve(f), b = solve(f);
    REQUIRE(std::holds_alternative<Solution>(a));
    CHECK(render_solution(std::get<Solution>(a)) == render_solution(std::get<Solution>(a)));
    CHECK(render_solution(std::get<Solution>(a)) == render_solution(std::get<Solution>(b)));
    CHECK(result_json(a) == result_json(b));
}

TEST_CASE("disabling either reasoning mode leaves the parallel-cut triangle unsolved") {
    auto f = problem_file("corpus/c1/problem.txt");
    SolverConfig no_dr;
    no_dr.enable_dr = false;
    SolverConfig no_ar;
    no_ar.enable_ar = false;
    CHECK(std::holds_alternative<Unsolvable>(solve(f, no_dr)));
    CHECK(std::holds_alternative<Unsolvable>(solve(f, no_ar)));
}

TEST_CASE("right triangle 19, 27, 41 is a numeric contradiction naming the relation") {
    auto r = solve(problem_file("fixtures/right_19_27_41/problem.txt"));
    REQUIRE(std::holds_alternative<Unsolvable>(r));
    const auto& u = std::get<Unsolvable>(r);
    CHECK(u.reason == UnsolvableReason::NumericContradiction);
    CHECK(u.detail.find("Pythagorean Theorem") != std::string::npos);
    CHECK(u.detail.find("AC² + BC² = AB²") != std::string::npos);
}

TEST_CASE("goal already known: one step, two rendered lines") {
    auto r = solve(parse_problem("Equals(LengthOf(Line(A,B)),5)\nFind(LengthOf(Line(A,B)))\n"));
    REQUIRE(std::holds_alternative<Solution>(r));
    const auto& s = std::get<Solution>(r);
    CHECK(s.steps.size() == 1);
    CHECK(s.steps[0].theorem == "Known Facts");
    auto ls = lines_of(render_solution(s));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "Step 1: Known Facts: start ⟹ AB = 5");
    CHECK(ls[1] == "Answer: AB = 5");
    CHECK(check_closure(s));
}

TEST_CASE("inconsistent input returns the validation report") {
    auto r = solve(parse_problem("Triangle(A,B,C)\nCollinear(A,B,C)\nFind(LengthOf(Line(A,B)))\n"));
    REQUIRE(std::holds_alternative<Inconsistent>(r));
    CHECK(std::get<Inconsistent>(r).report.contradictions.size() == 1);
}

TEST_CASE("budgets") {
    auto f = problem_file("corpus/c1/problem.txt");
    SolverConfig one;
    one.max_iterations = 1;
    auto r = solve(f, one);
    REQUIRE(std::holds_alternative<Unsolvable>(r));
    CHECK(std::get<Unsolvable>(r).reason == UnsolvableReason::MaxIterations);
    CHECK(std::get<Unsolvable>(r).stats.iterations == 1);

    SolverConfig hurry;
    hurry.timeout = 0;
    auto t = solve(f, hurry);
    REQUIRE(std::holds_alternative<Unsolvable>(t));
    CHECK(std::get<Unsolvable>(t).reason == UnsolvableReason::Timeout);
}

TEST_CASE("algebraic pass on bare graphs") {
    ProofHypergraph empty(std::vector<Literal>{parse_literal("Triangle(A,B,C)")});
    AlgebraLog log;
    CHECK(algebraic_pass(empty, log) == 0);
    CHECK_FALSE(log.contradiction);

    ProofHypergraph clash(std::vector<Literal>{parse_literal("Equals(x,1)"), parse_literal("Equals(x,2)")});
    AlgebraLog log2;
    algebraic_pass(clash, log2);
    CHECK(log2.contradiction);

    ProofHypergraph chain(std::vector<Literal>{parse_literal("Equals(x,2)"), parse_literal("Equals(y,x+3)")});
    AlgebraLog log3;
    CHECK(algebraic_pass(chain, log3) > 0);
    CHECK(chain.find(parse_literal("Equals(y,5)")));
    CHECK(algebraic_pass(chain, log3) == 0);
}

TEST_CASE("result JSON fields") {
    auto f = problem_file("corpus/c1/problem.txt");
    auto j = nlohmann::json::parse(result_json(solve(f)));
    CHECK(j["status"] == "solved");
    CHECK(j["answer"]["literal"] == "Equals(LengthOf(Line(P,Q)),3)");
    CHECK(j["answer"]["value"].get<double>() == doctest::Approx(3));
    REQUIRE(j["steps"].size() == 16);
    for (const auto& st : j["steps"]) {
        CHECK(st.contains("index"));
        CHECK(st.contains("theorem"));
        CHECK(st["premises"].is_array());
        CHECK(st["conclusions"].is_array());
    }
    for (const char* k : {"iterations", "nodes", "edges", "edges_in_minimal"}) CHECK(j["stats"].contains(k));

    auto u = nlohmann::json::parse(result_json(solve(problem_file("fixtures/right_19_27_41/problem.txt"))));
    CHECK(u["status"] == "unsolvable");
    CHECK(u["reason"] == "numeric_contradiction");

    auto in = nlohmann::json::parse(result_json(solve(parse_problem("Triangle(A,B,C)\nCollinear(A,B,C)\nFind(x)\n"))));
    CHECK(in["status"] == "inconsistent");
    CHECK(in["feedback"].get<std::string>().rfind("ERROR: ", 0) == 0);
}

TEST_CASE("ASCII rendering has no non-ASCII bytes") {
    auto r = solve(problem_file("corpus/c1/problem.txt"));
    REQUIRE(std::holds_alternative<Solution>(r));
    PrintStyle ascii;
    ascii.unicode = false;
    auto text = render_solution(std::get<Solution>(r), ascii);
    CHECK(std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 128; }));
}
