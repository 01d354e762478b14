// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "geodeduce/harness.hpp"
#include "support/fuzz.hpp"
#include "support/graph_oracle.hpp"
#include "support/oracles.hpp"
#include "support/table_literals.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace gd;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kAnswerTol = 1e-6;
constexpr long double kRootTol = 1e-9L;
constexpr double kGrammarSeconds = 5;
constexpr double kTraceSeconds = 10;
constexpr double kProblemSeconds = 60;
constexpr double kAblationShare = 0.8;

const fs::path kData = GEODEDUCE_DATA_DIR;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Formalization problem_file(const std::string& rel) { return parse_problem(slurp(kData / rel)); }

Formalization facts(const std::vector<std::string>& fs, const std::string& goal = "Find(x)") {
    std::string t;
    for (const auto& f : fs) t += f + "\n";
    return parse_problem(t + goal + "\n");
}

struct Verdict {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

int failures = 0;

void report(int n, const std::string& name, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.fail(std::string("exception: ") + e.what());
    }
    failures += !v.ok;
    std::printf("criterion %2d %-34s %s%s%s\n", n, name.c_str(), v.ok ? "PASS" : "FAIL", v.detail.empty() ? "" : "  ",
                v.detail.c_str());
    std::fflush(stdout);
}

std::string shown(const std::vector<Literal>& ls) {
    std::vector<std::string> v;
    for (const auto& l : ls) v.push_back(display_literal(l));
    std::sort(v.begin(), v.end());
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : " | ") + x;
    return out;
}

Verdict grammar() {
    Verdict v;
    auto t0 = Clock::now();
    const auto& table = table_literals();
    if (table.size() < 60) v.fail("only " + std::to_string(table.size()) + " catalog literals");
    for (const auto& s : table) {
        Literal l = parse_literal(s);
        if (parse_literal(print_literal(l)).str() != l.str()) v.fail("catalog literal does not round-trip: " + s);
    }
    LiteralFuzzer fz(20241015);
    for (int i = 0; i < 1000; ++i) {
        std::string s = fz.literal();
        std::string printed = print_literal(parse_literal(s));
        if (parse_literal(printed).str() != printed) v.fail("fuzzed literal does not round-trip: " + s);
    }
    double secs = since(t0);
    if (secs >= kGrammarSeconds) v.fail("took " + std::to_string(secs) + " s");
    if (v.ok) v.detail = std::to_string(table.size()) + " catalog + 1000 fuzzed literals";
    return v;
}

Verdict validation() {
    Verdict v;
    auto r = validate(facts({"Perpendicular(Line(P,H),Line(A,B))", "PointLiesOnLine(H,Line(A,B))"}));
    std::set<std::string> got;
    for (const auto& c : r.completions) got.insert(c.lit.str());
    std::set<std::string> want{canonicalize(parse_literal("Perpendicular(Line(P,H),Line(A,H))")).str(),
                               canonicalize(parse_literal("Perpendicular(Line(P,H),Line(B,H))")).str()};
    if (r.completions.size() != 2 || got != want) v.fail("perpendicular completion differs");
    auto bad = facts({"Triangle(A,B,C)", "Collinear(A,B,C)"});
    auto r2 = validate(bad);
    if (r2.contradictions.size() != 1) v.fail(std::to_string(r2.contradictions.size()) + " contradictions");
    auto text = format_feedback(r2);
    if (format_feedback(validate(bad)) != text) v.fail("feedback differs between runs");
    if (format_feedback(validate(facts({"Collinear(A,B,C)", "Triangle(A,B,C)"}))) != text)
        v.fail("feedback depends on fact order");
    return v;
}

Verdict trace() {
    Verdict v;
    auto f = problem_file("corpus/c1/problem.txt");
    auto t0 = Clock::now();
    auto r = solve(f);
    double secs = since(t0);
    const auto* s = std::get_if<Solution>(&r);
    if (!s) {
        v.fail("not solved");
        return v;
    }
    if (std::fabs(static_cast<double>(s->value.value()) - 3) > kAnswerTol) v.fail("answer " + s->value.str());
    if (!(s->answer == parse_literal("Equals(LengthOf(Line(P,Q)),3)"))) v.fail("answer literal " + s->answer.str());
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
    for (const auto& st : s->steps) got.insert({st.theorem, shown(st.conclusions)});
    if (got != want) v.fail("step multiset differs (" + std::to_string(s->steps.size()) + " steps)");
    std::string why;
    if (!check_closure(*s, &why)) v.fail("closure: " + why);
    if (secs >= kTraceSeconds) v.fail("took " + std::to_string(secs) + " s");
    if (v.ok) v.detail = "PQ = 3 in 16 steps";
    return v;
}

Verdict contradiction() {
    Verdict v;
    auto r = solve(problem_file("fixtures/right_19_27_41/problem.txt"));
    const auto* u = std::get_if<Unsolvable>(&r);
    if (!u || u->reason != UnsolvableReason::NumericContradiction) {
        v.fail("not a numeric contradiction");
        return v;
    }
    if (u->detail.find("Pythagorean Theorem") == std::string::npos || u->detail.find("AC² + BC² = AB²") == std::string::npos)
        v.fail("relation not named: " + u->detail);
    return v;
}

Verdict minimality() {
    Verdict v;
    int agree = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937 rng(static_cast<unsigned>(seed) + 1000);
        auto g = graph_oracle::random_graph(rng, 12);
        bool ok = g.edge_count() <= 12;
        for (int goal = 1; goal < static_cast<int>(g.node_count()); ++goal)
            ok &= g.find_minimal_subgraph(goal).edges.size() == graph_oracle::brute_min(g, goal);
        agree += ok;
    }
    v.detail = std::to_string(agree) + "/100 graphs";
    if (agree != 100) v.fail(v.detail);
    return v;
}

Verdict algebra_oracles() {
    Verdict v;
    // (a) minimum-cardinality premise sets.
    std::mt19937_64 rng(20241015);
    int sets = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto sys = oracle::random_linear_system(rng, 2 + static_cast<int>(rng() % 7));
        auto res = solve_linear_system(sys);
        if (res.inconsistent) {
            if (res.inconsistent->size() != oracle::min_infeasible_size(sys)) v.fail("infeasible core not minimum");
            ++sets;
            continue;
        }
        for (const auto& d : res.derived) {
            auto best = oracle::min_implying_size(sys, d.eq);
            if (!best || d.premises.size() != *best || !oracle::subset_implies(sys, d.premises, d.eq))
                v.fail("premise set not minimum for " + d.eq.str());
            ++sets;
        }
    }
    // (b) substitution and constant folding.
    int checked = 0;
    while (checked < 1000) {
        Expr e1 = oracle::random_expr(rng, {"a", "b", "c"}, 3);
        Expr e2 = oracle::random_expr(rng, {"a", "c"}, 2);
        if (!contains_var(e1, "b")) continue;
        Equation out = substitute(Equation(var("t"), e1), Equation(var("b"), e2));
        bool ok = numeric_check(out, 20, nullptr, [&](Assignment& a, std::mt19937_64&) {
            a["b"] = eval(e2, a);
            a["t"] = eval(e1, a);
        });
        Expr c = oracle::random_const_expr(rng, 3);
        ok &= numeric_check(Equation(c, fold(c, false)), 1);
        if (!ok) v.fail("unsound substitution or fold: " + out.str());
        ++checked;
    }
    // (c) univariate roots.
    int roots = 0;
    for (int i = 0; i < 100; ++i) {
        auto [e, dom] = oracle::random_univariate(rng);
        std::vector<Equation> got;
        try {
            got = solve_univariate(e, "x", dom);
        } catch (const AlgebraError&) {
        }
        auto want = oracle::grid_roots(e, "x", dom);
        if (got.size() != want.size()) {
            v.fail("root count differs for " + e.str());
            continue;
        }
        for (size_t k = 0; k < got.size(); ++k)
            if (std::fabs(got[k].rhs->num.value() - want[k]) >= kRootTol) v.fail("root differs for " + e.str());
        roots += static_cast<int>(got.size());
    }
    if (v.ok)
        v.detail = std::to_string(sets) + " premise sets, " + std::to_string(checked) + " rewrites, " +
                   std::to_string(roots) + " roots";
    return v;
}

Verdict ablation(const std::vector<ProblemRecord>& corpus) {
    Verdict v;
    SolverConfig no_dr, no_ar;
    no_dr.enable_dr = false;
    no_ar.enable_ar = false;
    auto c1 = problem_file("corpus/c1/problem.txt");
    if (!std::holds_alternative<Unsolvable>(solve(c1, no_dr))) v.fail("c1 solved without DR");
    if (!std::holds_alternative<Unsolvable>(solve(c1, no_ar))) v.fail("c1 solved without AR");
    size_t fail_dr = 0, fail_ar = 0, solved = 0;
    for (const auto& rec : corpus) {
        auto f = parse_problem(rec.formalization);
        fail_dr += std::holds_alternative<Unsolvable>(solve(f, no_dr));
        fail_ar += std::holds_alternative<Unsolvable>(solve(f, no_ar));
        auto t0 = Clock::now();
        auto r = solve(f);
        solved += std::holds_alternative<Solution>(r) && since(t0) < kProblemSeconds;
    }
    size_t n = corpus.size();
    if (fail_dr < kAblationShare * n) v.fail("only " + std::to_string(fail_dr) + " unsolved without DR");
    if (fail_ar < kAblationShare * n) v.fail("only " + std::to_string(fail_ar) + " unsolved without AR");
    if (solved != n || n != 15) v.fail(std::to_string(solved) + "/" + std::to_string(n) + " solved with both");
    if (v.ok)
        v.detail = "unsolved without DR " + std::to_string(fail_dr) + "/" + std::to_string(n) + ", without AR " +
                   std::to_string(fail_ar) + "/" + std::to_string(n) + ", full " + std::to_string(solved) + "/" +
                   std::to_string(n);
    return v;
}

Verdict compression(const std::vector<ProblemRecord>& corpus) {
    Verdict v;
    double sum = 0;
    size_t used = 0, total = 0;
    for (const auto& rec : corpus) {
        auto r = solve(parse_problem(rec.formalization));
        const auto* s = std::get_if<Solution>(&r);
        if (!s) {
            v.fail(rec.id + " unsolved");
            continue;
        }
        if (!(s->stats.edges_in_minimal < s->stats.edges)) v.fail(rec.id + " has no compression");
        used += s->stats.edges_in_minimal;
        total += s->stats.edges;
        sum += static_cast<double>(s->stats.edges_in_minimal) / static_cast<double>(s->stats.edges);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "kept %zu of %zu edges, mean ratio %.3f", used, total,
                  corpus.empty() ? 0.0 : sum / static_cast<double>(corpus.size()));
    if (v.ok) v.detail = buf;
    return v;
}

Verdict scoring(const std::vector<ProblemRecord>& corpus) {
    Verdict v;
    auto L = [](std::initializer_list<const char*> xs) {
        std::vector<Literal> out;
        for (const char* x : xs) out.push_back(parse_literal(x));
        return out;
    };
    auto a = L({"Circle(O)", "Triangle(A,B,C)"});
    if (jaccard(a, a) != Rat(1)) v.fail("jaccard identical");
    if (jaccard(a, L({"Equals(x,1)"})) != Rat(0)) v.fail("jaccard disjoint");
    if (jaccard(L({"Circle(O)", "Equals(x,1)"}), L({"Equals(x,1)", "Equals(y,2)"})) != Rat(1, 3)) v.fail("jaccard 1/3");
    if (jaccard({}, {}) != Rat(1)) v.fail("jaccard empty");
    std::array<double, 4> opts{1, 3, 5, 7};
    if (score_choice(2.99, opts, 0) != 1) v.fail("nearest choice");
    if (score_choice(std::nullopt, opts, 5) != score_choice(std::nullopt, opts, 5)) v.fail("seeded fallback");
    if (score_choice(4.0, opts, 0) != 1) v.fail("tie-break");
    if (!score_completion(3.0001, 3) || score_completion(std::nullopt, 3) || score_completion(2.9, 3))
        v.fail("completion examples");
    for (auto mode : {ScoreMode::Choice, ScoreMode::Completion}) {
        ScoreConfig cfg;
        cfg.mode = mode;
        auto r = score_corpus(corpus, cfg);
        if (r.accuracy != 1.0 || r.arr != 1.0) v.fail("corpus accuracy " + std::to_string(r.accuracy));
    }
    if (v.ok) v.detail = "accuracy 1.0, ARR 1.0 in both modes";
    return v;
}

Verdict refinement() {
    Verdict v;
    auto bad = load_corpus(kData / "inconsistent");
    if (bad.empty()) v.fail("no inconsistent fixtures");
    size_t worst = 0;
    for (const auto& rec : bad) {
        auto o = refine_loop(rec.text.value_or(""), rec.formalization, RefinerConfig{{STUB_REFINER}, 5, 0});
        if (o.status != RefineStatus::Consistent || o.invocations > 2) v.fail(rec.id + " did not converge in 2 rounds");
        worst = std::max(worst, o.invocations);
        const size_t max_ref = 4;
        auto e = refine_loop("", rec.formalization, RefinerConfig{{ECHO_REFINER}, max_ref, 0});
        if (e.status != RefineStatus::GiveUp || e.invocations != max_ref) v.fail(rec.id + " echo did not give up at 4");
    }
    if (v.ok)
        v.detail = std::to_string(bad.size()) + " fixtures, at most " + std::to_string(worst) +
                   " stub rounds, echo gives up at 4";
    return v;
}

}  // namespace

int main() {
    auto corpus = load_corpus(kData / "corpus");
    report(1, "grammar round-trip", grammar);
    report(2, "validation behaviors", validation);
    report(3, "worked-example trace parity", trace);
    report(4, "contradiction detection", contradiction);
    report(5, "minimality oracle", minimality);
    report(6, "algebra oracles", algebra_oracles);
    report(7, "strategy-necessity ablation", [&] { return ablation(corpus); });
    report(8, "step compression", [&] { return compression(corpus); });
    report(9, "scoring", [&] { return scoring(corpus); });
    report(10, "refinement loop", refinement);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
