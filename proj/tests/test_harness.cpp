#include "doctest.h"

#include "geodeduce/cli.hpp"
#include "geodeduce/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace gd;
namespace fs = std::filesystem;

namespace {

const fs::path kData = GEODEDUCE_DATA_DIR;

std::vector<Literal> lits(std::initializer_list<const char*> xs) {
    std::vector<Literal> out;
    for (const char* x : xs) out.push_back(parse_literal(x));
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string t = (fs::temp_directory_path() / "geodeduce-test-XXXXXX").string();
        path = mkdtemp(t.data());
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << s;
}

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

}  // namespace

TEST_CASE("jaccard") {
    auto a = lits({"Triangle(A,B,C)", "Equals(x,1)"});
    CHECK(jaccard(a, a) == Rat(1));
    CHECK(jaccard({}, {}) == Rat(1));
    CHECK(jaccard(a, lits({"Circle(O)"})) == Rat(0));
    CHECK(jaccard(lits({"Circle(O)", "Equals(x,1)"}), lits({"Equals(x,1)", "Equals(y,2)"})) == Rat(1, 3));
    // Canonical forms: orientation of figures and order of literals do not matter.
    CHECK(jaccard(lits({"Line(A,B)", "Circle(O)"}), lits({"Circle(O)", "Line(B,A)"})) == Rat(1));
    CHECK(jaccard(lits({"Circle(O)"}), {}) == Rat(0));
}

TEST_CASE("jaccard is symmetric and order-free on random sets") {
    std::vector<Literal> pool = lits({"Circle(O)", "Triangle(A,B,C)", "Equals(x,1)", "Equals(y,2)", "Line(A,B)",
                                      "Parallel(Line(A,B),Line(C,D))", "PointLiesOnLine(E,Line(A,B))", "Circle(P)"});
    std::mt19937 rng(11);
    for (int t = 0; t < 200; ++t) {
        std::vector<Literal> p, y;
        for (const auto& l : pool) {
            if (rng() % 2) p.push_back(l);
            if (rng() % 2) y.push_back(l);
        }
        Rat j = jaccard(p, y);
        CHECK(j == jaccard(y, p));
        std::shuffle(p.begin(), p.end(), rng);
        CHECK(j == jaccard(p, y));
        CHECK(j >= 0);
        CHECK(j <= 1);
    }
}

TEST_CASE("score_choice") {
    std::array<double, 4> opts{1, 3, 5, 7};
    CHECK(score_choice(2.99, opts, 0) == 1);
    CHECK(score_choice(4.0, opts, 0) == 1);  // equidistant from 3 and 5
    CHECK(score_choice(100.0, opts, 0) == 3);
    CHECK(score_choice(std::nullopt, opts, 42) == score_choice(std::nullopt, opts, 42));
    std::set<size_t> seen;
    for (uint64_t s = 0; s < 64; ++s) seen.insert(score_choice(std::nullopt, opts, s));
    CHECK(seen.size() == 4);
}

TEST_CASE("score_completion") {
    CHECK(score_completion(3.0001, 3));
    CHECK_FALSE(score_completion(std::nullopt, 3));
    CHECK_FALSE(score_completion(2.9, 3));
    CHECK(score_completion(0.0004, 0));
    CHECK_FALSE(score_completion(0.0006, 0));
    CHECK(score_completion(1000.9, 1000));
    CHECK_FALSE(score_completion(1001.1, 1000));
}

TEST_CASE("seed from the environment") {
    setenv("GEODEDUCE_SEED", "1234", 1);
    CHECK(env_seed() == 1234);
    setenv("GEODEDUCE_SEED", "junk", 1);
    CHECK(env_seed() == 0);
    unsetenv("GEODEDUCE_SEED");
    CHECK(env_seed() == 0);
}

TEST_CASE("corpus loading") {
    auto corpus = load_corpus(kData / "corpus");
    CHECK(corpus.size() == 15);
    for (const auto& r : corpus) {
        CHECK(r.choices.has_value());
        CHECK(r.truth.has_value());
        CHECK(score_choice(r.truth, *r.choices, 0) < 4);
    }
    TempDir t;
    write(t.path / "bad" / "problem.txt", "Circle(O)\nFind(RadiusOf(Circle(O)))\n");
    write(t.path / "bad" / "meta.json", R"({"choices":[1,2,3],"truth":1})");
    CHECK_THROWS_AS(load_corpus(t.path), HarnessError);
    CHECK_THROWS_AS(load_corpus(t.path / "missing"), HarnessError);
}

TEST_CASE("refiner protocol framing") {
    auto req = refiner_request("text", "Circle(O)", "ERROR: x\n");
    CHECK(req == "### PROBLEM\ntext\n### FORMALIZATION\nCircle(O)\n### FEEDBACK\nERROR: x\n");
    CHECK(refiner_reply_body("### FORMALIZATION\nA\nB\n### NOTES\nz\n") == std::optional<std::string>("A\nB\n"));
    CHECK_FALSE(refiner_reply_body("Circle(O)\n").has_value());
}

TEST_CASE("refinement loop") {
    auto bad = load_problem(kData / "inconsistent" / "triangle_collinear");
    RefinerConfig stub{{STUB_REFINER}, 5, 0};
    auto o = refine_loop(bad.text.value_or(""), bad.formalization, stub);
    CHECK(o.status == RefineStatus::Consistent);
    CHECK(o.invocations == 1);
    REQUIRE(o.result.has_value());
    CHECK(std::none_of(o.result->facts.begin(), o.result->facts.end(), [](const Literal& l) { return l.pred == "Collinear"; }));

    for (size_t max : {1, 3, 5}) {
        RefinerConfig echo{{ECHO_REFINER}, max, 0};
        auto g = refine_loop("", bad.formalization, echo);
        CHECK(g.status == RefineStatus::GiveUp);
        CHECK(g.invocations == max);
        CHECK(g.malformed == 0);
        CHECK_FALSE(g.result.has_value());
    }

    auto none = refine_loop("", bad.formalization, RefinerConfig{});
    CHECK(none.status == RefineStatus::Inconsistent);
    CHECK(none.invocations == 0);
    CHECK(none.feedback.rfind("ERROR: Triangle(A,B,C) conflicts with Collinear(A,B,C)", 0) == 0);

    auto good = load_problem(kData / "corpus" / "c1");
    auto ok = refine_loop("", good.formalization, stub);
    CHECK(ok.status == RefineStatus::Consistent);
    CHECK(ok.invocations == 0);

    // A refiner with empty output: every round is malformed.
    RefinerConfig silent{{"true"}, 4, 0};
    auto m = refine_loop("", bad.formalization, silent);
    CHECK(m.status == RefineStatus::GiveUp);
    CHECK(m.invocations == 4);
    CHECK(m.malformed == 4);

    RefinerConfig missing{{"/nonexistent/refiner"}, 4, 0};
    CHECK_THROWS_AS(refine_loop("", bad.formalization, missing), RefinerUnavailable);
}

TEST_CASE("unparseable drafts are fed back as parse errors") {
    auto o = refine_loop("", "Circle(O\nFind(x)\n", RefinerConfig{});
    CHECK(o.status == RefineStatus::Inconsistent);
    CHECK(o.feedback.rfind("ERROR: parse error", 0) == 0);
}

TEST_CASE("scoring the desk corpus") {
    auto corpus = load_corpus(kData / "corpus");
    ScoreConfig cfg;
    for (auto mode : {ScoreMode::Completion, ScoreMode::Choice}) {
        cfg.mode = mode;
        auto r = score_corpus(corpus, cfg);
        CHECK(r.total == 15);
        CHECK(r.accuracy == 1.0);
        CHECK(r.arr == 1.0);
        for (const auto& p : r.problems) CHECK(p.edges_in_minimal < p.edges);
    }
    cfg.threads = 1;
    auto one = score_json(score_corpus(corpus, cfg));
    cfg.threads = 8;
    CHECK(score_json(score_corpus(corpus, cfg)) == one);
}

TEST_CASE("ARR divides by answered problems only") {
    TempDir t;
    fs::copy(kData / "corpus" / "c1", t.path / "a_right");
    fs::copy(kData / "corpus" / "pythagorean", t.path / "b_wrong");
    write(t.path / "b_wrong" / "meta.json", R"({"choices":[8,9,10,11],"truth":9})");
    fs::copy(kData / "fixtures" / "right_19_27_41", t.path / "c_none");
    write(t.path / "c_none" / "meta.json", R"({"choices":[30,40,50,60],"truth":50})");
    ScoreConfig cfg;
    auto r = score_corpus(load_corpus(t.path), cfg);
    CHECK(r.total == 3);
    CHECK(r.valid == 2);
    CHECK(r.correct == 1);
    CHECK(r.accuracy == doctest::Approx(1.0 / 3));
    CHECK(r.arr == doctest::Approx(0.5));
    CHECK(r.problems[2].status == "unsolvable");

    // Choice mode falls back to a seeded pick for the unanswered problem.
    cfg.mode = ScoreMode::Choice;
    cfg.seed = 99;
    auto c1 = score_corpus(load_corpus(t.path), cfg);
    auto c2 = score_corpus(load_corpus(t.path), cfg);
    REQUIRE(c1.problems[2].chosen.has_value());
    CHECK(c1.problems[2].chosen == c2.problems[2].chosen);
}

TEST_CASE("scoring drives the refiner on inconsistent problems") {
    auto corpus = load_corpus(kData / "inconsistent");
    ScoreConfig cfg;
    auto raw = score_corpus(corpus, cfg);
    CHECK(raw.correct == 0);
    cfg.refiner = RefinerConfig{{STUB_REFINER}, 5, 0};
    auto fixed = score_corpus(corpus, cfg);
    CHECK(fixed.accuracy == 1.0);
    for (const auto& p : fixed.problems) CHECK(p.refinements <= 2);
    cfg.refiner = RefinerConfig{{ECHO_REFINER}, 2, 0};
    cfg.attempts = 3;
    auto echo = score_corpus(corpus, cfg);
    CHECK(echo.correct == 0);
    for (const auto& p : echo.problems) CHECK(p.refinements == 6);
}

TEST_CASE("command line") {
    auto c1 = (kData / "corpus" / "c1" / "problem.txt").string();
    auto s = cli({"solve", c1});
    CHECK(s.code == 0);
    CHECK(s.out.find("Answer: PQ = 3\n") != std::string::npos);

    auto j = cli({"solve", c1, "--json", "--dump-graph"});
    CHECK(j.code == 0);
    auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["status"] == "solved");
    CHECK(doc.contains("graph"));

    auto right_tri = (kData / "fixtures" / "right_19_27_41" / "problem.txt").string();
    CHECK(cli({"solve", right_tri}).code == 1);
    CHECK(cli({"solve", c1, "--no-ar"}).code == 1);

    auto bad = (kData / "inconsistent" / "triangle_collinear" / "problem.txt").string();
    auto v = cli({"validate", bad});
    CHECK(v.code == 1);
    CHECK(v.out.rfind("ERROR: Triangle(A,B,C) conflicts with Collinear(A,B,C)\n", 0) == 0);
    CHECK(cli({"validate", c1}).code == 0);
    CHECK(cli({"solve", bad}).code == 1);
    CHECK(cli({"solve", bad, "--refiner", STUB_REFINER}).code == 0);

    auto p = cli({"parse-text", (kData / "corpus" / "c1" / "text.txt").string()});
    CHECK(p.code == 0);
    CHECK(p.out.find("Parallel(Line(N,Q),Line(O,P))\n") != std::string::npos);

    auto sc = cli({"score", (kData / "corpus").string(), "--mode", "choice"});
    CHECK(sc.code == 0);
    CHECK(sc.out.find("accuracy 1.0000 (15/15)  ARR 1.0000 (15/15)") != std::string::npos);

    auto lt = cli({"list-theorems"});
    CHECK(lt.code == 0);
    CHECK(std::count(lt.out.begin(), lt.out.end(), '\n') == static_cast<long>(theorem_catalog().size()));
}

TEST_CASE("usage errors exit 2 with stable help") {
    auto a = cli({}), b = cli({});
    CHECK(a.code == 2);
    CHECK(a.err == b.err);
    CHECK(a.err.find("solve") != std::string::npos);
    CHECK(cli({"solve"}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    CHECK(cli({"score", ".", "--mode", "guess"}).code == 2);
    CHECK(cli({"solve", "/nonexistent/file.txt"}).code == 2);
    auto h = cli({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("list-theorems") != std::string::npos);
}
