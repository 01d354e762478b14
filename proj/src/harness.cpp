#include "geodeduce/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <random>
#include <spawn.h>
#include <sstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

extern char** environ;

namespace gd {

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw HarnessError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// FNV-1a, stable across platforms.
uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

ProblemRecord load_problem(const std::filesystem::path& dir) {
    ProblemRecord r;
    r.id = dir.filename().string();
    r.formalization_path = dir / "problem.txt";
    r.formalization = slurp(r.formalization_path);
    if (std::filesystem::exists(dir / "text.txt")) r.text = slurp(dir / "text.txt");
    if (std::filesystem::exists(dir / "meta.json")) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(slurp(dir / "meta.json"));
        } catch (const nlohmann::json::exception& e) {
            throw HarnessError(r.id + "/meta.json: " + e.what());
        }
        if (j.contains("choices")) {
            const auto& c = j["choices"];
            if (!c.is_array() || c.size() != 4) throw HarnessError(r.id + "/meta.json: choices must have 4 entries");
            std::array<double, 4> opts{};
            for (size_t i = 0; i < 4; ++i) opts[i] = c[i].get<double>();
            r.choices = opts;
        }
        if (j.contains("truth")) r.truth = j["truth"].get<double>();
        if (j.contains("gold")) {
            std::vector<Literal> gold;
            for (const auto& s : j["gold"]) gold.push_back(parse_literal(s.get<std::string>()));
            r.gold = gold;
        }
    }
    return r;
}

std::vector<ProblemRecord> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw HarnessError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> dirs;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory() && std::filesystem::exists(e.path() / "problem.txt")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<ProblemRecord> out;
    for (const auto& d : dirs) out.push_back(load_problem(d));
    return out;
}

Rat jaccard(const std::vector<Literal>& p, const std::vector<Literal>& y) {
    std::set<std::string> a, b;
    for (const auto& l : p) a.insert(canonicalize(l).str());
    for (const auto& l : y) b.insert(canonicalize(l).str());
    if (a.empty() && b.empty()) return Rat(1);
    size_t inter = 0;
    for (const auto& s : a) inter += b.count(s);
    return Rat(static_cast<long long>(inter), static_cast<long long>(a.size() + b.size() - inter));
}

size_t score_choice(std::optional<double> answer, const std::array<double, 4>& options, uint64_t seed) {
    if (!answer || !std::isfinite(*answer)) {
        std::mt19937_64 rng(seed);
        return static_cast<size_t>(rng() % 4);
    }
    size_t best = 0;
    for (size_t i = 1; i < 4; ++i)
        if (std::fabs(options[i] - *answer) < std::fabs(options[best] - *answer)) best = i;
    return best;
}

bool score_completion(std::optional<double> answer, double truth) {
    if (!answer) return false;
    return std::fabs(*answer - truth) <= std::max(1e-3 * std::fabs(truth), 5e-4);
}

uint64_t env_seed() {
    const char* s = std::getenv("GEODEDUCE_SEED");
    if (!s || !*s) return 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    return *end ? 0 : v;
}

// ---------------------------------------------------------------- refinement

std::string run_refiner(const RefinerConfig& cfg, const std::string& input, int* exit_code) {
    if (cfg.command.empty()) throw RefinerUnavailable("no refiner configured");
    char tmpl[] = "/tmp/geodeduce-refine-XXXXXX";
    int in_fd = mkstemp(tmpl);
    if (in_fd < 0) throw RefinerUnavailable(std::string("cannot create refiner input: ") + std::strerror(errno));
    unlink(tmpl);
    if (write(in_fd, input.data(), input.size()) != static_cast<ssize_t>(input.size()) || lseek(in_fd, 0, SEEK_SET) != 0) {
        ::close(in_fd);
        throw RefinerUnavailable("cannot write refiner input");
    }
    int out[2];
    if (pipe(out) != 0) {
        ::close(in_fd);
        throw RefinerUnavailable("cannot create pipe");
    }

    std::vector<std::string> env_store;
    for (char** e = environ; *e; ++e)
        if (std::strncmp(*e, "GEODEDUCE_ATTEMPT=", 18) != 0) env_store.emplace_back(*e);
    env_store.push_back("GEODEDUCE_ATTEMPT=" + std::to_string(cfg.attempt));
    std::vector<char*> envp, argv;
    for (auto& s : env_store) envp.push_back(s.data());
    envp.push_back(nullptr);
    std::vector<std::string> args = cfg.command;
    for (auto& s : args) argv.push_back(s.data());
    argv.push_back(nullptr);

    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in_fd, 0);
    posix_spawn_file_actions_adddup2(&fa, out[1], 1);
    posix_spawn_file_actions_addclose(&fa, out[0]);
    pid_t pid;
    int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), envp.data());
    posix_spawn_file_actions_destroy(&fa);
    ::close(in_fd);
    ::close(out[1]);
    if (rc != 0) {
        ::close(out[0]);
        throw RefinerUnavailable("cannot start " + cfg.command[0] + ": " + std::strerror(rc));
    }
    std::string result;
    char buf[4096];
    for (ssize_t n; (n = read(out[0], buf, sizeof buf)) != 0;) {
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        result.append(buf, static_cast<size_t>(n));
    }
    ::close(out[0]);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    if (code == 127) throw RefinerUnavailable("cannot run " + cfg.command[0]);
    if (exit_code) *exit_code = code;
    return result;
}

std::string refiner_request(const std::string& problem_text, const std::string& draft, const std::string& feedback) {
    auto section = [](const std::string& head, const std::string& body) {
        std::string s = "### " + head + "\n" + body;
        if (!body.empty() && body.back() != '\n') s += "\n";
        return s;
    };
    return section("PROBLEM", problem_text) + section("FORMALIZATION", draft) + section("FEEDBACK", feedback);
}

std::optional<std::string> refiner_reply_body(const std::string& reply) {
    std::stringstream ss(reply);
    std::string line, body;
    bool in = false, seen = false;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("### ", 0) == 0) {
            in = line == "### FORMALIZATION";
            seen |= in;
            continue;
        }
        if (in) body += line + "\n";
    }
    if (!seen) return std::nullopt;
    return body;
}

namespace {

struct Checked {
    std::optional<Formalization> f;
    ValidationReport report;
    std::string feedback;
};

Checked check_draft(const std::string& draft) {
    Checked c;
    try {
        c.f = parse_problem(draft);
    } catch (const ParseError& e) {
        c.report.consistent = false;
        c.feedback = std::string("ERROR: parse error: ") + e.what() + "\n";
        return c;
    }
    c.report = validate(*c.f);
    c.feedback = format_feedback(c.report);
    return c;
}

}  // namespace

RefineOutcome refine_loop(const std::string& problem_text, const std::string& draft, const RefinerConfig& cfg) {
    RefineOutcome out;
    out.formalization = draft;
    Checked cur = check_draft(draft);
    out.report = cur.report;
    out.feedback = cur.feedback;
    if (cur.f && cur.report.consistent) {
        out.result = cur.f;
        return out;
    }
    if (cfg.command.empty()) {
        out.status = RefineStatus::Inconsistent;
        return out;
    }
    for (size_t round = 0; round < cfg.max_refinements; ++round) {
        int code = 0;
        std::string reply = run_refiner(cfg, refiner_request(problem_text, out.formalization, cur.feedback), &code);
        ++out.invocations;
        auto body = refiner_reply_body(reply);
        if (code != 0 || !body) {
            ++out.malformed;
            continue;
        }
        Checked next = check_draft(*body);
        if (!next.f) {
            ++out.malformed;
            continue;
        }
        out.formalization = *body;
        cur = next;
        out.report = cur.report;
        out.feedback = cur.feedback;
        if (cur.report.consistent) {
            out.result = cur.f;
            return out;
        }
    }
    out.status = RefineStatus::GiveUp;
    return out;
}

// ---------------------------------------------------------------- scoring

namespace {

ProblemScore score_one(const ProblemRecord& rec, const ScoreConfig& cfg) {
    ProblemScore ps;
    ps.id = rec.id;
    size_t attempts = std::max<size_t>(1, cfg.attempts);
    for (size_t a = 0; a < attempts; ++a) {
        Formalization f;
        if (!cfg.refiner.command.empty()) {
            RefinerConfig rc = cfg.refiner;
            rc.attempt = a;
            RefineOutcome o;
            try {
                o = refine_loop(rec.text.value_or(""), rec.formalization, rc);
            } catch (const RefinerUnavailable&) {
                ps.status = "error";
                break;
            }
            ps.refinements += o.invocations;
            if (!o.result) {
                ps.status = "inconsistent";
                continue;
            }
            f = *o.result;
        } else {
            try {
                f = parse_problem(rec.formalization);
            } catch (const ParseError&) {
                ps.status = "error";
                break;
            }
        }
        SolveResult r = solve(f, cfg.solver);
        std::optional<double> answer;
        if (const auto* s = std::get_if<Solution>(&r)) {
            ps.status = "solved";
            answer = static_cast<double>(s->value.value());
            ps.edges = s->stats.edges;
            ps.edges_in_minimal = s->stats.edges_in_minimal;
        } else if (std::holds_alternative<Unsolvable>(r)) {
            ps.status = "unsolvable";
        } else {
            ps.status = "inconsistent";
        }
        bool correct = false;
        std::optional<size_t> chosen;
        if (cfg.mode == ScoreMode::Choice && rec.choices) {
            chosen = score_choice(answer, *rec.choices, cfg.seed ^ fnv1a(rec.id) ^ a);
            correct = rec.truth && *chosen == score_choice(rec.truth, *rec.choices, 0);
        } else if (cfg.mode == ScoreMode::Completion && rec.truth) {
            correct = score_completion(answer, *rec.truth);
        }
        ps.answer = answer;
        ps.chosen = chosen;
        ps.correct = correct;
        // Without a refiner every attempt sees the same input.
        if (correct || cfg.refiner.command.empty()) break;
    }
    return ps;
}

}  // namespace

ScoreReport score_corpus(const std::vector<ProblemRecord>& corpus, const ScoreConfig& cfg) {
    ScoreReport rep;
    rep.total = corpus.size();
    rep.problems.resize(corpus.size());
    size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<size_t>(1, corpus.size()));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i; (i = next++) < corpus.size();) rep.problems[i] = score_one(corpus[i], cfg);
        });
    for (auto& t : pool) t.join();
    for (const auto& p : rep.problems) {
        rep.valid += p.answer.has_value();
        rep.correct += p.correct;
    }
    rep.accuracy = rep.total ? static_cast<double>(rep.correct) / static_cast<double>(rep.total) : 0;
    rep.arr = rep.valid ? static_cast<double>(rep.correct) / static_cast<double>(rep.valid) : 0;
    return rep;
}

std::string score_json(const ScoreReport& r) {
    nlohmann::ordered_json j;
    j["total"] = r.total;
    j["valid"] = r.valid;
    j["correct"] = r.correct;
    j["accuracy"] = r.accuracy;
    j["arr"] = r.arr;
    auto& ps = j["problems"] = nlohmann::ordered_json::array();
    for (const auto& p : r.problems) {
        nlohmann::ordered_json o;
        o["id"] = p.id;
        o["status"] = p.status;
        o["answer"] = p.answer ? nlohmann::ordered_json(*p.answer) : nlohmann::ordered_json(nullptr);
        if (p.chosen) o["chosen"] = *p.chosen;
        o["correct"] = p.correct;
        o["edges"] = p.edges;
        o["edges_in_minimal"] = p.edges_in_minimal;
        o["refinements"] = p.refinements;
        ps.push_back(o);
    }
    return j.dump(2) + "\n";
}

std::string score_text(const ScoreReport& r) {
    std::ostringstream os;
    char buf[256];
    for (const auto& p : r.problems) {
        std::string ans = p.answer ? std::to_string(*p.answer) : "-";
        std::snprintf(buf, sizeof buf, "%-24s %-12s %-14s %s\n", p.id.c_str(), p.status.c_str(), ans.c_str(),
                      p.correct ? "correct" : "wrong");
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "accuracy %.4f (%zu/%zu)  ARR %.4f (%zu/%zu)\n", r.accuracy, r.correct, r.total, r.arr,
                  r.correct, r.valid);
    os << buf;
    return os.str();
}

}  // namespace gd
