#pragma once

#include "geodeduce/solver.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gd {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One corpus directory: problem.txt, optional text.txt, optional meta.json {choices:[4], truth}.
struct ProblemRecord {
    std::string id;
    std::filesystem::path formalization_path;
    std::string formalization;  // file contents
    std::optional<std::string> text;
    std::optional<std::array<double, 4>> choices;
    std::optional<double> truth;
    std::optional<std::vector<Literal>> gold;  // meta.json "gold": literal strings
};

ProblemRecord load_problem(const std::filesystem::path& dir);
// Every subdirectory holding a problem.txt, sorted by name.
std::vector<ProblemRecord> load_corpus(const std::filesystem::path& dir);

// |P ∩ Y| / |P ∪ Y| over canonical forms; 1 when both are empty.
Rat jaccard(const std::vector<Literal>& p, const std::vector<Literal>& y);

// Nearest option, lowest index on ties; a seeded uniform pick when there is no answer.
size_t score_choice(std::optional<double> answer, const std::array<double, 4>& options, uint64_t seed);
// |answer - truth| <= max(1e-3 |truth|, 5e-4).
bool score_completion(std::optional<double> answer, double truth);
// GEODEDUCE_SEED when set to an integer, else 0.
uint64_t env_seed();

// ---------------------------------------------------------------- refinement

class RefinerUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The refiner is a command. It reads "### PROBLEM", "### FORMALIZATION" and "### FEEDBACK" sections
// on stdin and writes "### FORMALIZATION" followed by the revised literals on stdout.
struct RefinerConfig {
    std::vector<std::string> command;  // empty: no refiner
    size_t max_refinements = 5;
    size_t attempt = 0;  // exported to the refiner as GEODEDUCE_ATTEMPT
};

enum class RefineStatus { Consistent, GiveUp, Inconsistent };

struct RefineOutcome {
    RefineStatus status = RefineStatus::Consistent;
    std::optional<Formalization> result;
    std::string formalization;  // text of the last draft
    size_t invocations = 0;     // refiner runs
    size_t malformed = 0;       // runs whose output was rejected
    ValidationReport report;    // report on the last draft
    std::string feedback;       // feedback text for the last draft
};

// Raw refiner I/O; returns the process stdout. Throws RefinerUnavailable when it cannot start.
std::string run_refiner(const RefinerConfig& cfg, const std::string& input, int* exit_code = nullptr);
std::string refiner_request(const std::string& problem_text, const std::string& draft, const std::string& feedback);
// The formalization section of a refiner reply; nullopt if the header is missing.
std::optional<std::string> refiner_reply_body(const std::string& reply);

// Validate, send feedback, resubmit, at most max_refinements times. A draft that does not parse
// is treated like an inconsistent one with the parse error as feedback.
RefineOutcome refine_loop(const std::string& problem_text, const std::string& draft, const RefinerConfig& cfg);

// ---------------------------------------------------------------- scoring

enum class ScoreMode { Choice, Completion };

struct ScoreConfig {
    ScoreMode mode = ScoreMode::Completion;
    SolverConfig solver;
    RefinerConfig refiner;
    size_t attempts = 1;  // pass@k over refiner attempts
    size_t threads = 0;   // 0: hardware concurrency
    uint64_t seed = 0;
};

struct ProblemScore {
    std::string id;
    std::string status;  // solved, unsolvable, inconsistent, error
    std::optional<double> answer;
    std::optional<size_t> chosen;
    bool correct = false;
    size_t edges = 0;
    size_t edges_in_minimal = 0;
    size_t refinements = 0;
};

struct ScoreReport {
    size_t total = 0;
    size_t valid = 0;  // problems with an answer
    size_t correct = 0;
    double accuracy = 0;
    double arr = 0;  // correct / valid
    std::vector<ProblemScore> problems;
};

ScoreReport score_corpus(const std::vector<ProblemRecord>& corpus, const ScoreConfig& cfg);
std::string score_json(const ScoreReport& r);
std::string score_text(const ScoreReport& r);

}  // namespace gd
