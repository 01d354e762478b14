#include "geodeduce/cli.hpp"

#include "geodeduce/harness.hpp"
#include "geodeduce/text_parser.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gd {

namespace {

constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw HarnessError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_command(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deductive geometry solver over formal-language problem files.", "geodeduce"};
    app.require_subcommand(1);

    std::string file;
    bool json = false, dump_graph = false, ascii = false, no_dr = false, no_ar = false;
    double timeout = SolverConfig{}.timeout;
    size_t max_iter = SolverConfig{}.max_iterations;
    std::string refiner;
    size_t max_ref = RefinerConfig{}.max_refinements;

    auto* solve_cmd = app.add_subcommand("solve", "Solve a formalization file");
    solve_cmd->add_option("file", file, "Formalization file")->required();
    solve_cmd->add_flag("--json", json, "Print the result as JSON");
    solve_cmd->add_flag("--dump-graph", dump_graph, "Also print the proof hypergraph as JSON");
    solve_cmd->add_option("--timeout", timeout, "Wall-clock budget in seconds")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--max-iter", max_iter, "Maximum DR/AR rounds")->check(CLI::PositiveNumber);
    solve_cmd->add_flag("--ascii", ascii, "ASCII-only rendering");
    solve_cmd->add_flag("--no-dr", no_dr, "Disable deductive reasoning");
    solve_cmd->add_flag("--no-ar", no_ar, "Disable algebraic reasoning");
    solve_cmd->add_option("--refiner", refiner, "Refiner command used when the input is inconsistent");
    solve_cmd->add_option("--max-refinements", max_ref, "Refiner rounds");

    auto* validate_cmd = app.add_subcommand("validate", "Check a formalization and print feedback");
    validate_cmd->add_option("file", file, "Formalization file")->required();

    auto* parse_cmd = app.add_subcommand("parse-text", "Translate problem text into literals");
    parse_cmd->add_option("file", file, "Problem text file")->required();
    std::string rules_path;
    parse_cmd->add_option("--rules", rules_path, "Rule table (default: shipped table)");

    std::string corpus, mode = "completion";
    size_t attempts = 1, threads = 0;
    uint64_t seed = env_seed();
    auto* score_cmd = app.add_subcommand("score", "Score a corpus directory");
    score_cmd->add_option("corpus", corpus, "Directory of problem directories")->required();
    score_cmd->add_option("--mode", mode, "choice or completion")->check(CLI::IsMember({"choice", "completion"}));
    score_cmd->add_option("--attempts", attempts, "Refiner attempts per problem (pass@k)")->check(CLI::PositiveNumber);
    score_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
    score_cmd->add_option("--seed", seed, "Seed for the random-choice fallback (default GEODEDUCE_SEED or 0)");
    score_cmd->add_option("--timeout", timeout, "Per-problem budget in seconds")->check(CLI::NonNegativeNumber);
    score_cmd->add_option("--max-iter", max_iter, "Maximum DR/AR rounds")->check(CLI::PositiveNumber);
    score_cmd->add_option("--refiner", refiner, "Refiner command for inconsistent formalizations");
    score_cmd->add_option("--max-refinements", max_ref, "Refiner rounds");
    score_cmd->add_flag("--json", json, "Print the report as JSON");

    app.add_subcommand("list-theorems", "List the theorem catalog");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        const CLI::App* shown = &app;
        for (const auto* sub : app.get_subcommands()) shown = sub;
        err << "error: " << e.what() << "\n\n" << shown->help();
        return kUsage;
    }

    SolverConfig scfg;
    scfg.timeout = timeout;
    scfg.max_iterations = max_iter;
    scfg.enable_dr = !no_dr;
    scfg.enable_ar = !no_ar;
    PrintStyle style;
    style.unicode = !ascii;

    try {
        if (*solve_cmd) {
            std::string text = read_file(file);
            Formalization f;
            RefinerConfig rc{split_command(refiner), max_ref, 0};
            auto outcome = refine_loop("", text, rc);
            if (!outcome.result) {
                if (!json)
                    out << outcome.feedback;
                else if (!outcome.report.contradictions.empty())
                    out << result_json(Inconsistent{outcome.report}, style);
                else
                    out << nlohmann::ordered_json{{"status", "error"}, {"feedback", outcome.feedback}}.dump(2) << "\n";
                if (outcome.status == RefineStatus::GiveUp)
                    err << "gave up after " << outcome.invocations << " refinement rounds\n";
                return 1;
            }
            f = *outcome.result;
            scfg.keep_graph = dump_graph;
            SolveResult r = solve(f, scfg);
            const auto* sol = std::get_if<Solution>(&r);
            if (json) {
                auto j = nlohmann::ordered_json::parse(result_json(r, style));
                if (dump_graph && sol) j["graph"] = nlohmann::ordered_json::parse(sol->graph_json);
                out << j.dump(2) << "\n";
            } else if (sol) {
                out << render_solution(*sol, style);
                if (dump_graph) out << sol->graph_json << "\n";
            } else if (const auto* u = std::get_if<Unsolvable>(&r)) {
                out << "Unsolvable (" << reason_name(u->reason) << ")";
                if (!u->detail.empty()) out << ": " << u->detail;
                out << "\n";
            } else {
                out << format_feedback(std::get<Inconsistent>(r).report);
            }
            return sol ? 0 : 1;
        }
        if (*validate_cmd) {
            std::string text = read_file(file);
            Formalization f;
            try {
                f = parse_problem(text);
            } catch (const ParseError& e) {
                out << "ERROR: parse error: " << e.what() << "\n";
                return 1;
            }
            auto rep = validate(f);
            out << format_feedback(rep);
            return rep.consistent ? 0 : 1;
        }
        if (*parse_cmd) {
            std::string text = read_file(file);
            auto rules = rules_path.empty() ? default_rules() : load_rule_table(rules_path);
            auto p = parse_text(text, rules);
            for (const auto& l : p.literals) out << print_literal(l) << "\n";
            for (const auto& u : p.unmatched) err << "unmatched: " << u << "\n";
            return 0;
        }
        if (*score_cmd) {
            ScoreConfig cfg;
            cfg.mode = mode == "choice" ? ScoreMode::Choice : ScoreMode::Completion;
            cfg.solver = scfg;
            cfg.refiner = RefinerConfig{split_command(refiner), max_ref, 0};
            cfg.attempts = attempts;
            cfg.threads = threads;
            cfg.seed = seed;
            auto rep = score_corpus(load_corpus(corpus), cfg);
            out << (json ? score_json(rep) : score_text(rep));
            return 0;
        }
        for (const auto& t : theorem_catalog()) out << t.name << ": " << t.statement << "\n";
        return 0;
    } catch (const HarnessError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const RuleTableError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const RefinerUnavailable& e) {
        err << "error: refiner unavailable: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gd
