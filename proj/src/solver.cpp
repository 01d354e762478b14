#include "geodeduce/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace gd {

namespace {

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct EqNode {
    int id;
    Equation eq;
};

std::vector<EqNode> snapshot(const ProofHypergraph& g) {
    std::vector<EqNode> out;
    for (int n = 1; n < static_cast<int>(g.node_count()); ++n) {
        if (g.key(n).rfind("eq:", 0) != 0) continue;
        try {
            out.push_back({n, equation_from_literal(g.literal(n))});
        } catch (const std::exception&) {
        }
    }
    return out;
}

std::set<std::string> vars_in(const Equation& e) {
    auto v = vars_of(e.lhs);
    auto r = vars_of(e.rhs);
    v.insert(r.begin(), r.end());
    return v;
}

bool folded_number(const Expr& e) { return e->op == Op::Num; }

// Adds a derived equation unless it is a tautology or already a node.
size_t derive(ProofHypergraph& g, std::vector<int> premises, const std::string& theorem, const Equation& eq) {
    if (is_tautology(eq) || g.find("eq:" + eq.key)) return 0;
    return g.add_step(premises, theorem, std::vector<NodeSpec>{eq_spec(eq)}).added() ? 1 : 0;
}

// Best replacement source per variable: folded number, then unfolded constant, then an expression over lower-ranked variables.
struct Source {
    int rank;
    int id;
    Expr by;
};

std::map<std::string, Source> substitution_sources(const std::vector<EqNode>& eqs) {
    std::map<std::string, Source> best;
    for (const auto& n : eqs) {
        for (int flip = 0; flip < 2; ++flip) {
            const Expr& side = flip ? n.eq.rhs : n.eq.lhs;
            const Expr& other = flip ? n.eq.lhs : n.eq.rhs;
            if (!is_var(side) || contains_var(other, side->name)) continue;
            const std::string& v = side->name;
            int rank;
            if (folded_number(other)) {
                rank = 0;
            } else if (!has_vars(other)) {
                rank = 1;
            } else {
                auto ws = vars_of(other);
                bool lower = std::all_of(ws.begin(), ws.end(), [&](const std::string& w) { return var_rank(w) < var_rank(v); });
                if (!lower) continue;
                rank = 2;
            }
            auto it = best.find(v);
            if (it == best.end() || rank < it->second.rank) best[v] = {rank, n.id, other};
        }
    }
    return best;
}

size_t substitution_step(ProofHypergraph& g) {
    auto eqs = snapshot(g);
    auto src = substitution_sources(eqs);
    size_t added = 0;
    for (const auto& t : eqs) {
        std::map<std::string, Expr> by;
        std::vector<int> prem{t.id};
        for (const auto& v : vars_in(t.eq)) {
            if ((is_var(t.eq.lhs) && t.eq.lhs->name == v) || (is_var(t.eq.rhs) && t.eq.rhs->name == v)) continue;
            auto it = src.find(v);
            if (it == src.end() || it->second.id == t.id) continue;
            by[v] = it->second.by;
            prem.push_back(it->second.id);
        }
        if (by.empty()) continue;
        Equation r;
        try {
            r = substitute_many(t.eq, by);
        } catch (const AlgebraError&) {
            continue;
        }
        if (is_var(r.lhs) && !is_var(r.rhs)) r = Equation(r.rhs, r.lhs);
        added += derive(g, prem, kSubstitution, r);
    }
    return added;
}

size_t transitivity_step(ProofHypergraph& g) {
    auto eqs = snapshot(g);
    size_t added = 0;
    for (size_t i = 0; i < eqs.size(); ++i)
        for (size_t j = i + 1; j < eqs.size(); ++j) {
            const Equation &e1 = eqs[i].eq, &e2 = eqs[j].eq;
            size_t cap = std::min(vars_in(e1).size(), vars_in(e2).size());
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Expr& v1 = a ? e1.rhs : e1.lhs;
                    const Expr& v2 = b ? e2.rhs : e2.lhs;
                    if (!is_var(v1) || !is_var(v2) || v1->name != v2->name) continue;
                    const Expr& x = a ? e1.lhs : e1.rhs;
                    const Expr& y = b ? e2.lhs : e2.rhs;
                    Equation r = (is_var(x) && is_var(y)) ? atom_equation(x, y) : Equation(x, y);
                    if (vars_in(r).size() > cap) continue;
                    added += derive(g, {eqs[i].id, eqs[j].id}, kTransitivity, r);
                }
        }
    return added;
}

std::string origin_of(const ProofHypergraph& g, int n);

size_t linear_step(ProofHypergraph& g, AlgebraLog& log) {
    auto eqs = snapshot(g);
    if (eqs.empty()) return 0;
    std::vector<Equation> sys;
    LinearOptions opt;
    for (const auto& n : eqs) {
        sys.push_back(n.eq);
        if (is_var(n.eq.lhs) && folded_number(n.eq.rhs)) opt.known.insert(n.eq.lhs->name);
        if (is_var(n.eq.rhs) && folded_number(n.eq.lhs)) opt.known.insert(n.eq.rhs->name);
    }
    LinearResult res = solve_linear_system(sys, opt);
    if (res.inconsistent) {
        std::string d = "violated relation";
        for (size_t i : *res.inconsistent) {
            std::string o = origin_of(g, eqs[i].id), e = eqs[i].eq.str();
            d += " " + o + (o.find(e) == std::string::npos ? " (as " + e + ")" : "") + ";";
        }
        d.pop_back();
        log.contradiction = d + ": the equations admit no solution";
        return 0;
    }
    size_t added = 0;
    for (const auto& dv : res.derived) {
        std::vector<int> prem;
        for (size_t i : dv.premises) prem.push_back(eqs[i].id);
        added += derive(g, prem, kLinear, dv.eq);
    }
    return added;
}

size_t univariate_step(ProofHypergraph& g, AlgebraLog& log) {
    auto eqs = snapshot(g);
    std::set<std::string> solved;
    for (const auto& n : eqs) {
        if (is_var(n.eq.lhs) && !has_vars(n.eq.rhs)) solved.insert(n.eq.lhs->name);
        if (is_var(n.eq.rhs) && !has_vars(n.eq.lhs)) solved.insert(n.eq.rhs->name);
    }
    size_t added = 0;
    for (const auto& n : eqs) {
        auto vs = vars_in(n.eq);
        if (vs.size() != 1 || solved.count(*vs.begin())) continue;
        const std::string& v = *vs.begin();
        std::vector<Equation> roots;
        try {
            roots = solve_univariate(n.eq, v, infer_domain(v));
        } catch (const AlgebraError& e) {
            if (e.kind == AlgebraError::Kind::NoRealSolution || e.kind == AlgebraError::Kind::DomainEmpty) {
                log.contradiction = "violated relation " + origin_of(g, n.id) + ": " + e.what();
                return added;
            }
            continue;
        }
        solved.insert(v);
        Equation first(roots[0].rhs, roots[0].lhs);
        for (size_t i = 1; i < roots.size(); ++i)
            log.notes.push_back("alternative root of " + n.eq.str() + ": " + roots[i].str());
        added += derive(g, {n.id}, kUnivariate, first);
    }
    return added;
}

size_t constant_step(ProofHypergraph& g) {
    size_t added = 0;
    for (const auto& n : snapshot(g)) {
        Equation r;
        try {
            r = evaluate_constants(n.eq);
        } catch (const AlgebraError&) {
            continue;
        }
        added += derive(g, {n.id}, kConstEval, r);
    }
    return added;
}

bool algebraic_theorem(const std::string& t) {
    return t == kSubstitution || t == kTransitivity || t == kLinear || t == kUnivariate || t == kConstEval;
}

// Geometric or given relation behind an algebraic node, following first producers back.
std::string origin_of(const ProofHypergraph& g, int n) {
    std::set<int> seen;
    while (seen.insert(n).second) {
        const auto& ps = g.producers(n);
        if (ps.empty()) break;
        const Hyperedge& e = g.edge(ps[0]);
        if (!algebraic_theorem(e.theorem))
            return e.theorem + ": " + display_literal(g.literal(n));
        // Follow the premise carrying the most variables: the relation being instantiated.
        int next = -1;
        size_t most = 0;
        for (int p : e.premises) {
            if (g.key(p).rfind("eq:", 0) != 0) continue;
            try {
                size_t k = vars_in(equation_from_literal(g.literal(p))).size();
                if (next < 0 || k > most) next = p, most = k;
            } catch (const std::exception&) {
            }
        }
        if (next < 0) break;
        n = next;
    }
    return display_literal(g.literal(n));
}

void numeric_checks(const ProofHypergraph& g, AlgebraLog& log) {
    for (const auto& n : snapshot(g)) {
        std::string d;
        if (is_false_constant(n.eq, &d)) {
            log.contradiction = "violated relation " + origin_of(g, n.id) + " (" + d + ")";
            return;
        }
        for (int flip = 0; flip < 2; ++flip) {
            const Expr& v = flip ? n.eq.rhs : n.eq.lhs;
            const Expr& c = flip ? n.eq.lhs : n.eq.rhs;
            if (!is_var(v) || !folded_number(c)) continue;
            Domain dom = infer_domain(v->name);
            if (!in_domain(dom, c->num.value())) {
                log.contradiction = "impossible value " + n.eq.str() + " outside " + domain_name(dom) + " (from " +
                                    origin_of(g, n.id) + ")";
                return;
            }
        }
    }
}

std::string join_display(const std::vector<Literal>& ls, PrintStyle st) {
    std::string s;
    for (size_t i = 0; i < ls.size(); ++i) s += (i ? ", " : "") + display_literal(ls[i], st);
    return s;
}

std::string fig_display(const Literal& f, PrintStyle st);

std::string ids_joined(const Literal& l) {
    std::string s;
    for (const auto& a : l.args) s += a.is_lit() ? a.lit->str() : a.text;
    return s;
}

std::string fig_display(const Literal& f, PrintStyle st) {
    if (f.form != Literal::Form::App) return f.pred;
    const std::string& p = f.pred;
    if (p == "Line") return ids_joined(f);
    if (p == "Angle") return (st.unicode ? "\xE2\x88\xA0" : "angle ") + ids_joined(f);
    if (p == "Triangle") return (st.unicode ? "\xE2\x96\xB3" : "triangle ") + ids_joined(f);
    if (p == "Circle" && f.arity() >= 1) return (st.unicode ? "\xE2\x8A\x99" : "circle ") + f.arg(0).text;
    if (p == "Arc") return (st.unicode ? "\xE2\x8C\x92" : "arc ") + ids_joined(f);
    if (is_polygon_pred(p)) return p + " " + ids_joined(f);
    return f.str();
}

}  // namespace

std::string reason_name(UnsolvableReason r) {
    switch (r) {
        case UnsolvableReason::Saturated: return "saturated";
        case UnsolvableReason::MaxIterations: return "max_iterations";
        case UnsolvableReason::Timeout: return "timeout";
        case UnsolvableReason::NumericContradiction: return "numeric_contradiction";
    }
    return "unknown";
}

std::string display_literal(const Literal& l, PrintStyle st) {
    if (l.form != Literal::Form::App) return l.pred;
    const std::string& p = l.pred;
    auto arg_fig = [&](size_t i) -> std::string {
        const Arg& a = l.arg(i);
        return a.is_lit() ? fig_display(*a.lit, st) : a.text;
    };
    if (p == "Equals" && l.arity() == 2) {
        try {
            return equation_from_literal(l).str(st);
        } catch (const std::exception&) {
            return l.str();
        }
    }
    if (p == "Parallel" && l.arity() == 2) return arg_fig(0) + (st.unicode ? " \xE2\x88\xA5 " : " || ") + arg_fig(1);
    if (p == "Perpendicular" && l.arity() == 2)
        return arg_fig(0) + (st.unicode ? " \xE2\x8A\xA5 " : " _|_ ") + arg_fig(1);
    if ((p == "PointLiesOnLine" || p == "PointLiesOnCircle") && l.arity() == 2) return arg_fig(0) + " on " + arg_fig(1);
    if (p == "Similar" && l.arity() == 2) return arg_fig(0) + (st.unicode ? " \xE2\x88\xBC " : " ~ ") + arg_fig(1);
    if (p == "Congruent" && l.arity() == 2) return arg_fig(0) + (st.unicode ? " \xE2\x89\x85 " : " =~ ") + arg_fig(1);
    if (p == "Line" || p == "Angle" || p == "Circle" || p == "Arc" || is_polygon_pred(p)) return fig_display(l, st);
    return l.str();
}

size_t algebraic_pass(ProofHypergraph& g, AlgebraLog& log, double deadline) {
    size_t total = 0;
    for (;;) {
        size_t added = 0;
        added += substitution_step(g);
        added += transitivity_step(g);
        added += linear_step(g, log);
        if (!log.contradiction) added += univariate_step(g, log);
        if (!log.contradiction) added += constant_step(g);
        if (!log.contradiction) numeric_checks(g, log);
        total += added;
        if (log.contradiction || added == 0) break;
        if (deadline > 0 && now_seconds() > deadline) break;
    }
    return total;
}

namespace {

// Node binding the goal to a number, deriving it by substitution when the goal is a compound expression.
std::optional<std::pair<int, Number>> find_answer(ProofHypergraph& g, const Expr& goal) {
    auto eqs = snapshot(g);
    if (is_var(goal)) {
        for (const auto& n : eqs)
            for (int flip = 0; flip < 2; ++flip) {
                const Expr& v = flip ? n.eq.rhs : n.eq.lhs;
                const Expr& c = flip ? n.eq.lhs : n.eq.rhs;
                if (!is_var(v) || v->name != goal->name || has_vars(c)) continue;
                if (auto val = const_value(c)) return std::make_pair(n.id, *val);
            }
        return std::nullopt;
    }
    if (!has_vars(goal)) return std::nullopt;
    std::map<std::string, Expr> by;
    std::vector<int> prem;
    for (const auto& v : vars_of(goal)) {
        bool found = false;
        for (const auto& n : eqs) {
            for (int flip = 0; flip < 2 && !found; ++flip) {
                const Expr& x = flip ? n.eq.rhs : n.eq.lhs;
                const Expr& c = flip ? n.eq.lhs : n.eq.rhs;
                if (is_var(x) && x->name == v && folded_number(c)) {
                    by[v] = c;
                    prem.push_back(n.id);
                    found = true;
                }
            }
            if (found) break;
        }
        if (!found) return std::nullopt;
    }
    auto val = const_value(fold(replace_vars(goal, by)));
    if (!val) return std::nullopt;
    Equation eq(goal, num(*val));
    if (auto n = g.find("eq:" + eq.key)) return std::make_pair(*n, *val);
    auto r = g.add_step(prem, kSubstitution, std::vector<NodeSpec>{eq_spec(eq)});
    if (!r.added() || r.new_nodes.empty()) return std::nullopt;
    return std::make_pair(r.new_nodes[0], *val);
}

SolveStats stats_of(const ProofHypergraph& g, size_t it, double t0) {
    SolveStats s;
    s.iterations = it;
    s.nodes = g.node_count();
    s.edges = g.edge_count();
    s.wall_seconds = now_seconds() - t0;
    return s;
}

}  // namespace

SolveResult solve(const Formalization& f, const SolverConfig& cfg) {
    double t0 = now_seconds();
    double deadline = t0 + cfg.timeout;
    auto [sketch, report] = build_sketch(f);
    if (!report.consistent) return Inconsistent{report};

    std::vector<Literal> known = f.facts;
    for (const auto& c : report.completions) known.push_back(c.lit);
    ProofHypergraph g(known);

    Expr goal;
    try {
        goal = to_expr(f.goal);
    } catch (const std::exception& e) {
        return Unsolvable{UnsolvableReason::Saturated, std::string("goal is not a numeric term: ") + e.what(),
                          stats_of(g, 0, t0)};
    }
    std::set<std::string> wanted = vars_of(goal);
    FactIndex idx(sketch, wanted);
    idx.sync(g);
    AlgebraLog log;

    size_t it = 0;
    std::optional<std::pair<int, Number>> answer = find_answer(g, goal);
    while (!answer) {
        if (it >= cfg.max_iterations)
            return Unsolvable{UnsolvableReason::MaxIterations, "no answer after " + std::to_string(it) + " iterations",
                              stats_of(g, it, t0)};
        if (now_seconds() > deadline)
            return Unsolvable{UnsolvableReason::Timeout, "timeout after " + std::to_string(it) + " iterations",
                              stats_of(g, it, t0)};
        ++it;
        size_t added = 0;
        if (cfg.enable_dr) added += deductive_pass(g, idx);
        if (cfg.enable_ar) {
            added += algebraic_pass(g, log, deadline);
            if (log.contradiction)
                return Unsolvable{UnsolvableReason::NumericContradiction, *log.contradiction, stats_of(g, it, t0)};
        }
        idx.sync(g);
        answer = find_answer(g, goal);
        if (!answer && added == 0)
            return Unsolvable{UnsolvableReason::Saturated, "no new facts after " + std::to_string(it) + " iterations",
                              stats_of(g, it, t0)};
    }

    Solution sol;
    sol.value = answer->second;
    sol.answer = canonicalize(Literal::app("Equals", {Arg::sub(f.goal), Arg::expr(answer->second.str())}));
    if (f.goal.form != Literal::Form::App)
        sol.answer = Literal::app("Equals", {f.goal.form == Literal::Form::BareId ? Arg::id(f.goal.pred) : Arg::expr(f.goal.pred),
                                             Arg::expr(answer->second.str())});
    Subgraph sub = g.find_minimal_subgraph(answer->first, cfg.beam);
    for (int e : g.topological_order(sub)) {
        const Hyperedge& E = g.edge(e);
        Step s;
        s.theorem = E.theorem;
        for (int p : E.premises) s.premises.push_back(g.literal(p));
        for (int c : sub.conclusions.at(e)) s.conclusions.push_back(g.literal(c));
        sol.steps.push_back(std::move(s));
    }
    sol.stats = stats_of(g, it, t0);
    sol.stats.edges_in_minimal = sub.edges.size();
    sol.notes = log.notes;
    if (cfg.keep_graph) sol.graph_json = g.dump_json();
    return sol;
}

std::string render_solution(const Solution& s, PrintStyle st) {
    std::string out;
    const char* arrow = st.unicode ? " \xE2\x9F\xB9 " : " => ";
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const Step& k = s.steps[i];
        out += "Step " + std::to_string(i + 1) + ": " + k.theorem + ": " + join_display(k.premises, st) + arrow +
               join_display(k.conclusions, st) + "\n";
    }
    out += "Answer: " + display_literal(s.answer, st) + "\n";
    return out;
}

std::string result_json(const SolveResult& r, PrintStyle st) {
    nlohmann::ordered_json j;
    auto stats = [](const SolveStats& s) {
        nlohmann::ordered_json o;
        o["iterations"] = s.iterations;
        o["nodes"] = s.nodes;
        o["edges"] = s.edges;
        o["edges_in_minimal"] = s.edges_in_minimal;  // wall time left out so output is reproducible
        return o;
    };
    if (const auto* s = std::get_if<Solution>(&r)) {
        j["status"] = "solved";
        j["answer"] = {{"literal", s->answer.str()}, {"value", s->value.value()}, {"text", display_literal(s->answer, st)}};
        j["steps"] = nlohmann::ordered_json::array();
        for (size_t i = 0; i < s->steps.size(); ++i) {
            const Step& k = s->steps[i];
            nlohmann::ordered_json o;
            o["index"] = i + 1;
            o["theorem"] = k.theorem;
            o["premises"] = nlohmann::ordered_json::array();
            for (const auto& p : k.premises) o["premises"].push_back(p.str());
            o["conclusions"] = nlohmann::ordered_json::array();
            for (const auto& c : k.conclusions) o["conclusions"].push_back(c.str());
            o["text"] = join_display(k.premises, st) + " => " + join_display(k.conclusions, st);
            j["steps"].push_back(o);
        }
        j["stats"] = stats(s->stats);
        if (!s->notes.empty()) j["notes"] = s->notes;
    } else if (const auto* u = std::get_if<Unsolvable>(&r)) {
        j["status"] = "unsolvable";
        j["answer"] = nullptr;
        j["steps"] = nlohmann::ordered_json::array();
        j["stats"] = stats(u->stats);
        j["reason"] = reason_name(u->reason);
        j["detail"] = u->detail;
    } else {
        const auto& in = std::get<Inconsistent>(r);
        j["status"] = "inconsistent";
        j["answer"] = nullptr;
        j["steps"] = nlohmann::ordered_json::array();
        j["stats"] = stats(SolveStats{});
        j["feedback"] = format_feedback(in.report);
    }
    return j.dump(2);
}

bool check_closure(const Solution& s, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (s.steps.empty() || s.steps[0].theorem != ProofHypergraph::kKnownFacts) return fail("step 1 is not Known Facts");
    std::set<std::string> have{"\x01start"};
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const Step& k = s.steps[i];
        for (const auto& p : k.premises) {
            std::string key = (i == 0 && p.form == Literal::Form::BareId && p.pred == "start") ? "\x01start" : node_spec(p).key;
            if (!have.count(key)) return fail("step " + std::to_string(i + 1) + " uses unestablished " + p.str());
        }
        for (const auto& c : k.conclusions) have.insert(node_spec(c).key);
    }
    const Step& last = s.steps.back();
    if (last.conclusions.empty()) return fail("last step concludes nothing");
    // The answer restates a value the last step concludes.
    try {
        Equation a = equation_from_literal(s.answer);
        for (const auto& c : last.conclusions) {
            Equation e = equation_from_literal(c);
            Expr goal = a.lhs;
            for (int flip = 0; flip < 2; ++flip) {
                const Expr& x = flip ? e.rhs : e.lhs;
                const Expr& v = flip ? e.lhs : e.rhs;
                if (x->key == goal->key && !has_vars(v)) {
                    auto cv = const_value(v);
                    if (cv && cv->approx_equal(s.value)) return true;
                }
            }
        }
    } catch (const std::exception& e) {
        return fail(std::string("answer is not an equation: ") + e.what());
    }
    return fail("answer is not concluded by the last step");
}

}  // namespace gd
