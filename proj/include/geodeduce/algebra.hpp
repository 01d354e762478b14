#pragma once

#include "geodeduce/formal_lang.hpp"
#include "geodeduce/number.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gd {

// ---------------------------------------------------------------- expressions

enum class Op { Num, Pi, Var, Add, Mul, Pow, Func };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    Op op;
    Number num;              // Op::Num
    std::string name;        // Var name or Func name (sin, cos, tan, cot, sqrt)
    std::vector<Expr> kids;  // Add/Mul operands, Pow {base, exp}, Func {arg}
    std::string key;         // canonical structural key
};

// Constructors return normal form: sums and products flattened and sorted,
// numeric factors of a product merged, additive zeros and unit factors dropped.
// Numeric terms of a sum are left unfolded; folding is evaluate_constants' job.
Expr num(const Number& n);
Expr num(long long n);
Expr pi();
Expr var(const std::string& name);
Expr add(std::vector<Expr> xs);
Expr mul(std::vector<Expr> xs);
Expr pow(Expr base, Expr exp);
Expr func(const std::string& f, Expr arg);
Expr neg(const Expr& e);  // distributes over a sum
Expr sub(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }

bool is_num(const Expr& e);
bool is_var(const Expr& e);
std::set<std::string> vars_of(const Expr& e);
bool has_vars(const Expr& e);
bool contains_var(const Expr& e, const std::string& v);
Expr replace_var(const Expr& e, const std::string& v, const Expr& by);
Expr replace_vars(const Expr& e, const std::map<std::string, Expr>& by);

// Full constant folding: every variable-free subterm becomes one number,
// numeric terms of sums are combined. pi is kept symbolic unless keep_pi is false.
Expr fold(const Expr& e, bool keep_pi = true);
// Numeric value when e has no variables.
std::optional<Number> const_value(const Expr& e);

struct PrintStyle {
    bool unicode = true;
};
std::string print_expr(const Expr& e, PrintStyle st = {});
// Display name of a variable: "MN", "∠NMP", "x".
std::string var_display(const std::string& name, PrintStyle st = {});
// Formal-language text of an expression, parseable back through to_expr.
std::string expr_formal(const Expr& e);

class AlgebraError : public std::runtime_error {
public:
    enum class Kind { NotApplicable, NoRealSolution, DomainEmpty, Inconsistent, Parse };
    AlgebraError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// Parse expression text from the formal language ("3+3/5", "2x-1", "\frac{1}{2}", "\sqrt{3}").
Expr parse_expr(const std::string& text);

// Canonical variable name of a quantity literal (LengthOf/MeasureOf/AreaOf/...).
std::string quantity_name(const Literal& q);
bool is_quantity_pred(const std::string& p);
// Convert a formal-language term into an expression.
Expr to_expr(const Literal& l);
Expr to_expr(const Arg& a);
// Literal form of a quantity variable name, if it is one.
std::optional<Literal> quantity_literal(const std::string& name);

// ---------------------------------------------------------------- variables

enum class Domain { NonnegLength, AngleDeg, ArcDeg, AreaNonneg, Free };
std::string domain_name(Domain d);
// Domain implied by a quantity variable name; Free for user variables.
Domain infer_domain(const std::string& name);
// Sampling / search interval for a domain.
std::pair<double, double> domain_interval(Domain d);
bool in_domain(Domain d, long double v);

struct QuantityVar {
    std::string name;
    std::string origin;  // canonical quantity literal, or empty for user variables
    Domain domain = Domain::Free;
};

// Append-only symbol table; registration is guarded so concurrent workers may share one.
class SymbolTable {
public:
    const QuantityVar& intern(const std::string& name);
    void set_domain(const std::string& name, Domain d);
    Domain domain(const std::string& name) const;
    size_t size() const;
    std::vector<QuantityVar> all() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, QuantityVar> vars_;
};

// Rank used to orient substitutions: geometric quantities are eliminated in
// favour of user variables and fresh ratio variables.
int var_rank(const std::string& name);

// ---------------------------------------------------------------- equations

struct Equation {
    Expr lhs, rhs;
    std::string key;  // sign-normalized residual key

    Equation() = default;
    Equation(Expr l, Expr r);
    Expr residual() const { return sub(lhs, rhs); }
    std::string str(PrintStyle st = {}) const;
    std::string formal() const;  // Equals(...,...)
    bool operator==(const Equation& o) const { return key == o.key; }
};

Equation equation_from_literal(const Literal& equals);
Literal equation_literal(const Equation& e);

// ---------------------------------------------------------------- polynomials

using Monomial = std::vector<std::pair<std::string, int>>;
std::string monomial_str(const Monomial& m);

struct Poly {
    std::map<Monomial, Number> terms;
    bool is_zero() const { return terms.empty(); }
    bool is_const() const;
    Number const_term() const;
    int degree() const;
    std::set<std::string> atoms() const;
};

struct RatFn {
    Poly num, den;
};

// Rational-function view over atoms; non-polynomial subterms with variables become
// opaque atoms named "{<key>}". pi folds to its numeric value.
RatFn to_ratfn(const Expr& e);
// Numerator of the residual with denominators cleared.
Poly residual_poly(const Equation& eq);
bool is_tautology(const Equation& eq);
// True when the equation has no variables and is false.
bool is_false_constant(const Equation& eq, std::string* detail = nullptr);

// Numeric evaluation under an assignment (degrees for trig).
using Assignment = std::map<std::string, long double>;
long double eval(const Expr& e, const Assignment& a);

// ---------------------------------------------------------------- operations

// Replace v by e in target where source is v = e or e = v.
Equation substitute(const Equation& target, const Equation& source);
// Simultaneous replacement of several variables.
Equation substitute_many(const Equation& target, const std::map<std::string, Expr>& by);
Equation evaluate_constants(const Equation& eq);
std::vector<Equation> solve_univariate(const Equation& eq, const std::string& v, Domain d);

// Numeric root finder used beyond quadratics: sign-change bracketing on a
// 1024-cell grid over [lo, hi], then bisection to 1e-12.
std::vector<long double> bracket_roots(const std::function<long double(long double)>& f, double lo, double hi,
                                       int cells = 1024, double tol = 1e-12);

struct LinearDerivation {
    Equation eq;
    std::vector<size_t> premises;  // indices into the input system
};

struct LinearOptions {
    // Variables whose binding should not be reported again.
    std::set<std::string> known;
    // Also report equalities between pairs of variables accepted by this predicate.
    std::function<bool(const std::string&)> pair_filter;
    size_t max_premises = 10;
    size_t search_budget = 200000;
};

struct LinearResult {
    std::vector<LinearDerivation> derived;
    std::optional<std::vector<size_t>> inconsistent;  // minimal infeasible subset
    bool budget_hit = false;
};

// Linear solving with nonlinear monomials treated as opaque atoms. Each new
// binding carries a minimum-cardinality premise subset (branch-and-bound on
// subset size with an elimination feasibility test).
LinearResult solve_linear_system(const std::vector<Equation>& eqs, const LinearOptions& opt = {});

// Minimum-cardinality subset of eqs implying target, if any. Exposed for tests.
std::optional<std::vector<size_t>> minimal_premises(const std::vector<Equation>& eqs, const Equation& target,
                                                    size_t max_size = 10, size_t budget = 200000,
                                                    bool* budget_hit = nullptr);
// Does the subset imply target? Exact elimination.
bool implies(const std::vector<Equation>& eqs, const std::vector<size_t>& subset, const Equation& target);

// True iff |lhs - rhs| < 1e-9 (scaled by magnitude above 1) at `trials` random in-domain
// assignments. `complete` may fix dependent variables after the free ones are drawn.
bool numeric_check(const Equation& eq, int trials, const SymbolTable* table = nullptr,
                   const std::function<void(Assignment&, std::mt19937_64&)>& complete = {}, uint64_t seed = 7);

}  // namespace gd
