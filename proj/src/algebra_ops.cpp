#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace gd {

using K = AlgebraError::Kind;

Equation substitute(const Equation& target, const Equation& source) {
    auto occurs = [&](const std::string& v) { return contains_var(target.lhs, v) || contains_var(target.rhs, v); };
    if (is_var(source.lhs) && occurs(source.lhs->name)) return substitute_many(target, {{source.lhs->name, source.rhs}});
    if (is_var(source.rhs) && occurs(source.rhs->name)) return substitute_many(target, {{source.rhs->name, source.lhs}});
    throw AlgebraError(K::NotApplicable, "no shared replaceable symbol");
}

Equation substitute_many(const Equation& target, const std::map<std::string, Expr>& by) {
    Expr l = replace_vars(target.lhs, by), r = replace_vars(target.rhs, by);
    if (l == target.lhs && r == target.rhs) throw AlgebraError(K::NotApplicable, "nothing replaced");
    return Equation(l, r);
}

Equation evaluate_constants(const Equation& eq) {
    Expr l = fold(eq.lhs), r = fold(eq.rhs);
    if (l->key == eq.lhs->key && r->key == eq.rhs->key) throw AlgebraError(K::NotApplicable, "already folded");
    return Equation(l, r);
}

std::vector<long double> bracket_roots(const std::function<long double(long double)>& f, double lo, double hi,
                                       int cells, double tol) {
    std::vector<long double> roots;
    auto push = [&](long double r) {
        for (auto x : roots)
            if (std::fabs(x - r) < 1e-9L * std::max(1.0L, std::fabs(r))) return;
        roots.push_back(r);
    };
    long double h = (static_cast<long double>(hi) - lo) / cells;
    long double x0 = lo, f0 = f(x0);
    for (int i = 1; i <= cells; ++i) {
        long double x1 = lo + h * i, f1 = f(x1);
        if (std::isfinite(static_cast<double>(f0)) && f0 == 0) push(x0);
        if (std::isfinite(static_cast<double>(f0)) && std::isfinite(static_cast<double>(f1)) && f0 * f1 < 0) {
            long double a = x0, b = x1, fa = f0;
            while (b - a > tol * std::max(1.0L, std::fabs(a))) {
                long double m = (a + b) / 2, fm = f(m);
                if (fm == 0) {
                    a = b = m;
                    break;
                }
                if ((fa < 0) == (fm < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            long double r = (a + b) / 2;
            // A sign change across a pole is not a root.
            long double fr = f(r);
            if (std::isfinite(static_cast<double>(fr)) && std::fabs(fr) < 1e-6L) push(r);
        }
        x0 = x1;
        f0 = f1;
    }
    if (std::isfinite(static_cast<double>(f0)) && f0 == 0) push(x0);
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

// Snap a floating root onto a short decimal when the residual confirms it.
Number snap_root(long double r, const std::function<long double(long double)>& f) {
    for (long double scale : {1.0L, 10.0L, 100.0L, 1000.0L, 1e6L}) {
        long double s = std::round(r * scale) / scale;
        if (std::fabs(s - r) > 1e-7L * std::max(1.0L, std::fabs(r))) continue;
        long double fs = f(s);
        if (std::isfinite(static_cast<double>(fs)) && std::fabs(fs) < 1e-12L) {
            long long n = static_cast<long long>(std::llround(s * scale));
            return Number(Rat(n, static_cast<long long>(scale)));
        }
    }
    return Number::approx(r);
}

}  // namespace

std::vector<Equation> solve_univariate(const Equation& eq, const std::string& v, Domain d) {
    auto vs = vars_of(eq.lhs);
    auto vr = vars_of(eq.rhs);
    vs.insert(vr.begin(), vr.end());
    if (vs.size() != 1 || *vs.begin() != v) throw AlgebraError(K::NotApplicable, "not univariate in " + v);

    Expr res = sub(eq.lhs, eq.rhs);
    auto f = [&](long double t) {
        try {
            return eval(res, {{v, t}});
        } catch (const AlgebraError&) {
            return static_cast<long double>(NAN);
        }
    };

    std::vector<Number> real_roots;
    bool closed = false;
    RatFn rf;
    try {
        rf = to_ratfn(res);
        auto atoms = rf.num.atoms();
        if (atoms == std::set<std::string>{v} && rf.num.degree() <= 2) closed = true;
    } catch (const AlgebraError&) {
    }
    if (closed) {
        Number a(0), b(0), c(0);
        for (auto& [m, coef] : rf.num.terms) {
            int deg = m.empty() ? 0 : m[0].second;
            (deg == 2 ? a : deg == 1 ? b : c) = coef;
        }
        if (a.is_zero() && b.is_zero()) throw AlgebraError(K::NotApplicable, "variable cancels");
        if (a.is_zero()) {
            real_roots.push_back(-c / b);
        } else {
            Number disc = b * b - Number(4) * a * c;
            if (disc.sign() < 0 && !disc.approx_equal(Number(0))) throw AlgebraError(K::NoRealSolution, eq.str() + " has no real root");
            Number s = disc.sign() <= 0 ? Number(0) : disc.sqrt();
            real_roots.push_back((-b - s) / (Number(2) * a));
            if (!s.is_zero()) real_roots.push_back((-b + s) / (Number(2) * a));
        }
        // Roots that zero a denominator are spurious.
        std::vector<Number> kept;
        for (auto& r : real_roots) {
            long double fv = f(r.value());
            if (std::isfinite(static_cast<double>(fv))) kept.push_back(r);
        }
        real_roots = kept;
        std::sort(real_roots.begin(), real_roots.end());
        if (real_roots.empty()) throw AlgebraError(K::NoRealSolution, eq.str() + " has no real root");
    } else {
        auto [lo, hi] = domain_interval(d);
        for (auto r : bracket_roots(f, lo, hi)) real_roots.push_back(snap_root(r, f));
        if (real_roots.empty()) {
            // Look outside the domain to tell an empty domain from no root at all.
            auto wide = bracket_roots(f, -1e4, 1e4, 4096);
            if (wide.empty()) throw AlgebraError(K::NoRealSolution, eq.str() + " has no real root");
            throw AlgebraError(K::DomainEmpty, eq.str() + " has no root in " + domain_name(d));
        }
    }

    std::vector<Equation> out;
    for (auto& r : real_roots)
        if (in_domain(d, r.value())) out.emplace_back(var(v), num(r));
    if (out.empty()) throw AlgebraError(K::DomainEmpty, eq.str() + " has no root in " + domain_name(d));
    return out;
}

bool numeric_check(const Equation& eq, int trials, const SymbolTable* table,
                   const std::function<void(Assignment&, std::mt19937_64&)>& complete, uint64_t seed) {
    auto vs = vars_of(eq.lhs);
    auto vr = vars_of(eq.rhs);
    vs.insert(vr.begin(), vr.end());
    std::mt19937_64 rng(seed);
    int valid = 0;
    for (int t = 0; t < trials; ++t) {
        Assignment a;
        for (auto& v : vs) {
            Domain d = table ? table->domain(v) : infer_domain(v);
            double lo = 0.5, hi = 20;
            if (d == Domain::AngleDeg) lo = 1, hi = 179;
            else if (d == Domain::ArcDeg) lo = 1, hi = 359;
            else if (d == Domain::AreaNonneg) lo = 0.5, hi = 100;
            else if (d == Domain::Free) lo = -10, hi = 10;
            a[v] = std::uniform_real_distribution<double>(lo, hi)(rng);
        }
        if (complete) complete(a, rng);
        long double l, r;
        try {
            l = eval(eq.lhs, a);
            r = eval(eq.rhs, a);
        } catch (const AlgebraError&) {
            return false;
        }
        if (!std::isfinite(static_cast<double>(l)) || !std::isfinite(static_cast<double>(r))) continue;
        ++valid;
        long double scale = std::max({1.0L, std::fabs(l), std::fabs(r)});
        if (std::fabs(l - r) >= 1e-9L * scale) return false;
    }
    return valid > 0;
}

}  // namespace gd
