#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace gd {

// ---------------------------------------------------------------- domains and symbols

std::string domain_name(Domain d) {
    switch (d) {
        case Domain::NonnegLength: return "nonneg_length";
        case Domain::AngleDeg: return "angle_deg_0_180";
        case Domain::ArcDeg: return "arc_deg_0_360";
        case Domain::AreaNonneg: return "area_nonneg";
        case Domain::Free: return "free";
    }
    return "free";
}

Domain infer_domain(const std::string& name) {
    auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
    if (starts("LengthOf(") || starts("PerimeterOf(") || starts("RadiusOf(") || starts("DiameterOf(") ||
        starts("CircumferenceOf("))
        return Domain::NonnegLength;
    if (starts("MeasureOf(Angle(")) return Domain::AngleDeg;
    if (starts("MeasureOf(Arc(")) return Domain::ArcDeg;
    if (starts("AreaOf(")) return Domain::AreaNonneg;
    return Domain::Free;
}

std::pair<double, double> domain_interval(Domain d) {
    switch (d) {
        case Domain::NonnegLength: return {0.0, 1e4};
        case Domain::AngleDeg: return {0.0, 180.0};
        case Domain::ArcDeg: return {0.0, 360.0};
        case Domain::AreaNonneg: return {0.0, 1e6};
        case Domain::Free: return {-1e4, 1e4};
    }
    return {-1e4, 1e4};
}

bool in_domain(Domain d, long double v) {
    if (!std::isfinite(static_cast<double>(v))) return false;
    const long double eps = 1e-9L;
    switch (d) {
        case Domain::NonnegLength:
        case Domain::AreaNonneg: return v >= -eps;
        case Domain::AngleDeg: return v >= -eps && v <= 180 + eps;
        case Domain::ArcDeg: return v >= -eps && v <= 360 + eps;
        case Domain::Free: return true;
    }
    return true;
}

const QuantityVar& SymbolTable::intern(const std::string& name) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    QuantityVar q;
    q.name = name;
    if (quantity_literal(name)) q.origin = name;
    q.domain = infer_domain(name);
    return vars_.emplace(name, q).first->second;
}

void SymbolTable::set_domain(const std::string& name, Domain d) {
    intern(name);
    std::lock_guard<std::mutex> lk(mu_);
    auto& q = vars_[name];
    if (q.domain == Domain::Free) q.domain = d;
}

Domain SymbolTable::domain(const std::string& name) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second.domain;
    return infer_domain(name);
}

size_t SymbolTable::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return vars_.size();
}

std::vector<QuantityVar> SymbolTable::all() const {
    std::lock_guard<std::mutex> lk(mu_);
    std::vector<QuantityVar> out;
    for (auto& [k, v] : vars_) out.push_back(v);
    return out;
}

int var_rank(const std::string& name) { return quantity_literal(name) ? 2 : 1; }

// ---------------------------------------------------------------- polynomials

std::string monomial_str(const Monomial& m) {
    std::string s;
    for (auto& [a, k] : m) {
        if (!s.empty()) s += "*";
        s += a;
        if (k != 1) s += "^" + std::to_string(k);
    }
    return s.empty() ? "1" : s;
}

bool Poly::is_const() const { return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty()); }

Number Poly::const_term() const {
    auto it = terms.find(Monomial{});
    return it == terms.end() ? Number(0) : it->second;
}

int Poly::degree() const {
    int d = 0;
    for (auto& [m, c] : terms) {
        int s = 0;
        for (auto& p : m) s += p.second;
        d = std::max(d, s);
    }
    return d;
}

std::set<std::string> Poly::atoms() const {
    std::set<std::string> s;
    for (auto& [m, c] : terms)
        for (auto& p : m) s.insert(p.first);
    return s;
}

namespace {

bool negligible_sum(const Number& r, const Number& a, const Number& b) {
    if (r.exact()) return r.is_zero();
    long double scale = std::max({std::fabs(a.value()), std::fabs(b.value()), 1.0L});
    return std::fabs(r.value()) <= 1e-11L * scale;
}

void add_term(Poly& p, const Monomial& m, const Number& c) {
    auto it = p.terms.find(m);
    if (it == p.terms.end()) {
        if (!(c.exact() && c.is_zero()) && !(!c.exact() && std::fabs(c.value()) < 1e-300L)) p.terms.emplace(m, c);
        return;
    }
    Number r = it->second + c;
    if (negligible_sum(r, it->second, c)) p.terms.erase(it);
    else it->second = r;
}

Poly pconst(const Number& c) {
    Poly p;
    add_term(p, {}, c);
    return p;
}

Poly patom(const std::string& a) {
    Poly p;
    p.terms.emplace(Monomial{{a, 1}}, Number(1));
    return p;
}

Poly padd(const Poly& a, const Poly& b) {
    Poly r = a;
    for (auto& [m, c] : b.terms) add_term(r, m, c);
    return r;
}

Poly pscale(const Poly& a, const Number& k) {
    Poly r;
    if (k.exact() && k.is_zero()) return r;
    for (auto& [m, c] : a.terms) add_term(r, m, c * k);
    return r;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    std::map<std::string, int> e;
    for (auto& [x, k] : a) e[x] += k;
    for (auto& [x, k] : b) e[x] += k;
    Monomial m;
    for (auto& [x, k] : e)
        if (k != 0) m.emplace_back(x, k);
    return m;
}

Poly pmul(const Poly& a, const Poly& b) {
    Poly r;
    for (auto& [ma, ca] : a.terms)
        for (auto& [mb, cb] : b.terms) add_term(r, mono_mul(ma, mb), ca * cb);
    return r;
}

bool peq(const Poly& a, const Poly& b) { return padd(a, pscale(b, Number(-1))).is_zero(); }

RatFn rnorm(RatFn f) {
    if (f.den.is_zero()) throw AlgebraError(AlgebraError::Kind::NotApplicable, "division by zero");
    if (f.den.is_const()) {
        Number d = f.den.const_term();
        f.num = pscale(f.num, Number(1) / d);
        f.den = pconst(Number(1));
    }
    if (f.num.is_zero()) f.den = pconst(Number(1));
    return f;
}

RatFn radd(const RatFn& a, const RatFn& b) {
    if (peq(a.den, b.den)) return rnorm({padd(a.num, b.num), a.den});
    return rnorm({padd(pmul(a.num, b.den), pmul(b.num, a.den)), pmul(a.den, b.den)});
}

RatFn rmul(const RatFn& a, const RatFn& b) { return rnorm({pmul(a.num, b.num), pmul(a.den, b.den)}); }

RatFn rconst(const Number& c) { return {pconst(c), pconst(Number(1))}; }

RatFn opaque(const Expr& e) { return {patom("{" + e->key + "}"), pconst(Number(1))}; }

}  // namespace

RatFn to_ratfn(const Expr& e) {
    switch (e->op) {
        case Op::Num: return rconst(e->num);
        case Op::Pi: return rconst(Number::approx(3.14159265358979323846264338327950288L));
        case Op::Var: return {patom(e->name), pconst(Number(1))};
        case Op::Add: {
            RatFn r = rconst(Number(0));
            for (auto& k : e->kids) r = radd(r, to_ratfn(k));
            return r;
        }
        case Op::Mul: {
            RatFn r = rconst(Number(1));
            for (auto& k : e->kids) r = rmul(r, to_ratfn(k));
            return r;
        }
        case Op::Pow: {
            const Expr& x = e->kids[1];
            if (!has_vars(e)) {
                if (auto v = const_value(e)) return rconst(*v);
                return opaque(e);
            }
            auto k = x->op == Op::Num ? x->num.as_int() : std::nullopt;
            if (!k || *k > 8 || *k < -8) return opaque(e);
            RatFn b = to_ratfn(e->kids[0]);
            if (*k < 0) {
                if (b.num.is_zero()) throw AlgebraError(AlgebraError::Kind::NotApplicable, "division by zero");
                b = {b.den, b.num};
            }
            RatFn r = rconst(Number(1));
            for (long long i = 0; i < std::llabs(*k); ++i) r = rmul(r, b);
            return rnorm(r);
        }
        case Op::Func: {
            if (!has_vars(e)) {
                if (auto v = const_value(e)) return rconst(*v);
            }
            return opaque(e);
        }
    }
    return opaque(e);
}

Poly residual_poly(const Equation& eq) {
    RatFn r = radd(to_ratfn(eq.lhs), rmul(rconst(Number(-1)), to_ratfn(eq.rhs)));
    return r.num;
}

bool is_tautology(const Equation& eq) {
    try {
        return residual_poly(eq).is_zero();
    } catch (const AlgebraError&) {
        return false;
    }
}

bool is_false_constant(const Equation& eq, std::string* detail) {
    if (has_vars(eq.lhs) || has_vars(eq.rhs)) return false;
    auto a = const_value(eq.lhs), b = const_value(eq.rhs);
    if (!a || !b) return false;
    if (a->approx_equal(*b)) return false;
    if (detail) *detail = eq.str() + " evaluates to " + a->str() + " = " + b->str();
    return true;
}

// ---------------------------------------------------------------- evaluation

long double eval(const Expr& e, const Assignment& a) {
    switch (e->op) {
        case Op::Num: return e->num.value();
        case Op::Pi: return 3.14159265358979323846264338327950288L;
        case Op::Var: {
            auto it = a.find(e->name);
            if (it == a.end()) throw AlgebraError(AlgebraError::Kind::NotApplicable, "unbound variable " + e->name);
            return it->second;
        }
        case Op::Add: {
            long double s = 0;
            for (auto& k : e->kids) s += eval(k, a);
            return s;
        }
        case Op::Mul: {
            long double s = 1;
            for (auto& k : e->kids) s *= eval(k, a);
            return s;
        }
        case Op::Pow: {
            long double b = eval(e->kids[0], a), x = eval(e->kids[1], a);
            return std::pow(b, x);
        }
        case Op::Func: {
            long double x = eval(e->kids[0], a);
            long double r = x * 3.14159265358979323846264338327950288L / 180.0L;
            if (e->name == "sin") return std::sin(r);
            if (e->name == "cos") return std::cos(r);
            if (e->name == "tan") return std::tan(r);
            if (e->name == "cot") return 1.0L / std::tan(r);
            if (e->name == "sqrt") return std::sqrt(x);
            return NAN;
        }
    }
    return NAN;
}

}  // namespace gd
