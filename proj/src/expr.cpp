#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstring>

namespace gd {

namespace {

int op_rank(Op op) {
    switch (op) {
        case Op::Num: return 0;
        case Op::Pi: return 1;
        case Op::Var: return 2;
        case Op::Func: return 3;
        case Op::Pow: return 4;
        case Op::Mul: return 5;
        case Op::Add: return 6;
    }
    return 7;
}

bool expr_less(const Expr& a, const Expr& b) {
    int ra = op_rank(a->op), rb = op_rank(b->op);
    if (ra != rb) return ra < rb;
    return a->key < b->key;
}

std::string num_key(const Number& n) {
    if (n.exact()) return "#" + n.str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "#~%.15Lg", n.value());
    return buf;
}

Expr make(Op op, Number n, std::string name, std::vector<Expr> kids) {
    auto node = std::make_shared<ExprNode>();
    node->op = op;
    node->num = std::move(n);
    node->name = std::move(name);
    node->kids = std::move(kids);
    switch (op) {
        case Op::Num: node->key = num_key(node->num); break;
        case Op::Pi: node->key = "pi"; break;
        case Op::Var: node->key = "v:" + node->name; break;
        default: {
            std::string k = "(";
            k += op == Op::Add ? "+" : op == Op::Mul ? "*" : op == Op::Pow ? "^" : node->name;
            for (auto& c : node->kids) k += " " + c->key;
            k += ")";
            node->key = std::move(k);
        }
    }
    return node;
}

bool is_neg_term(const Expr& t) {
    if (t->op == Op::Num) return t->num.sign() < 0;
    if (t->op == Op::Mul && t->kids[0]->op == Op::Num) return t->kids[0]->num.sign() < 0;
    return false;
}

}  // namespace

Expr num(const Number& n) { return make(Op::Num, n, "", {}); }
Expr num(long long n) { return num(Number(n)); }
Expr pi() {
    static const Expr p = make(Op::Pi, Number(), "", {});
    return p;
}
Expr var(const std::string& name) { return make(Op::Var, Number(), name, {}); }

Expr add(std::vector<Expr> xs) {
    std::vector<Expr> flat;
    for (auto& x : xs) {
        if (x->op == Op::Add) {
            flat.insert(flat.end(), x->kids.begin(), x->kids.end());
        } else if (x->op == Op::Num && x->num.exact() && x->num.is_zero()) {
            continue;
        } else {
            flat.push_back(x);
        }
    }
    if (flat.empty()) return num(0);
    if (flat.size() == 1) return flat[0];
    std::stable_sort(flat.begin(), flat.end(), expr_less);
    return make(Op::Add, Number(), "", std::move(flat));
}

Expr mul(std::vector<Expr> xs) {
    std::vector<Expr> flat;
    Number coeff(1);
    bool has_coeff = false;
    std::vector<Expr> stack(xs.rbegin(), xs.rend());
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (x->op == Op::Mul) {
            for (auto it = x->kids.rbegin(); it != x->kids.rend(); ++it) stack.push_back(*it);
        } else if (x->op == Op::Num) {
            coeff *= x->num;
            has_coeff = true;
        } else {
            flat.push_back(x);
        }
    }
    if (has_coeff && coeff.exact() && coeff.is_zero()) return num(0);
    if (flat.empty()) return num(coeff);
    std::stable_sort(flat.begin(), flat.end(), expr_less);
    if (!(coeff.exact() && coeff.is_one())) flat.insert(flat.begin(), num(coeff));
    if (flat.size() == 1) return flat[0];
    return make(Op::Mul, Number(), "", std::move(flat));
}

Expr pow(Expr base, Expr exp) {
    if (exp->op == Op::Num && exp->num.exact() && exp->num.is_one()) return base;
    if (base->op == Op::Pow && exp->op == Op::Num && exp->num.is_integer() && base->kids[1]->op == Op::Num &&
        base->kids[1]->num.is_integer()) {
        return pow(base->kids[0], num(base->kids[1]->num * exp->num));
    }
    return make(Op::Pow, Number(), "", {std::move(base), std::move(exp)});
}

Expr func(const std::string& f, Expr arg) { return make(Op::Func, Number(), f, {std::move(arg)}); }

Expr neg(const Expr& e) {
    if (e->op == Op::Add) {
        std::vector<Expr> ks;
        for (auto& k : e->kids) ks.push_back(neg(k));
        return add(std::move(ks));
    }
    if (e->op == Op::Num) return num(-e->num);
    return mul({num(-1), e});
}

Expr sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
Expr div(const Expr& a, const Expr& b) { return mul({a, pow(b, num(-1))}); }

bool is_num(const Expr& e) { return e->op == Op::Num; }
bool is_var(const Expr& e) { return e->op == Op::Var; }

static void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e->op == Op::Var) out.insert(e->name);
    for (auto& k : e->kids) collect_vars(k, out);
}

std::set<std::string> vars_of(const Expr& e) {
    std::set<std::string> s;
    collect_vars(e, s);
    return s;
}

bool has_vars(const Expr& e) {
    if (e->op == Op::Var) return true;
    for (auto& k : e->kids)
        if (has_vars(k)) return true;
    return false;
}

bool contains_var(const Expr& e, const std::string& v) {
    if (e->op == Op::Var) return e->name == v;
    for (auto& k : e->kids)
        if (contains_var(k, v)) return true;
    return false;
}

static Expr rebuild(const Expr& e, std::vector<Expr> kids) {
    switch (e->op) {
        case Op::Add: return add(std::move(kids));
        case Op::Mul: return mul(std::move(kids));
        case Op::Pow: return pow(kids[0], kids[1]);
        case Op::Func: return func(e->name, kids[0]);
        default: return e;
    }
}

Expr replace_vars(const Expr& e, const std::map<std::string, Expr>& by) {
    if (e->op == Op::Var) {
        auto it = by.find(e->name);
        return it == by.end() ? e : it->second;
    }
    if (e->kids.empty()) return e;
    std::vector<Expr> ks;
    bool changed = false;
    for (auto& k : e->kids) {
        ks.push_back(replace_vars(k, by));
        changed |= ks.back() != k;
    }
    return changed ? rebuild(e, std::move(ks)) : e;
}

Expr replace_var(const Expr& e, const std::string& v, const Expr& by) { return replace_vars(e, {{v, by}}); }

// ---------------------------------------------------------------- folding

namespace {

// Exact trig at multiples of 30 (sin/cos) and 45 (tan/cot) degrees.
std::optional<Number> exact_trig(const std::string& f, const Number& deg) {
    if (!deg.is_integer()) return std::nullopt;
    auto d = deg.as_int();
    if (!d) return std::nullopt;
    long long a = ((*d % 360) + 360) % 360;
    auto sin_exact = [](long long x) -> std::optional<Number> {
        switch (x) {
            case 0: case 180: return Number(0);
            case 30: case 150: return Number::ratio(1, 2);
            case 90: return Number(1);
            case 210: case 330: return Number::ratio(-1, 2);
            case 270: return Number(-1);
            default: return std::nullopt;
        }
    };
    if (f == "sin") return sin_exact(a);
    if (f == "cos") return sin_exact((a + 90) % 360);
    if (f == "tan" || f == "cot") {
        long long t = a % 180;
        std::optional<Number> v;
        if (t == 0) v = Number(0);
        else if (t == 45) v = Number(1);
        else if (t == 135) v = Number(-1);
        else if (t == 90) v = std::nullopt;
        if (f == "cot") {
            if (t == 90) return Number(0);
            if (!v || v->is_zero()) return std::nullopt;
            return Number(1) / *v;
        }
        return v;
    }
    return std::nullopt;
}

long double deg2rad(long double d) { return d * 3.14159265358979323846264338327950288L / 180.0L; }

std::optional<Number> apply_func(const std::string& f, const Number& x) {
    if (f == "sqrt") {
        if (x.sign() < 0) return std::nullopt;
        return x.sqrt();
    }
    if (auto e = exact_trig(f, x)) return e;
    long double r = deg2rad(x.value());
    if (f == "sin") return Number::approx(std::sin(r));
    if (f == "cos") return Number::approx(std::cos(r));
    if (f == "tan") return Number::approx(std::tan(r));
    if (f == "cot") return Number::approx(1.0L / std::tan(r));
    return std::nullopt;
}

}  // namespace

Expr fold(const Expr& e, bool keep_pi) {
    switch (e->op) {
        case Op::Num:
        case Op::Var: return e;
        case Op::Pi: return keep_pi ? e : num(Number::approx(3.14159265358979323846264338327950288L));
        case Op::Add: {
            Number c(0);
            bool any = false;
            std::vector<Expr> rest;
            for (auto& k : e->kids) {
                Expr f = fold(k, keep_pi);
                if (f->op == Op::Num) {
                    c += f->num;
                    any = true;
                } else {
                    rest.push_back(f);
                }
            }
            if (any) rest.push_back(num(c));
            return add(std::move(rest));
        }
        case Op::Mul: {
            std::vector<Expr> ks;
            for (auto& k : e->kids) ks.push_back(fold(k, keep_pi));
            return mul(std::move(ks));
        }
        case Op::Pow: {
            Expr b = fold(e->kids[0], keep_pi), x = fold(e->kids[1], keep_pi);
            if (b->op == Op::Num && x->op == Op::Num) {
                const Number& bn = b->num;
                const Number& xn = x->num;
                if (auto k = xn.as_int()) {
                    if (!(bn.is_zero() && *k < 0)) return num(bn.pow(*k));
                } else if (xn.exact() && xn.rat() == Rat(1, 2) && bn.sign() >= 0) {
                    return num(bn.sqrt());
                } else if (bn.sign() > 0) {
                    return num(Number::approx(std::pow(bn.value(), xn.value())));
                }
            }
            return pow(b, x);
        }
        case Op::Func: {
            Expr a = fold(e->kids[0], keep_pi);
            if (a->op == Op::Num) {
                if (auto v = apply_func(e->name, a->num)) return num(*v);
            }
            return func(e->name, a);
        }
    }
    return e;
}

std::optional<Number> const_value(const Expr& e) {
    Expr f = fold(e, false);
    if (f->op == Op::Num) return f->num;
    return std::nullopt;
}

// ---------------------------------------------------------------- quantities

bool is_quantity_pred(const std::string& p) {
    return p == "LengthOf" || p == "MeasureOf" || p == "AreaOf" || p == "PerimeterOf" || p == "RadiusOf" ||
           p == "DiameterOf" || p == "CircumferenceOf";
}

namespace {

Literal normalize_figure(const Literal& fig) {
    if (fig.form != Literal::Form::App) return fig;
    if (fig.pred == "Circle" && !fig.args.empty()) return Literal::app("Circle", {fig.args[0]});
    bool all_ids = std::all_of(fig.args.begin(), fig.args.end(), [](const Arg& a) { return a.is_id(); });
    if (all_ids && (is_polygon_pred(fig.pred) || (fig.pred == "Shape" && fig.args.size() >= 3)))
        return canonicalize(Literal::app("Polygon", fig.args));
    return fig;
}

}  // namespace

std::string quantity_name(const Literal& q) {
    if (q.form != Literal::Form::App || !is_quantity_pred(q.pred) || q.args.size() != 1) return q.str();
    const Arg& a = q.args[0];
    if (!a.is_lit()) return q.str();
    Literal fig = normalize_figure(*a.lit);
    std::string pred = q.pred;
    if (pred == "PerimeterOf" && fig.pred == "Circle") pred = "CircumferenceOf";
    return canonicalize(Literal::app(pred, {Arg::sub(fig)})).str();
}

std::optional<Literal> quantity_literal(const std::string& name) {
    auto p = name.find('(');
    if (p == std::string::npos || !is_quantity_pred(name.substr(0, p))) return std::nullopt;
    try {
        return parse_literal_raw(name);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

Expr to_expr(const Arg& a) {
    switch (a.kind) {
        case Arg::Kind::Id: return var(a.text);
        case Arg::Kind::Lit: return to_expr(*a.lit);
        case Arg::Kind::Expr: return parse_expr(a.text);
        case Arg::Kind::Placeholder: return var("$");
    }
    return var(a.text);
}

Expr to_expr(const Literal& l) {
    if (l.form == Literal::Form::BareId) return var(l.pred);
    if (l.form == Literal::Form::BareExpr) return parse_expr(l.pred);
    const std::string& p = l.pred;
    if (is_quantity_pred(p)) return var(quantity_name(l));
    if (p == "Line" || p == "Arc") {
        return var(quantity_name(Literal::app(p == "Line" ? "LengthOf" : "MeasureOf", {Arg::sub(l)})));
    }
    if (p == "Angle") return var(quantity_name(Literal::app("MeasureOf", {Arg::sub(l)})));
    std::vector<Expr> xs;
    for (auto& a : l.args) xs.push_back(to_expr(a));
    if (p == "Add") return add(xs);
    if (p == "Mul") return mul(xs);
    if (p == "Sub") return sub(xs[0], xs[1]);
    if (p == "Div" || p == "RatioOf") return div(xs[0], xs[1]);
    if (p == "Pow") return pow(xs[0], xs[1]);
    if (p == "HalfOf") return div(xs[0], num(2));
    if (p == "SinOf") return func("sin", xs[0]);
    if (p == "CosOf") return func("cos", xs[0]);
    if (p == "TanOf") return func("tan", xs[0]);
    if (p == "CotOf") return func("cot", xs[0]);
    if (p == "SqrtOf") return func("sqrt", xs[0]);
    throw AlgebraError(AlgebraError::Kind::Parse, "not a numeric term: " + l.str());
}

// ---------------------------------------------------------------- expression text parser

namespace {

class ExprParser {
public:
    explicit ExprParser(const std::string& s) : s_(s) {}

    Expr run() {
        skip();
        if (i_ >= s_.size()) fail("empty expression");
        Expr e = expr();
        skip();
        if (i_ < s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& m) {
        throw AlgebraError(AlgebraError::Kind::Parse, "expression '" + s_ + "' at " + std::to_string(i_) + ": " + m);
    }
    void skip() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }
    bool starts(const char* t) const { return s_.compare(i_, std::strlen(t), t) == 0; }
    bool eat(const char* t) {
        skip();
        if (starts(t)) {
            i_ += std::strlen(t);
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat("+")) e = add({e, term()});
            else if (eat("-")) e = sub(e, term());
            else return e;
        }
    }

    bool begins_primary() {
        skip();
        if (i_ >= s_.size()) return false;
        unsigned char c = s_[i_];
        return std::isalnum(c) || c == '(' || c == '{' || c == '\\' || c == '.' || c == 0xCF /* π */ ||
               c == 0xE2 /* √ */ || c == '$';
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat("*") || eat("\\cdot") || eat("\\times") || eat("\xC2\xB7") || eat("\xC3\x97")) e = mul({e, unary()});
            else if (eat("/") || eat("\xC3\xB7")) e = div(e, unary());
            else if (begins_primary()) e = mul({e, power()});
            else return e;
        }
    }

    Expr unary() {
        if (eat("-")) return neg(unary());
        if (eat("+")) return unary();
        return power();
    }

    Expr power() {
        Expr b = primary();
        degree_suffix();
        if (eat("^")) {
            skip();
            if (starts("{\\circ}") || starts("\\circ")) {
                eat("{\\circ}") || eat("\\circ");
                return b;
            }
            return pow(b, unary());
        }
        if (eat("\xC2\xB2")) return pow(b, num(2));
        if (eat("\xC2\xB3")) return pow(b, num(3));
        return b;
    }

    void degree_suffix() {
        skip();
        eat("\xC2\xB0");
    }

    Expr group(char close) {
        Expr e = expr();
        skip();
        if (i_ >= s_.size() || s_[i_] != close) fail(std::string("expected '") + close + "'");
        ++i_;
        return e;
    }

    Expr braced() {
        skip();
        if (eat("{")) return group('}');
        return power();
    }

    Expr primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') { ++i_; return group(')'); }
        if (c == '{') { ++i_; return group('}'); }
        if (c == '$') { ++i_; return var("$"); }
        if (eat("\xCF\x80")) return pi();
        if (eat("\xE2\x88\x9A")) return func("sqrt", braced_or_paren());
        if (c == '\\') {
            if (eat("\\pi")) return pi();
            if (eat("\\frac") || eat("\\dfrac") || eat("\\tfrac")) {
                Expr a = braced();
                Expr b = braced();
                return div(a, b);
            }
            if (eat("\\sqrt")) {
                skip();
                if (eat("[")) {
                    Expr n = group(']');
                    Expr a = braced();
                    return pow(a, div(num(1), n));
                }
                return func("sqrt", braced());
            }
            if (eat("\\left")) return primary();
            for (const char* f : {"sin", "cos", "tan", "cot"}) {
                if (eat((std::string("\\") + f).c_str())) return func(f, braced_or_paren());
            }
            fail("unknown command");
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t st = i_;
            while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
            auto n = parse_decimal(s_.substr(st, i_ - st));
            if (!n) fail("bad number");
            return num(*n);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t st = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\''))
                ++i_;
            std::string id = s_.substr(st, i_ - st);
            if (id == "pi") return pi();
            for (const char* f : {"sin", "cos", "tan", "cot", "sqrt"}) {
                if (id == f) return func(f, braced_or_paren());
            }
            if (i_ < s_.size() && s_[i_] == '(' && find_predicate(id)) {
                size_t end = match_paren(i_);
                std::string text = s_.substr(st, end + 1 - st);
                i_ = end + 1;
                try {
                    return to_expr(parse_literal(text));
                } catch (const ParseError& e) {
                    fail(e.what());
                }
            }
            return var(id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr braced_or_paren() {
        skip();
        if (eat("(")) return group(')');
        return braced();
    }

    size_t match_paren(size_t open) {
        int depth = 0;
        for (size_t j = open; j < s_.size(); ++j) {
            if (s_[j] == '(') ++depth;
            else if (s_[j] == ')' && --depth == 0) return j;
        }
        fail("unbalanced parenthesis");
    }
};

}  // namespace

Expr parse_expr(const std::string& text) { return ExprParser(text).run(); }

// ---------------------------------------------------------------- printing

namespace {

std::string join_ids(const Literal& l) {
    std::string s;
    for (auto& a : l.args) s += a.is_lit() ? join_ids(*a.lit) : a.text;
    return s;
}

std::string figure_display(const Literal& fig, PrintStyle st) {
    if (fig.pred == "Circle") return (st.unicode ? "\xE2\x8A\x99" : "circle ") + join_ids(fig);
    if (fig.pred == "Polygon" && fig.args.size() == 3) return (st.unicode ? "\xE2\x96\xB3" : "triangle ") + join_ids(fig);
    if (fig.pred == "Sector") return "sector " + join_ids(fig);
    if (fig.pred == "Line") return join_ids(fig);
    return join_ids(fig);
}

}  // namespace

std::string var_display(const std::string& name, PrintStyle st) {
    auto q = quantity_literal(name);
    if (!q || q->args.empty() || !q->args[0].is_lit()) return name;
    const Literal& fig = *q->args[0].lit;
    const std::string& p = q->pred;
    if (p == "LengthOf" && fig.pred == "Line") return join_ids(fig);
    if (p == "LengthOf" && fig.pred == "Arc") return "len " + std::string(st.unicode ? "\xE2\x8C\x92" : "arc ") + join_ids(fig);
    if (p == "MeasureOf" && fig.pred == "Angle") return (st.unicode ? "\xE2\x88\xA0" : "angle ") + join_ids(fig);
    if (p == "MeasureOf" && fig.pred == "Arc") return (st.unicode ? "m\xE2\x8C\x92" : "arc ") + join_ids(fig);
    if (p == "AreaOf") return "Area(" + figure_display(fig, st) + ")";
    if (p == "PerimeterOf") return "Perimeter(" + figure_display(fig, st) + ")";
    if (p == "RadiusOf") return "r(" + figure_display(fig, st) + ")";
    if (p == "DiameterOf") return "d(" + figure_display(fig, st) + ")";
    if (p == "CircumferenceOf") return "C(" + figure_display(fig, st) + ")";
    return name;
}

namespace {

int prec(const Expr& e) {
    switch (e->op) {
        case Op::Add: return 1;
        case Op::Mul: return 2;
        case Op::Pow: return 3;
        case Op::Num: return e->num.sign() < 0 ? 1 : 4;
        default: return 4;
    }
}

std::string pr(const Expr& e, PrintStyle st);

std::string paren_if(const Expr& e, int min_prec, PrintStyle st) {
    std::string s = pr(e, st);
    return prec(e) < min_prec ? "(" + s + ")" : s;
}

std::string print_mul(const Expr& e, PrintStyle st) {
    Number coeff(1);
    std::vector<Expr> numer, denom;
    for (auto& k : e->kids) {
        if (k->op == Op::Num) {
            coeff = k->num;
        } else if (k->op == Op::Pow && k->kids[1]->op == Op::Num && k->kids[1]->num.sign() < 0) {
            denom.push_back(pow(k->kids[0], num(-k->kids[1]->num)));
        } else {
            numer.push_back(k);
        }
    }
    std::string sign;
    if (coeff.sign() < 0) {
        sign = "-";
        coeff = -coeff;
    }
    const char* dot = st.unicode ? "\xC2\xB7" : "*";
    std::string top;
    if (!coeff.is_one() || numer.empty()) top = coeff.str();
    for (auto& f : numer) {
        if (!top.empty()) top += dot;
        top += paren_if(f, 3, st);
    }
    if (denom.empty()) return sign + top;
    std::string bottom;
    if (denom.size() == 1) {
        bottom = paren_if(denom[0], 3, st);
    } else {
        std::string d;
        for (auto& f : denom) {
            if (!d.empty()) d += dot;
            d += paren_if(f, 3, st);
        }
        bottom = "(" + d + ")";
    }
    if (numer.size() + (coeff.is_one() ? 0 : 1) > 1) top = "(" + top + ")";
    return sign + top + "/" + bottom;
}

std::string pr(const Expr& e, PrintStyle st) {
    switch (e->op) {
        case Op::Num: return e->num.str();
        case Op::Pi: return st.unicode ? "\xCF\x80" : "pi";
        case Op::Var: return var_display(e->name, st);
        case Op::Add: {
            std::string s;
            for (size_t i = 0; i < e->kids.size(); ++i) {
                const Expr& t = e->kids[i];
                if (i == 0) {
                    s = pr(t, st);
                } else if (is_neg_term(t)) {
                    s += " - " + paren_if(neg(t), 2, st);
                } else {
                    s += " + " + paren_if(t, 2, st);
                }
            }
            return s;
        }
        case Op::Mul: return print_mul(e, st);
        case Op::Pow: {
            const Expr& x = e->kids[1];
            if (x->op == Op::Num && x->num.sign() < 0) return "1/" + paren_if(pow(e->kids[0], num(-x->num)), 3, st);
            std::string b = paren_if(e->kids[0], 4, st);
            if (st.unicode && x->op == Op::Num && x->num.exact()) {
                if (x->num.rat() == 2) return b + "\xC2\xB2";
                if (x->num.rat() == 3) return b + "\xC2\xB3";
            }
            return b + "^" + paren_if(x, 4, st);
        }
        case Op::Func: {
            if (e->name == "sqrt") return std::string(st.unicode ? "\xE2\x88\x9A" : "sqrt") + "(" + pr(e->kids[0], st) + ")";
            return e->name + "(" + pr(e->kids[0], st) + ")";
        }
    }
    return "?";
}

Arg expr_arg(const Expr& e) {
    switch (e->op) {
        case Op::Num: return Arg::expr(e->num.formal());
        case Op::Pi: return Arg::expr("\\pi");
        case Op::Var: {
            if (auto q = quantity_literal(e->name)) return Arg::sub(*q);
            if (is_identifier(e->name)) return Arg::id(e->name);
            if (e->name == "$") return Arg::placeholder();
            return Arg::expr(e->name);
        }
        case Op::Add: {
            std::vector<Arg> as;
            for (auto& k : e->kids) as.push_back(expr_arg(k));
            return Arg::sub(Literal::app("Add", as));
        }
        case Op::Mul: {
            std::vector<Expr> numer, denom;
            for (auto& k : e->kids) {
                if (k->op == Op::Pow && k->kids[1]->op == Op::Num && k->kids[1]->num.sign() < 0)
                    denom.push_back(pow(k->kids[0], num(-k->kids[1]->num)));
                else
                    numer.push_back(k);
            }
            auto build = [](const std::vector<Expr>& fs) -> Arg {
                if (fs.empty()) return Arg::expr("1");
                if (fs.size() == 1) return expr_arg(fs[0]);
                std::vector<Arg> as;
                for (auto& f : fs) as.push_back(expr_arg(f));
                return Arg::sub(Literal::app("Mul", as));
            };
            if (denom.empty()) return build(numer);
            return Arg::sub(Literal::app("Div", {build(numer), build(denom)}));
        }
        case Op::Pow: return Arg::sub(Literal::app("Pow", {expr_arg(e->kids[0]), expr_arg(e->kids[1])}));
        case Op::Func: {
            std::string f = e->name;
            std::string p = f == "sqrt" ? "SqrtOf" : std::string(1, static_cast<char>(std::toupper(f[0]))) + f.substr(1) + "Of";
            return Arg::sub(Literal::app(p, {expr_arg(e->kids[0])}));
        }
    }
    return Arg::expr("?");
}

}  // namespace

std::string print_expr(const Expr& e, PrintStyle st) { return pr(e, st); }
std::string expr_formal(const Expr& e) { return expr_arg(e).str(); }

// ---------------------------------------------------------------- equations

Equation::Equation(Expr l, Expr r) : lhs(std::move(l)), rhs(std::move(r)) {
    Expr res = sub(lhs, rhs);
    Expr nres = neg(res);
    key = std::min(res->key, nres->key);
}

std::string Equation::str(PrintStyle st) const { return print_expr(lhs, st) + " = " + print_expr(rhs, st); }

std::string Equation::formal() const { return equation_literal(*this).str(); }

Equation equation_from_literal(const Literal& equals) {
    if (equals.form != Literal::Form::App || equals.pred != "Equals" || equals.args.size() != 2)
        throw AlgebraError(AlgebraError::Kind::Parse, "not an Equals literal: " + equals.str());
    return Equation(to_expr(equals.args[0]), to_expr(equals.args[1]));
}

Literal equation_literal(const Equation& e) { return Literal::app("Equals", {expr_arg(e.lhs), expr_arg(e.rhs)}); }

}  // namespace gd
