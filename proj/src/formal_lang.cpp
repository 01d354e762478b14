#include "geodeduce/formal_lang.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace gd {

Arg Arg::id(std::string name) {
    Arg a;
    a.kind = Kind::Id;
    a.text = std::move(name);
    return a;
}

Arg Arg::expr(std::string text) {
    Arg a;
    a.kind = Kind::Expr;
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
               text.end());
    a.text = std::move(text);
    return a;
}

Arg Arg::sub(Literal l) {
    Arg a;
    a.kind = Kind::Lit;
    a.lit = std::make_shared<const Literal>(std::move(l));
    return a;
}

Arg Arg::placeholder() {
    Arg a;
    a.kind = Kind::Placeholder;
    a.text = "$";
    return a;
}

std::string Arg::str() const {
    if (kind == Kind::Lit) return lit->str();
    return text;
}

Literal Literal::app(std::string pred, std::vector<Arg> args) {
    Literal l;
    l.form = Form::App;
    l.pred = std::move(pred);
    l.args = std::move(args);
    return l;
}

std::string Literal::str() const {
    if (form != Form::App) return pred;
    std::string s = pred;
    s += '(';
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ',';
        s += args[i].str();
    }
    s += ')';
    return s;
}

std::vector<std::string> Literal::ids() const {
    std::vector<std::string> out;
    for (const auto& a : args)
        if (a.is_id()) out.push_back(a.text);
    return out;
}

ParseError::ParseError(Kind k, std::string msg, size_t p, int ln)
    : std::runtime_error(std::move(msg)), kind(k), pos(p), line(ln) {}

const std::vector<PredicateInfo>& predicate_catalog() {
    static const std::vector<PredicateInfo> cat = [] {
        std::vector<PredicateInfo> v = {
            // figures
            {"Line", 2, 2, false},
            {"Angle", 1, 3, false},
            {"Triangle", 3, 3, false},
            {"Quadrilateral", 4, 4, false},
            {"Parallelogram", 4, 4, false},
            {"Square", 4, 4, false},
            {"Rectangle", 4, 4, false},
            {"Rhombus", 4, 4, false},
            {"Trapezoid", 4, 4, false},
            {"Kite", 4, 4, false},
            {"Polygon", 3, -1, false},
            {"Pentagon", 5, 5, false},
            {"Hexagon", 6, 6, false},
            {"Heptagon", 7, 7, false},
            {"Octagon", 8, 8, false},
            {"Circle", 1, 2, false},
            {"Arc", 2, 3, false},
            {"Sector", 3, 3, false},
            {"Shape", 1, -1, false},
            // properties
            {"Equilateral", 1, 1, false},
            {"Regular", 1, 1, false},
            // measures
            {"AreaOf", 1, 1, false},
            {"PerimeterOf", 1, 1, false},
            {"RadiusOf", 1, 1, false},
            {"DiameterOf", 1, 1, false},
            {"CircumferenceOf", 1, 1, false},
            {"MeasureOf", 1, 1, false},
            {"LengthOf", 1, 1, false},
            // relations
            {"PointLiesOnLine", 2, 2, false},
            {"PointLiesOnCircle", 2, 2, false},
            {"Parallel", 2, 2, false},
            {"Perpendicular", 2, 2, false},
            {"BisectsAngle", 2, 2, false},
            {"Congruent", 2, 2, false},
            {"Similar", 2, 2, false},
            {"Tangent", 2, 2, false},
            {"Secant", 2, 2, false},
            {"CircumscribedTo", 2, 2, false},
            {"InscribedIn", 2, 2, false},
            {"IsMidpointOf", 2, 2, false},
            {"IsCentroidOf", 2, 2, false},
            {"IsIncenterOf", 2, 2, false},
            {"IsRadiusOf", 2, 2, false},
            {"IsDiameterOf", 2, 2, false},
            {"IsMidsegmentOf", 2, 2, false},
            {"IsChordOf", 2, 2, false},
            {"IsPerpendicularBisectorOf", 2, 2, false},
            {"IsMedianOf", 2, 2, false},
            // arithmetic
            {"SinOf", 1, 1, false},
            {"CosOf", 1, 1, false},
            {"TanOf", 1, 1, false},
            {"CotOf", 1, 1, false},
            {"HalfOf", 1, 1, false},
            {"SqrtOf", 1, 1, false},
            {"RatioOf", 2, 2, false},
            {"Add", 2, -1, false},
            {"Mul", 2, -1, false},
            {"Sub", 2, 2, false},
            {"Div", 2, 2, false},
            {"Pow", 2, 2, false},
            {"Equals", 2, 2, false},
            {"Find", 1, 1, false},
            // engine-internal
            {"Collinear", 3, -1, true},
            {"SimRatio", 2, 2, true},
        };
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        return v;
    }();
    return cat;
}

const PredicateInfo* find_predicate(const std::string& name) {
    const auto& cat = predicate_catalog();
    auto it = std::lower_bound(cat.begin(), cat.end(), name,
                               [](const PredicateInfo& p, const std::string& n) { return p.name < n; });
    if (it != cat.end() && it->name == name) return &*it;
    return nullptr;
}

int polygon_size(const std::string& p) {
    static const std::map<std::string, int> sizes = {
        {"Triangle", 3}, {"Quadrilateral", 4}, {"Parallelogram", 4}, {"Square", 4},   {"Rectangle", 4},
        {"Rhombus", 4},  {"Trapezoid", 4},     {"Kite", 4},          {"Pentagon", 5}, {"Hexagon", 6},
        {"Heptagon", 7}, {"Octagon", 8},       {"Polygon", 0}};
    auto it = sizes.find(p);
    return it == sizes.end() ? -1 : it->second;
}

bool is_polygon_pred(const std::string& p) { return polygon_size(p) >= 0; }

bool is_identifier(const std::string& s) {
    if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_anub(char c) { return is_alnum(c) || c == '_' || c == '\\'; }
bool is_special(char c) {
    switch (c) {
        case '_': case '\\': case '(': case ')': case ',': case ' ': case '+': case '-':
        case '*': case '/': case '.': case '{': case '}': case '^': case '$': case '\'':
            return true;
        default:
            return false;
    }
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Literal top() {
        skip_ws();
        if (at_end()) fail("logic form");
        Literal l = logic_form(true);
        skip_ws();
        if (!at_end()) fail("end of input");
        return l;
    }

private:
    const std::string& s_;
    size_t i_ = 0;

    bool at_end() const { return i_ >= s_.size(); }
    void skip_ws() {
        while (!at_end() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        std::ostringstream os;
        os << "syntax error at position " << i_ << ": expected " << expected;
        if (!at_end()) os << ", found '" << s_[i_] << "'";
        throw ParseError(ParseError::Kind::Syntax, os.str(), i_);
    }

    std::string read_id() {
        size_t st = i_;
        if (at_end() || !(s_[i_] >= 'A' && s_[i_] <= 'Z')) return {};
        ++i_;
        while (!at_end() && (is_alnum(s_[i_]) || s_[i_] == '_')) ++i_;
        return s_.substr(st, i_ - st);
    }

    // Expression text runs to the first top-level ',' or ')'.
    std::string read_expr(bool top_level) {
        size_t st = i_;
        if (!at_end() && s_[i_] == '-') ++i_;
        if (at_end() || !(is_anub(s_[i_]) || s_[i_] == '(' || s_[i_] == '{' || s_[i_] == '.')) fail("expression");
        int depth = 0;
        while (!at_end()) {
            char c = s_[i_];
            if (c == '(' || c == '{') {
                ++depth;
            } else if (c == ')' || c == '}') {
                if (depth == 0) {
                    if (c == ')' && !top_level) break;
                    fail("balanced expression");
                }
                --depth;
            } else if (c == ',' && depth == 0 && !top_level) {
                break;
            } else if (!is_alnum(c) && !is_special(c)) {
                fail("expression character");
            }
            ++i_;
        }
        if (depth != 0) fail("closing bracket");
        std::string t = s_.substr(st, i_ - st);
        while (!t.empty() && t.back() == ' ') t.pop_back();
        return t;
    }

    Literal logic_form(bool top_level) {
        skip_ws();
        size_t st = i_;
        std::string id = read_id();
        if (!id.empty()) {
            size_t after = i_;
            skip_ws();
            if (!at_end() && s_[i_] == '(') {
                ++i_;
                std::vector<Arg> args = arg_list();
                const PredicateInfo* info = find_predicate(id);
                if (!info)
                    throw ParseError(ParseError::Kind::UnknownPredicate, "unknown predicate '" + id + "'", st);
                int n = static_cast<int>(args.size());
                if (n < info->min_arity || (info->max_arity >= 0 && n > info->max_arity)) {
                    std::ostringstream os;
                    os << "arity mismatch for " << id << ": got " << n << " argument(s)";
                    throw ParseError(ParseError::Kind::ArityMismatch, os.str(), st);
                }
                return Literal::app(id, std::move(args));
            }
            bool delim = at_end() || s_[i_] == ',' || s_[i_] == ')';
            if (delim) {
                Literal l;
                l.form = Literal::Form::BareId;
                l.pred = id;
                i_ = after;
                return l;
            }
            i_ = st;
        }
        skip_ws();
        std::string e = read_expr(top_level);
        Literal l;
        l.form = Literal::Form::BareExpr;
        l.pred = Arg::expr(e).text;
        return l;
    }

    std::vector<Arg> arg_list() {
        std::vector<Arg> args;
        while (true) {
            skip_ws();
            if (at_end()) fail("argument");
            if (s_[i_] == '$') {
                ++i_;
                skip_ws();
                if (at_end() || (s_[i_] != ',' && s_[i_] != ')')) fail("',' or ')'");
                args.push_back(Arg::placeholder());
            } else {
                Literal l = logic_form(false);
                if (l.form == Literal::Form::BareId)
                    args.push_back(Arg::id(l.pred));
                else if (l.form == Literal::Form::BareExpr)
                    args.push_back(Arg::expr(l.pred));
                else
                    args.push_back(Arg::sub(std::move(l)));
            }
            skip_ws();
            if (at_end()) fail("',' or ')'");
            if (s_[i_] == ',') {
                ++i_;
                continue;
            }
            if (s_[i_] == ')') {
                ++i_;
                return args;
            }
            fail("',' or ')'");
        }
    }
};

bool all_ids(const Literal& l) {
    return std::all_of(l.args.begin(), l.args.end(), [](const Arg& a) { return a.is_id(); });
}

std::vector<std::vector<int>> dihedral_perms(int n) {
    std::vector<std::vector<int>> out;
    for (int r = 0; r < n; ++r) {
        std::vector<int> fwd, bwd;
        for (int k = 0; k < n; ++k) {
            fwd.push_back((r + k) % n);
            bwd.push_back(((r - k) % n + n) % n);
        }
        out.push_back(fwd);
        out.push_back(bwd);
    }
    return out;
}

std::vector<Arg> permute(const std::vector<Arg>& a, const std::vector<int>& p) {
    std::vector<Arg> out;
    for (int i : p) out.push_back(a[i]);
    return out;
}

std::string join_args(const std::vector<Arg>& a) {
    std::string s;
    for (const auto& x : a) s += x.str() + ",";
    return s;
}

Literal canon_impl(const Literal& l);

// Similar/Congruent keep vertex correspondence: permute both figures together.
Literal canon_correspondence(const Literal& l) {
    const Arg& a = l.args[0];
    const Arg& b = l.args[1];
    if (!a.is_lit() || !b.is_lit()) {
        Literal out = l;
        for (auto& x : out.args)
            if (x.is_lit()) x = Arg::sub(canon_impl(*x.lit));
        return out;
    }
    const Literal& fa = *a.lit;
    const Literal& fb = *b.lit;
    if (!is_polygon_pred(fa.pred) || fa.pred != fb.pred || fa.args.size() != fb.args.size() || !all_ids(fa) ||
        !all_ids(fb)) {
        Literal out = l;
        out.args[0] = Arg::sub(canon_impl(fa));
        out.args[1] = Arg::sub(canon_impl(fb));
        return out;
    }
    int n = static_cast<int>(fa.args.size());
    std::string best;
    Literal best_lit;
    for (const auto& p : dihedral_perms(n)) {
        auto pa = permute(fa.args, p);
        auto pb = permute(fb.args, p);
        for (int swap = 0; swap < 2; ++swap) {
            Literal c = Literal::app(l.pred, {Arg::sub(Literal::app(fa.pred, swap ? pb : pa)),
                                              Arg::sub(Literal::app(fb.pred, swap ? pa : pb))});
            std::string s = c.str();
            if (best.empty() || s < best) {
                best = s;
                best_lit = c;
            }
        }
    }
    return best_lit;
}

Literal canon_impl(const Literal& l) {
    if (l.form != Literal::Form::App) return l;
    if ((l.pred == "Similar" || l.pred == "Congruent") && l.args.size() == 2) return canon_correspondence(l);
    Literal out = l;
    for (auto& a : out.args)
        if (a.is_lit()) a = Arg::sub(canon_impl(*a.lit));
    const std::string& p = out.pred;
    if ((p == "Line" || (p == "Arc" && out.args.size() == 2)) && all_ids(out)) {
        if (out.args[1].text < out.args[0].text) std::swap(out.args[0], out.args[1]);
    } else if (p == "Angle" && out.args.size() == 3 && all_ids(out)) {
        if (out.args[2].text < out.args[0].text) std::swap(out.args[0], out.args[2]);
    } else if (is_polygon_pred(p) && all_ids(out)) {
        int n = static_cast<int>(out.args.size());
        std::vector<Arg> best;
        std::string bs;
        for (const auto& perm : dihedral_perms(n)) {
            auto c = permute(out.args, perm);
            std::string s = join_args(c);
            if (best.empty() || s < bs) {
                best = c;
                bs = s;
            }
        }
        out.args = best;
    } else if ((p == "Parallel" || p == "Perpendicular") && out.args.size() == 2) {
        if (out.args[1].str() < out.args[0].str()) std::swap(out.args[0], out.args[1]);
    }
    return out;
}

}  // namespace

Literal canonicalize(const Literal& l) { return canon_impl(l); }

Literal parse_literal_raw(const std::string& text) {
    Parser p(text);
    return p.top();
}

Literal parse_literal(const std::string& text) { return canonicalize(parse_literal_raw(text)); }

std::string print_literal(const Literal& l) { return l.str(); }

Formalization parse_problem(const std::string& text) {
    Formalization f;
    std::set<std::string> seen;
    int goals = 0;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == '#') continue;
        Literal l;
        try {
            l = parse_literal(line);
        } catch (const ParseError& e) {
            throw ParseError(e.kind, "line " + std::to_string(ln) + ": " + e.what(), e.pos, ln);
        }
        if (l.form == Literal::Form::App && l.pred == "Find") {
            ++goals;
            if (goals > 1)
                throw ParseError(ParseError::Kind::MultipleGoals, "line " + std::to_string(ln) + ": second Find",
                                 0, ln);
            f.find = l;
            const Arg& a = l.args[0];
            if (a.is_lit()) {
                f.goal = *a.lit;
            } else {
                Literal g;
                g.form = a.is_id() ? Literal::Form::BareId : Literal::Form::BareExpr;
                g.pred = a.text;
                f.goal = g;
            }
            continue;
        }
        if (l.form != Literal::Form::App)
            throw ParseError(ParseError::Kind::BadFact,
                             "line " + std::to_string(ln) + ": bare term '" + l.str() + "' is not a fact", 0, ln);
        if (seen.insert(l.str()).second) f.facts.push_back(l);
    }
    if (goals == 0) throw ParseError(ParseError::Kind::MissingGoal, "no Find(...) goal in problem");
    return f;
}

std::string print_problem(const Formalization& f) {
    std::string s;
    for (const auto& l : f.facts) s += l.str() + "\n";
    s += f.find.str() + "\n";
    return s;
}

}  // namespace gd
