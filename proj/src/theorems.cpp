#include "geodeduce/theorems.hpp"

#include <algorithm>
#include <functional>

namespace gd {

namespace {

using Pts = std::vector<std::string>;
using Tri = std::array<std::string, 3>;

Literal mk(const std::string& pred, std::vector<Arg> args) { return canonicalize(Literal::app(pred, std::move(args))); }
Literal line_lit(const std::string& a, const std::string& b) { return mk("Line", {Arg::id(a), Arg::id(b)}); }
Literal angle_lit(const std::string& a, const std::string& v, const std::string& b) {
    return mk("Angle", {Arg::id(a), Arg::id(v), Arg::id(b)});
}
Literal circle_lit(const std::string& c) { return mk("Circle", {Arg::id(c)}); }
Literal poly_lit(const std::string& pred, const Pts& vs) {
    std::vector<Arg> as;
    for (const auto& v : vs) as.push_back(Arg::id(v));
    return mk(pred, as);
}

std::string qname(const std::string& q, const Literal& fig) { return quantity_name(Literal::app(q, {Arg::sub(fig)})); }
std::string len(const std::string& a, const std::string& b) { return qname("LengthOf", line_lit(a, b)); }
std::string ang(const std::string& a, const std::string& v, const std::string& b) {
    return qname("MeasureOf", angle_lit(a, v, b));
}
Expr L(const std::string& a, const std::string& b) { return var(len(a, b)); }
Expr A(const std::string& a, const std::string& v, const std::string& b) { return var(ang(a, v, b)); }
Expr R(const std::string& c) { return var(qname("RadiusOf", circle_lit(c))); }

void walk(const Literal& l, const std::function<void(const Literal&)>& f) {
    f(l);
    for (const auto& a : l.args)
        if (a.is_lit()) walk(*a.lit, f);
}

bool ids_only(const Literal& l) {
    return !l.args.empty() && std::all_of(l.args.begin(), l.args.end(), [](const Arg& a) { return a.is_id(); });
}

Pts vertices(const Literal& l) {
    if (l.form != Literal::Form::App || !is_polygon_pred(l.pred) || !ids_only(l)) return {};
    return l.ids();
}

std::optional<std::pair<std::string, std::string>> ends(const Arg& a) {
    if (!a.is_lit() || a.lit->pred != "Line" || a.lit->arity() != 2 || !ids_only(*a.lit)) return std::nullopt;
    return std::make_pair(a.lit->arg(0).text, a.lit->arg(1).text);
}

std::optional<std::string> center(const Arg& a) {
    if (!a.is_lit() || a.lit->pred != "Circle" || a.lit->arity() < 1 || !a.lit->arg(0).is_id()) return std::nullopt;
    return a.lit->arg(0).text;
}

const Literal* sub_lit(const Arg& a) { return a.is_lit() ? a.lit.get() : nullptr; }

std::string join(const Pts& p) {
    std::string s;
    for (const auto& x : p) s += x;
    return s;
}

// Premises and conclusions of one instance under construction.
struct Build {
    std::vector<int> prem;
    std::vector<NodeSpec> conc;

    void need(int p) { prem.push_back(p); }
    void need(const std::vector<int>& ps) { prem.insert(prem.end(), ps.begin(), ps.end()); }
    void eq(const Expr& l, const Expr& r) {
        Equation e(l, r);
        if (!is_tautology(e)) conc.push_back(eq_spec(e));
    }
    void atoms(const Expr& a, const Expr& b) {
        if (a->key != b->key) conc.push_back(eq_spec(atom_equation(a, b)));
    }
    void lit(const Literal& l) { conc.push_back(node_spec(canonicalize(l))); }
};

// A point-built figure that repeats a point.
bool degenerate(const Literal& l) {
    bool bad = false;
    walk(l, [&](const Literal& x) {
        if (x.pred != "Line" && x.pred != "Angle" && x.pred != "Arc" && x.pred != "Sector" && !is_polygon_pred(x.pred)) return;
        auto v = x.ids();
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end()) bad = true;
    });
    return bad;
}

void emit(std::vector<Instance>& out, const std::string& th, Build b) {
    std::sort(b.prem.begin(), b.prem.end());
    b.prem.erase(std::unique(b.prem.begin(), b.prem.end()), b.prem.end());
    if (b.prem.empty() || b.conc.empty()) return;
    for (const auto& c : b.conc)
        if (degenerate(c.lit)) return;
    std::stable_sort(b.conc.begin(), b.conc.end(),
                     [](const NodeSpec& x, const NodeSpec& y) { return x.lit.str() < y.lit.str(); });
    std::vector<NodeSpec> uniq;
    std::set<std::string> seen;
    for (auto& c : b.conc)
        if (seen.insert(c.key).second) uniq.push_back(std::move(c));
    out.push_back({th, std::move(b.prem), std::move(uniq)});
}

bool same_ray(const GeometrySketch& s, const std::string& v, const std::string& p, const std::string& x) {
    return p == x || s.between(v, p, x) || s.between(v, x, p);
}

// Points other than v on the chain through v and x, grouped into the two rays from v.
std::vector<Pts> rays_at(const GeometrySketch& s, const Chain& ch, const std::string& v) {
    std::vector<Pts> rays;
    for (const auto& p : ch.order) {
        if (p == v) continue;
        bool placed = false;
        for (auto& r : rays)
            if (same_ray(s, v, p, r[0])) {
                r.push_back(p);
                placed = true;
                break;
            }
        if (!placed) rays.push_back({p});
    }
    return rays;
}

// Triangles of the index plus their Triangle node, if any.
struct TriRef {
    Tri t;
    std::optional<int> node;
};

std::vector<TriRef> all_triangles(const FactIndex& idx) {
    std::vector<TriRef> out;
    for (const auto& t : idx.triangles()) out.push_back({t, idx.node_of(poly_lit("Triangle", {t[0], t[1], t[2]}))});
    return out;
}

// Node proving the angle at c of triangle (a, c, b) is right.
std::optional<std::vector<int>> right_angle(const FactIndex& idx, const std::string& a, const std::string& c,
                                            const std::string& b) {
    const auto& s = idx.sketch();
    int ca = s.chain_of(c, a), cb = s.chain_of(c, b);
    if (ca < 0 || cb < 0 || ca == cb) return std::nullopt;
    for (int n : idx.with_pred("Perpendicular")) {
        const Literal& l = idx.literal(n);
        auto e1 = ends(l.arg(0)), e2 = ends(l.arg(1));
        if (!e1 || !e2) continue;
        int x = s.chain_of(e1->first, e1->second), y = s.chain_of(e2->first, e2->second);
        if ((x == ca && y == cb) || (x == cb && y == ca)) return std::vector<int>{n};
    }
    if (auto v = idx.value(ang(a, c, b)); v && v->second.approx_equal(Number(90))) return std::vector<int>{v->first};
    return std::nullopt;
}

// Premise for a formula over a figure: the figure's node, else the node mentioning the quantity.
std::optional<int> formula_anchor(const FactIndex& idx, const std::string& q, const Literal& fig) {
    if (!idx.mention(q) && !idx.wanted().count(q)) return std::nullopt;
    if (auto n = idx.node_of(fig)) return n;
    if (auto n = idx.containing(fig)) return n;
    return idx.mention(q);
}

const std::array<std::array<int, 3>, 6> kPerms = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

std::string angle_at(const Tri& t, int i) { return ang(t[(i + 1) % 3], t[i], t[(i + 2) % 3]); }
std::string side_after(const Tri& t, int i) { return len(t[i], t[(i + 1) % 3]); }

Tri permuted(const Tri& t, const std::array<int, 3>& p) { return {t[p[0]], t[p[1]], t[p[2]]}; }

bool same_set(Tri a, Tri b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// Runs `f` over ordered triangle pairs (i < j) and all vertex correspondences.
void triangle_pairs(const FactIndex& idx, const std::function<void(const Tri&, const Tri&)>& f) {
    const auto& ts = idx.triangles();
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j) {
            if (same_set(ts[i], ts[j])) continue;
            for (const auto& p : kPerms) f(ts[i], permuted(ts[j], p));
        }
}

Literal pair_lit(const std::string& pred, const Tri& a, const Tri& b) {
    return mk(pred, {Arg::sub(Literal::app("Triangle", {Arg::id(a[0]), Arg::id(a[1]), Arg::id(a[2])})),
                     Arg::sub(Literal::app("Triangle", {Arg::id(b[0]), Arg::id(b[1]), Arg::id(b[2])}))});
}

// ---------------------------------------------------------------------------
// Rules

using Matcher = std::function<void(const FactIndex&, std::vector<Instance>&)>;

struct Rule {
    TheoremInfo info;
    Matcher fn;
};

void segment_split(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& ch : s.lines) {
        const auto& o = ch.order;
        for (size_t i = 0; i < o.size(); ++i)
            for (size_t j = i + 1; j < o.size(); ++j)
                for (size_t k = j + 1; k < o.size(); ++k) {
                    auto ev = idx.between_evidence(o[i], o[j], o[k]);
                    if (!ev) continue;
                    Build b;
                    b.need(*ev);
                    b.eq(L(o[i], o[k]), L(o[i], o[j]) + L(o[j], o[k]));
                    emit(out, "Line Segment Split", b);
                }
    }
}

// One ray shrinks per step: the ray written first in the canonical angle when it can shrink, else the other.
void same_angle(const FactIndex& idx, std::vector<Instance>& out, const std::vector<std::pair<std::string, int>>& angs) {
    const auto& s = idx.sketch();
    for (const auto& [name, node] : angs) {
        auto q = quantity_literal(name);
        if (!q || q->pred != "MeasureOf" || !q->arg(0).is_lit()) continue;
        const Literal& fig = *q->arg(0).lit;
        if (fig.pred != "Angle" || fig.arity() != 3 || !ids_only(fig)) continue;
        auto id = fig.ids();
        const std::string& v = id[1];
        for (int side : {0, 2}) {
            const std::string& x = id[side];
            const std::string& y = id[2 - side];
            int c = s.chain_of(v, x);
            if (c < 0) continue;
            Pts inner;
            for (const auto& p : s.lines[c].order)
                if (p != x && p != v && s.between(v, p, x)) inner.push_back(p);
            if (inner.empty()) continue;
            for (const auto& p : inner) {
                auto ev = idx.between_evidence(v, p, x);
                if (!ev) continue;
                Build b;
                b.need(node);
                b.need(*ev);
                b.atoms(A(x, v, y), A(p, v, y));
                emit(out, "Same Angle", b);
            }
            break;
        }
    }
}

void vertical_angles(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (size_t i = 0; i < s.lines.size(); ++i)
        for (size_t j = i + 1; j < s.lines.size(); ++j) {
            const Chain &c1 = s.lines[i], &c2 = s.lines[j];
            for (const auto& v : c1.order) {
                if (!c2.has(v)) continue;
                auto r1 = rays_at(s, c1, v), r2 = rays_at(s, c2, v);
                if (r1.size() != 2 || r2.size() != 2) continue;
                for (const auto& a1 : r1[0])
                    for (const auto& b1 : r1[1])
                        for (const auto& a2 : r2[0])
                            for (const auto& b2 : r2[1]) {
                                auto e1 = idx.between_evidence(a1, v, b1), e2 = idx.between_evidence(a2, v, b2);
                                if (!e1 || !e2) continue;
                                Build b;
                                b.need(*e1);
                                b.need(*e2);
                                if (idx.mention(ang(a1, v, a2)) || idx.mention(ang(b1, v, b2)))
                                    b.atoms(A(a1, v, a2), A(b1, v, b2));
                                if (idx.mention(ang(a1, v, b2)) || idx.mention(ang(b1, v, a2)))
                                    b.atoms(A(a1, v, b2), A(b1, v, a2));
                                emit(out, "Vertical Angles", b);
                            }
            }
        }
}

void linear_pair(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& ch : s.lines)
        for (const auto& v : ch.order) {
            auto rs = rays_at(s, ch, v);
            if (rs.size() != 2) continue;
            for (const auto& d : s.points) {
                if (ch.has(d) || s.chain_of(v, d) < 0) continue;
                for (const auto& a : rs[0])
                    for (const auto& c : rs[1]) {
                        auto ma = idx.mention(ang(a, v, d)), mc = idx.mention(ang(d, v, c));
                        if (!ma && !mc) continue;
                        auto ev = idx.between_evidence(a, v, c);
                        if (!ev) continue;
                        Build b;
                        b.need(*ev);
                        if (ev->empty()) b.need(ma ? *ma : *mc);
                        b.eq(A(a, v, d) + A(d, v, c), num(180));
                        emit(out, "Linear Pair", b);
                    }
            }
        }
}

// Ray VD strictly inside angle AVB, taken from the sketch's sidedness.
void angle_addition(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& v : s.points) {
        Pts nb;
        for (const auto& p : s.points)
            if (p != v && s.chain_of(v, p) >= 0) nb.push_back(p);
        for (const auto& a : nb)
            for (const auto& c : nb) {
                if (!(a < c) || s.collinear(a, v, c)) continue;
                for (const auto& d : nb) {
                    if (d == a || d == c || s.collinear(a, v, d) || s.collinear(c, v, d)) continue;
                    if (s.side(v, a, d, c) != 1 || s.side(v, c, d, a) != 1) continue;
                    std::vector<int> ms;
                    for (const auto& q : {ang(a, v, c), ang(a, v, d), ang(d, v, c)})
                        if (auto m = idx.mention(q)) ms.push_back(*m);
                    if (ms.size() < 2) continue;
                    Build b;
                    b.need(ms);
                    b.eq(A(a, v, c), A(a, v, d) + A(d, v, c));
                    emit(out, "Angle Addition", b);
                }
            }
    }
}

void perpendicular_angle(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (int n : idx.with_pred("Perpendicular")) {
        const Literal& l = idx.literal(n);
        auto e1 = ends(l.arg(0)), e2 = ends(l.arg(1));
        if (!e1 || !e2) continue;
        int c1 = s.chain_of(e1->first, e1->second), c2 = s.chain_of(e2->first, e2->second);
        if (c1 < 0 || c2 < 0 || c1 == c2) continue;
        Pts common;
        for (const auto& p : s.lines[c1].order)
            if (s.lines[c2].has(p)) common.push_back(p);
        if (common.size() != 1) continue;
        const std::string& x = common[0];
        Build b;
        b.need(n);
        for (const auto& p : s.lines[c1].order)
            for (const auto& q : s.lines[c2].order) {
                if (p == x || q == x) continue;
                bool literal_ends = (p == e1->first || p == e1->second) && (q == e2->first || q == e2->second);
                if (literal_ends || idx.mention(ang(p, x, q))) b.eq(A(p, x, q), num(90));
            }
        emit(out, "Perpendicular Angle", b);
    }
}

enum class ParallelKind { Corresponding, Alternate, Consecutive };

void parallel_family(const FactIndex& idx, std::vector<Instance>& out, ParallelKind kind, const std::string& name) {
    const auto& s = idx.sketch();
    for (int n : idx.with_pred("Parallel")) {
        const Literal& l = idx.literal(n);
        auto e1 = ends(l.arg(0)), e2 = ends(l.arg(1));
        if (!e1 || !e2) continue;
        int c1 = s.chain_of(e1->first, e1->second), c2 = s.chain_of(e2->first, e2->second);
        if (c1 < 0 || c2 < 0 || c1 == c2) continue;
        const Chain &l1 = s.lines[c1], &l2 = s.lines[c2];
        Build b;
        b.need(n);
        for (size_t t = 0; t < s.lines.size(); ++t) {
            if (static_cast<int>(t) == c1 || static_cast<int>(t) == c2) continue;
            const Chain& tr = s.lines[t];
            Pts m1, m2;
            for (const auto& p : tr.order) {
                if (l1.has(p)) m1.push_back(p);
                if (l2.has(p)) m2.push_back(p);
            }
            if (m1.size() != 1 || m2.size() != 1 || m1[0] == m2[0]) continue;
            const std::string &x1 = m1[0], &x2 = m2[0];
            for (const auto& y1 : l1.order)
                for (const auto& y2 : l2.order) {
                    if (y1 == x1 || y2 == x2) continue;
                    int sd = s.side(x1, x2, y1, y2);
                    if (sd == 0) continue;
                    switch (kind) {
                        case ParallelKind::Corresponding:
                            if (sd != 1) break;
                            for (const auto& a : tr.order) {
                                if (s.between(a, x1, x2)) b.atoms(A(a, x1, y1), A(a, x2, y2));
                                if (s.between(x1, x2, a)) b.atoms(A(a, x2, y2), A(a, x1, y1));
                            }
                            break;
                        case ParallelKind::Alternate:
                            if (sd == -1) b.atoms(A(x2, x1, y1), A(x1, x2, y2));
                            break;
                        case ParallelKind::Consecutive:
                            if (sd == 1) b.eq(A(x2, x1, y1) + A(x1, x2, y2), num(180));
                            break;
                    }
                }
        }
        emit(out, name, b);
    }
}

void triangle_angle_sum(const FactIndex& idx, std::vector<Instance>& out) {
    for (const auto& tr : all_triangles(idx)) {
        const Tri& t = tr.t;
        Build b;
        if (tr.node) {
            b.need(*tr.node);
        } else {
            std::vector<int> ms;
            for (int i = 0; i < 3; ++i)
                if (auto m = idx.mention(angle_at(t, i))) ms.push_back(*m);
            if (ms.size() < 2) continue;
            b.need(ms);
        }
        b.eq(var(angle_at(t, 0)) + var(angle_at(t, 1)) + var(angle_at(t, 2)), num(180));
        emit(out, "Triangle Angle Sum Theorem", b);
    }
}

void polygon_angle_sum(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n = 0; n < static_cast<int>(idx.size()); ++n) {
        Pts v = vertices(idx.literal(n));
        if (v.size() < 4) continue;
        size_t k = v.size();
        std::vector<Expr> xs;
        for (size_t i = 0; i < k; ++i) xs.push_back(A(v[(i + k - 1) % k], v[i], v[(i + 1) % k]));
        Build b;
        b.need(n);
        b.eq(add(xs), num(static_cast<long long>((k - 2) * 180)));
        emit(out, "Polygon Angle Sum Theorem", b);
    }
}

void isosceles(const FactIndex& idx, std::vector<Instance>& out, bool converse) {
    for (const auto& tr : all_triangles(idx))
        for (int i = 0; i < 3; ++i) {
            const std::string &a = tr.t[i], &b1 = tr.t[(i + 1) % 3], &c = tr.t[(i + 2) % 3];
            auto ev = converse ? idx.equal_evidence(ang(a, b1, c), ang(a, c, b1)) : idx.equal_evidence(len(a, b1), len(a, c));
            if (!ev || ev->empty()) continue;
            Build b;
            b.need(*ev);
            if (tr.node) b.need(*tr.node);
            if (converse)
                b.atoms(L(a, b1), L(a, c));
            else
                b.atoms(A(a, b1, c), A(a, c, b1));
            emit(out, converse ? "Isosceles Triangle Converse" : "Isosceles Triangle Theorem", b);
        }
}

void equilateral(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("Equilateral")) {
        const Literal* t = sub_lit(idx.literal(n).arg(0));
        if (!t) continue;
        Pts v = vertices(*t);
        if (v.size() != 3) continue;
        Build b;
        b.need(n);
        b.atoms(L(v[0], v[1]), L(v[1], v[2]));
        b.atoms(L(v[1], v[2]), L(v[2], v[0]));
        for (int i = 0; i < 3; ++i) b.eq(A(v[(i + 2) % 3], v[i], v[(i + 1) % 3]), num(60));
        emit(out, "Equilateral Triangle Property", b);
    }
}

void pythagorean(const FactIndex& idx, std::vector<Instance>& out) {
    for (const auto& tr : all_triangles(idx))
        for (int i = 0; i < 3; ++i) {
            const std::string &c = tr.t[i], &a = tr.t[(i + 1) % 3], &b1 = tr.t[(i + 2) % 3];
            auto ev = right_angle(idx, a, c, b1);
            if (!ev) continue;
            Build b;
            b.need(*ev);
            if (tr.node) b.need(*tr.node);
            b.eq(pow(L(a, c), num(2)) + pow(L(b1, c), num(2)), pow(L(a, b1), num(2)));
            emit(out, "Pythagorean Theorem", b);
        }
}

void pythagorean_converse(const FactIndex& idx, std::vector<Instance>& out) {
    for (const auto& tr : all_triangles(idx))
        for (int i = 0; i < 3; ++i) {
            const std::string &c = tr.t[i], &a = tr.t[(i + 1) % 3], &b1 = tr.t[(i + 2) % 3];
            auto va = idx.value(len(a, c)), vb = idx.value(len(b1, c)), vc = idx.value(len(a, b1));
            if (!va || !vb || !vc) continue;
            if (!(va->second * va->second + vb->second * vb->second).approx_equal(vc->second * vc->second)) continue;
            Build b;
            b.need({va->first, vb->first, vc->first});
            b.eq(A(a, c, b1), num(90));
            emit(out, "Pythagorean Converse", b);
        }
}

void aa_similarity(const FactIndex& idx, std::vector<Instance>& out) {
    triangle_pairs(idx, [&](const Tri& t1, const Tri& t2) {
        Build b;
        for (int i = 0; i < 3; ++i) {
            auto ev = idx.equal_evidence(angle_at(t1, i), angle_at(t2, i));
            if (!ev) return;
            b.need(*ev);
        }
        b.lit(pair_lit("Similar", t1, t2));
        emit(out, "Angle-Angle Similarity Theorem", b);
    });
}

std::optional<Number> ratio(const FactIndex& idx, const std::string& a, const std::string& b, std::vector<int>& prem) {
    auto va = idx.value(a), vb = idx.value(b);
    if (!va || !vb || vb->second.is_zero()) return std::nullopt;
    prem.push_back(va->first);
    prem.push_back(vb->first);
    return va->second / vb->second;
}

void sas_similarity(const FactIndex& idx, std::vector<Instance>& out) {
    triangle_pairs(idx, [&](const Tri& t1, const Tri& t2) {
        for (int i = 0; i < 3; ++i) {
            auto ev = idx.equal_evidence(angle_at(t1, i), angle_at(t2, i));
            if (!ev) continue;
            int j = (i + 2) % 3;
            std::vector<int> prem = *ev;
            auto r1 = ratio(idx, side_after(t1, i), side_after(t2, i), prem);
            auto r2 = ratio(idx, side_after(t1, j), side_after(t2, j), prem);
            if (!r1 || !r2 || !r1->approx_equal(*r2)) continue;
            Build b;
            b.need(prem);
            b.lit(pair_lit("Similar", t1, t2));
            emit(out, "Side-Angle-Side Similarity Theorem", b);
        }
    });
}

void sss_similarity(const FactIndex& idx, std::vector<Instance>& out) {
    triangle_pairs(idx, [&](const Tri& t1, const Tri& t2) {
        std::vector<int> prem;
        std::vector<Number> rs;
        for (int i = 0; i < 3; ++i) {
            auto r = ratio(idx, side_after(t1, i), side_after(t2, i), prem);
            if (!r) return;
            rs.push_back(*r);
        }
        if (!rs[0].approx_equal(rs[1]) || !rs[1].approx_equal(rs[2])) return;
        Build b;
        b.need(prem);
        b.lit(pair_lit("Similar", t1, t2));
        emit(out, "Side-Side-Side Similarity Theorem", b);
    });
}

std::string ratio_name(const Literal& sim) {
    return "sim_ratio_" + join(sim.arg(0).lit->ids()) + "_" + join(sim.arg(1).lit->ids());
}

void correspondence_definition(const FactIndex& idx, std::vector<Instance>& out, bool similar) {
    for (int n : idx.with_pred(similar ? "Similar" : "Congruent")) {
        const Literal& l = idx.literal(n);
        const Literal *f1 = sub_lit(l.arg(0)), *f2 = sub_lit(l.arg(1));
        if (!f1 || !f2) continue;
        Pts a = vertices(*f1), c = vertices(*f2);
        if (a.size() < 3 || a.size() != c.size()) continue;
        size_t k = a.size();
        Build b;
        b.need(n);
        for (size_t i = 0; i < k; ++i) {
            size_t j = (i + 1) % k, h = (i + k - 1) % k;
            if (similar)
                b.eq(var(ratio_name(l)), L(a[i], a[j]) / L(c[i], c[j]));
            else
                b.atoms(L(a[i], a[j]), L(c[i], c[j]));
            b.atoms(A(a[h], a[i], a[j]), A(c[h], c[i], c[j]));
        }
        emit(out, similar ? "Similar Definition" : "Congruent Definition", b);
    }
}

// Congruence tests over side/angle evidence; `pattern` lists (is_angle, index) checks.
void congruence(const FactIndex& idx, std::vector<Instance>& out, const std::string& name,
                const std::vector<std::vector<std::pair<bool, int>>>& patterns) {
    triangle_pairs(idx, [&](const Tri& t1, const Tri& t2) {
        for (const auto& pat : patterns) {
            Build b;
            bool ok = true;
            for (auto [is_angle, i] : pat) {
                auto ev = is_angle ? idx.equal_evidence(angle_at(t1, i), angle_at(t2, i))
                                   : idx.equal_evidence(side_after(t1, i), side_after(t2, i));
                if (!ev) {
                    ok = false;
                    break;
                }
                b.need(*ev);
            }
            if (!ok) continue;
            b.lit(pair_lit("Congruent", t1, t2));
            emit(out, name, b);
        }
    });
}

void angle_bisector(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("BisectsAngle")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(0));
        const Literal* a = sub_lit(l.arg(1));
        if (!e || !a || a->pred != "Angle" || a->arity() != 3 || !ids_only(*a)) continue;
        auto id = a->ids();
        const std::string& v = id[1];
        std::string d = e->first == v ? e->second : e->second == v ? e->first : "";
        if (d.empty()) continue;
        Build b;
        b.need(n);
        b.atoms(A(id[0], v, d), A(d, v, id[2]));
        emit(out, "Angle Bisector Definition", b);
    }
}

void midpoint(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("IsMidpointOf")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(1));
        if (!l.arg(0).is_id() || !e) continue;
        const std::string& m = l.arg(0).text;
        Build b;
        b.need(n);
        b.atoms(L(e->first, m), L(m, e->second));
        emit(out, "Midpoint Definition", b);
    }
}

void perpendicular_bisector(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (int n : idx.with_pred("IsPerpendicularBisectorOf")) {
        const Literal& l = idx.literal(n);
        auto bis = ends(l.arg(0)), seg = ends(l.arg(1));
        if (!bis || !seg) continue;
        const auto& [a, c] = *seg;
        Pts line = s.line_points(bis->first, bis->second);
        std::string m;
        for (const auto& p : line)
            if (s.between(a, p, c)) m = p;
        Build b;
        b.need(n);
        b.lit(mk("Perpendicular", {l.arg(0), l.arg(1)}));
        if (!m.empty()) b.atoms(L(a, m), L(m, c));
        for (const auto& p : line)
            if (p != m && p != a && p != c && (idx.mention(len(p, a)) || idx.mention(len(p, c)))) b.atoms(L(p, a), L(p, c));
        emit(out, "Perpendicular Bisector Theorem", b);
    }
}

void median(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("IsMedianOf")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(0));
        const Literal* t = sub_lit(l.arg(1));
        if (!e || !t) continue;
        Pts v = vertices(*t);
        if (v.size() != 3) continue;
        for (int flip = 0; flip < 2; ++flip) {
            std::string top = flip ? e->second : e->first, m = flip ? e->first : e->second;
            auto it = std::find(v.begin(), v.end(), top);
            if (it == v.end() || std::count(v.begin(), v.end(), m)) continue;
            Pts rest;
            for (const auto& x : v)
                if (x != top) rest.push_back(x);
            Build b;
            b.need(n);
            b.atoms(L(rest[0], m), L(m, rest[1]));
            emit(out, "Median Definition", b);
        }
    }
}

// Side of polygon `v` whose open segment contains p.
std::optional<size_t> side_holding(const GeometrySketch& s, const Pts& v, const std::string& p) {
    for (size_t i = 0; i < v.size(); ++i)
        if (s.between(v[i], p, v[(i + 1) % v.size()])) return i;
    return std::nullopt;
}

void midsegment(const FactIndex& idx, std::vector<Instance>& out, bool trapezoid) {
    const auto& s = idx.sketch();
    for (const char* pred : {"IsMidsegmentOf", "IsMedianOf"}) {
        for (int n : idx.with_pred(pred)) {
            const Literal& l = idx.literal(n);
            auto e = ends(l.arg(0));
            const Literal* f = sub_lit(l.arg(1));
            if (!e || !f) continue;
            Pts v = vertices(*f);
            if (v.size() != (trapezoid ? 4u : 3u)) continue;
            if (std::string(pred) == "IsMedianOf" && !trapezoid) continue;
            auto i = side_holding(s, v, e->first), j = side_holding(s, v, e->second);
            if (!i || !j || *i == *j) continue;
            size_t k = v.size();
            Build b;
            b.need(n);
            for (auto [sd, p] : {std::make_pair(*i, e->first), std::make_pair(*j, e->second)})
                b.atoms(L(v[sd], p), L(p, v[(sd + 1) % k]));
            std::vector<size_t> others;
            for (size_t x = 0; x < k; ++x)
                if (x != *i && x != *j) others.push_back(x);
            if (trapezoid) {
                if (others.size() != 2) continue;
                const auto &u = others[0], &w = others[1];
                b.eq(L(e->first, e->second), (L(v[u], v[(u + 1) % k]) + L(v[w], v[(w + 1) % k])) / num(2));
            } else {
                size_t u = others[0];
                b.eq(L(e->first, e->second), L(v[u], v[(u + 1) % k]) / num(2));
                b.lit(mk("Parallel", {Arg::sub(line_lit(e->first, e->second)), Arg::sub(line_lit(v[u], v[(u + 1) % k]))}));
            }
            emit(out, trapezoid ? "Trapezoid Median Theorem" : "Triangle Midsegment Theorem", b);
        }
    }
}

void quad_rule(const FactIndex& idx, std::vector<Instance>& out, const std::string& pred, const std::string& name,
               const std::function<void(const Pts&, Build&)>& body) {
    for (int n : idx.with_pred(pred)) {
        Pts v = vertices(idx.literal(n));
        if (v.size() != 4) continue;
        Build b;
        b.need(n);
        body(v, b);
        emit(out, name, b);
    }
}

Literal par(const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    return mk("Parallel", {Arg::sub(line_lit(a, b)), Arg::sub(line_lit(c, d))});
}
Literal perp(const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    return mk("Perpendicular", {Arg::sub(line_lit(a, b)), Arg::sub(line_lit(c, d))});
}

void parallelogram_diagonals(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (int n : idx.with_pred("Parallelogram")) {
        Pts v = vertices(idx.literal(n));
        if (v.size() != 4) continue;
        for (const auto& e : s.points) {
            auto ea = idx.between_evidence(v[0], e, v[2]), eb = idx.between_evidence(v[1], e, v[3]);
            if (!ea || !eb) continue;
            Build b;
            b.need(n);
            b.need(*ea);
            b.need(*eb);
            b.atoms(L(v[0], e), L(e, v[2]));
            b.atoms(L(v[1], e), L(e, v[3]));
            emit(out, "Parallelogram Diagonals Theorem", b);
        }
    }
}

void regular_polygon(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("Regular")) {
        const Literal* p = sub_lit(idx.literal(n).arg(0));
        if (!p) continue;
        Pts v = vertices(*p);
        size_t k = v.size();
        if (k < 3) continue;
        Build b;
        b.need(n);
        for (size_t i = 0; i + 1 < k; ++i) b.atoms(L(v[i], v[i + 1]), L(v[(i + 1) % k], v[(i + 2) % k]));
        for (size_t i = 0; i < k; ++i)
            b.eq(A(v[(i + k - 1) % k], v[i], v[(i + 1) % k]), num(Number(Rat(static_cast<long long>((k - 2) * 180), static_cast<long long>(k)))));
        emit(out, "Regular Polygon Property", b);
    }
}

// PointLiesOnCircle node placing p on the circle centered at c.
std::optional<int> on_circle_node(const FactIndex& idx, const std::string& p, const std::string& c) {
    for (int n : idx.with_pred("PointLiesOnCircle")) {
        const Literal& l = idx.literal(n);
        if (l.arg(0).is_id() && l.arg(0).text == p && center(l.arg(1)) == c) return n;
    }
    return std::nullopt;
}

void radius_definition(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& [c, info] : s.circles) {
        for (const auto& p : info.points) {
            auto n = on_circle_node(idx, p, c);
            if (!n) continue;
            Build b;
            b.need(*n);
            b.eq(L(c, p), R(c));
            emit(out, "Radius Definition", b);
        }
        if (info.radius) {
            Literal fig = mk("Circle", {Arg::id(c), *info.radius});
            auto n = idx.containing(fig);
            if (!n) continue;
            Build b;
            b.need(*n);
            b.eq(R(c), to_expr(*info.radius));
            emit(out, "Radius Definition", b);
        }
    }
    for (int n : idx.with_pred("IsRadiusOf")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(0));
        auto c = center(l.arg(1));
        if (!e || !c) continue;
        Build b;
        b.need(n);
        b.eq(L(e->first, e->second), R(*c));
        emit(out, "Radius Definition", b);
    }
}

void diameter_definition(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("IsDiameterOf")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(0));
        auto c = center(l.arg(1));
        if (!e || !c) continue;
        Build b;
        b.need(n);
        b.eq(L(e->first, e->second), num(2) * R(*c));
        b.eq(L(*c, e->first), R(*c));
        b.eq(L(*c, e->second), R(*c));
        emit(out, "Diameter Definition", b);
    }
    for (const auto& [c, info] : idx.sketch().circles) {
        std::string d = qname("DiameterOf", circle_lit(c));
        auto n = formula_anchor(idx, d, circle_lit(c));
        if (!n) continue;
        Build b;
        b.need(*n);
        b.eq(var(d), num(2) * R(c));
        emit(out, "Diameter Definition", b);
    }
}

void thales(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("IsDiameterOf")) {
        const Literal& l = idx.literal(n);
        auto e = ends(l.arg(0));
        auto c = center(l.arg(1));
        if (!e || !c) continue;
        for (const auto& p : idx.sketch().on_circle(*c)) {
            if (p == e->first || p == e->second) continue;
            auto m = on_circle_node(idx, p, *c);
            if (!m) continue;
            Build b;
            b.need({n, *m});
            b.eq(A(e->first, p, e->second), num(90));
            emit(out, "Thales Theorem", b);
        }
    }
}

void inscribed_angle(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& [o, info] : s.circles) {
        Pts on(info.points.begin(), info.points.end());
        for (const auto& a : on)
            for (const auto& c : on) {
                if (!(a < c)) continue;
                for (const auto& p : on) {
                    if (p == a || p == c) continue;
                    auto m = idx.mention(ang(a, p, c));
                    if (!m) continue;
                    int sd = s.side(a, c, p, o);
                    if (sd == 0) continue;
                    std::vector<int> prem{*m};
                    bool ok = true;
                    for (const auto& x : {a, c, p}) {
                        auto k = on_circle_node(idx, x, o);
                        if (!k) ok = false;
                        else prem.push_back(*k);
                    }
                    if (!ok) continue;
                    Build b;
                    b.need(prem);
                    Expr half = A(a, o, c) / num(2);
                    b.eq(A(a, p, c), sd == 1 ? half : num(180) - half);
                    emit(out, "Inscribed Angle Theorem", b);
                }
            }
    }
}

void central_angle(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& [o, info] : s.circles) {
        Pts on(info.points.begin(), info.points.end());
        for (const auto& a : on)
            for (const auto& c : on) {
                if (!(a < c)) continue;
                std::string arc = qname("MeasureOf", mk("Arc", {Arg::id(a), Arg::id(c)}));
                auto m = idx.mention(arc);
                if (!m) continue;
                Build b;
                b.need(*m);
                b.eq(var(arc), A(a, o, c));
                emit(out, "Central Angle Theorem", b);
            }
    }
}

// Tangency point of a tangent line: the endpoint lying on the circle.
std::optional<std::pair<std::string, std::string>> tangency(const FactIndex& idx, const Literal& l) {
    auto e = ends(l.arg(0));
    auto c = center(l.arg(1));
    if (!e || !c) return std::nullopt;
    auto on = idx.sketch().on_circle(*c);
    if (on.count(e->second) && !on.count(e->first)) return std::make_pair(e->first, e->second);
    if (on.count(e->first) && !on.count(e->second)) return std::make_pair(e->second, e->first);
    return std::nullopt;
}

void tangent_radius(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n : idx.with_pred("Tangent")) {
        const Literal& l = idx.literal(n);
        auto t = tangency(idx, l);
        if (!t) continue;
        std::string c = *center(l.arg(1));
        Build b;
        b.need(n);
        b.lit(perp(c, t->second, t->first, t->second));
        b.eq(A(c, t->second, t->first), num(90));
        emit(out, "Tangent Radius Theorem", b);
    }
}

void tangent_segments(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& ts = idx.with_pred("Tangent");
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j) {
            const Literal &l1 = idx.literal(ts[i]), &l2 = idx.literal(ts[j]);
            auto t1 = tangency(idx, l1), t2 = tangency(idx, l2);
            if (!t1 || !t2 || center(l1.arg(1)) != center(l2.arg(1))) continue;
            if (t1->first != t2->first || t1->second == t2->second) continue;
            Build b;
            b.need({ts[i], ts[j]});
            b.atoms(L(t1->first, t1->second), L(t2->first, t2->second));
            emit(out, "Tangent Segments Theorem", b);
        }
}

void chord_bisector(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (int n : idx.with_pred("Perpendicular")) {
        const Literal& l = idx.literal(n);
        for (int k = 0; k < 2; ++k) {
            auto radial = ends(l.arg(k)), chord = ends(l.arg(1 - k));
            if (!radial || !chord) continue;
            Pts rl = s.line_points(radial->first, radial->second);
            for (const auto& [o, info] : s.circles) {
                if (std::find(rl.begin(), rl.end(), o) == rl.end()) continue;
                Pts cl = s.line_points(chord->first, chord->second);
                Pts on;
                for (const auto& p : cl)
                    if (info.points.count(p)) on.push_back(p);
                if (on.size() != 2) continue;
                for (const auto& m : rl) {
                    auto ev = idx.between_evidence(on[0], m, on[1]);
                    if (!ev) continue;
                    Build b;
                    b.need(n);
                    b.need(*ev);
                    b.atoms(L(on[0], m), L(m, on[1]));
                    emit(out, "Chord Bisector Theorem", b);
                }
            }
        }
    }
}

void circle_formula(const FactIndex& idx, std::vector<Instance>& out, const std::string& q, const std::string& name) {
    for (const auto& [c, info] : idx.sketch().circles) {
        std::string v = qname(q, circle_lit(c));
        auto n = formula_anchor(idx, v, circle_lit(c));
        if (!n) continue;
        Build b;
        b.need(*n);
        if (q == "CircumferenceOf")
            b.eq(var(v), num(2) * pi() * R(c));
        else
            b.eq(var(v), pi() * pow(R(c), num(2)));
        emit(out, name, b);
    }
}

void sector_area(const FactIndex& idx, std::vector<Instance>& out) {
    std::set<std::string> seen;
    auto visit = [&](const Literal& x) {
        if (x.pred != "Sector" || x.arity() != 3 || !ids_only(x) || !seen.insert(x.str()).second) return;
        auto id = x.ids();
        std::string v = qname("AreaOf", x);
        auto a = formula_anchor(idx, v, x);
        // A sector named only by the goal hangs off its circle.
        if (!a && idx.wanted().count(v)) a = idx.containing(circle_lit(id[0]));
        if (!a) return;
        Build b;
        b.need(*a);
        b.eq(var(v), A(id[1], id[0], id[2]) / num(360) * pi() * pow(R(id[0]), num(2)));
        emit(out, "Sector Area Formula", b);
    };
    for (int n = 0; n < static_cast<int>(idx.size()); ++n) walk(idx.literal(n), visit);
    for (const auto& w : idx.wanted())
        if (auto q = quantity_literal(w); q && q->pred == "AreaOf" && q->arg(0).is_lit()) visit(*q->arg(0).lit);
}

void triangle_area(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const auto& tr : all_triangles(idx)) {
        const Tri& t = tr.t;
        Literal fig = poly_lit("Triangle", {t[0], t[1], t[2]});
        std::string v = qname("AreaOf", fig);
        auto anchor = formula_anchor(idx, v, fig);
        if (!anchor) continue;
        for (int i = 0; i < 3; ++i) {
            const std::string &c = t[i], &a = t[(i + 1) % 3], &b1 = t[(i + 2) % 3];
            if (auto ev = right_angle(idx, a, c, b1)) {
                Build b;
                b.need(*anchor);
                b.need(*ev);
                b.eq(var(v), L(a, c) * L(b1, c) / num(2));
                emit(out, "Triangle Area Formula", b);
            }
            // Altitude from c to a foot h on line ab.
            int base = s.chain_of(a, b1);
            if (base < 0) continue;
            for (int n : idx.with_pred("Perpendicular")) {
                const Literal& l = idx.literal(n);
                for (int k = 0; k < 2; ++k) {
                    auto alt = ends(l.arg(k)), other = ends(l.arg(1 - k));
                    if (!alt || !other || s.chain_of(other->first, other->second) != base) continue;
                    std::string h = alt->first == c ? alt->second : alt->second == c ? alt->first : "";
                    if (h.empty() || h == a || h == b1 || !s.lines[base].has(h)) continue;
                    Build b;
                    b.need({*anchor, n});
                    b.eq(var(v), L(a, b1) * L(c, h) / num(2));
                    emit(out, "Triangle Area Formula", b);
                }
            }
        }
    }
}

void quad_area(const FactIndex& idx, std::vector<Instance>& out) {
    const auto& s = idx.sketch();
    for (const char* pred : {"Rectangle", "Square", "Rhombus", "Parallelogram", "Trapezoid"})
        for (int n : idx.with_pred(pred)) {
            Pts v = vertices(idx.literal(n));
            if (v.size() != 4) continue;
            std::string area = qname("AreaOf", idx.literal(n));
            if (!idx.mention(area) && !idx.wanted().count(area)) continue;
            std::string p = pred;
            if (p == "Rectangle" || p == "Square") {
                Build b;
                b.need(n);
                b.eq(var(area), L(v[0], v[1]) * L(v[1], v[2]));
                emit(out, "Rectangle Area Formula", b);
            }
            if (p == "Rhombus" || p == "Square") {
                Build b;
                b.need(n);
                b.eq(var(area), L(v[0], v[2]) * L(v[1], v[3]) / num(2));
                emit(out, "Rhombus Area Formula", b);
            }
            if (p != "Parallelogram" && p != "Trapezoid" && p != "Rhombus") continue;
            // Height: a perpendicular segment x-y joining the lines of two opposite sides.
            for (size_t i = 0; i < 2; ++i) {
                int c1 = s.chain_of(v[i], v[i + 1]), c2 = s.chain_of(v[i + 2], v[(i + 3) % 4]);
                if (c1 < 0 || c2 < 0) continue;
                std::optional<int> par_node;
                if (p == "Trapezoid") {
                    for (int m : idx.with_pred("Parallel")) {
                        const Literal& l = idx.literal(m);
                        auto e1 = ends(l.arg(0)), e2 = ends(l.arg(1));
                        if (!e1 || !e2) continue;
                        int x = s.chain_of(e1->first, e1->second), y = s.chain_of(e2->first, e2->second);
                        if ((x == c1 && y == c2) || (x == c2 && y == c1)) par_node = m;
                    }
                    if (!par_node) continue;
                }
                for (int m : idx.with_pred("Perpendicular")) {
                    const Literal& l = idx.literal(m);
                    for (int k = 0; k < 2; ++k) {
                        auto h = ends(l.arg(k)), base = ends(l.arg(1 - k));
                        if (!h || !base) continue;
                        int bc = s.chain_of(base->first, base->second);
                        if (bc != c1 && bc != c2) continue;
                        const Chain &x = s.lines[c1], &y = s.lines[c2];
                        bool spans = (x.has(h->first) && y.has(h->second)) || (x.has(h->second) && y.has(h->first));
                        if (!spans) continue;
                        Build b;
                        b.need({n, m});
                        if (par_node) b.need(*par_node);
                        Expr hgt = L(h->first, h->second);
                        if (p == "Trapezoid") {
                            b.eq(var(area), (L(v[i], v[i + 1]) + L(v[i + 2], v[(i + 3) % 4])) * hgt / num(2));
                            emit(out, "Trapezoid Area Formula", b);
                        } else {
                            b.eq(var(area), L(v[i], v[i + 1]) * hgt);
                            emit(out, "Parallelogram Area Formula", b);
                        }
                    }
                }
            }
        }
}

void perimeter(const FactIndex& idx, std::vector<Instance>& out) {
    for (int n = 0; n < static_cast<int>(idx.size()); ++n) {
        const Literal& l = idx.literal(n);
        Pts v = vertices(l);
        if (v.size() < 3) continue;
        std::string p = qname("PerimeterOf", l);
        if (!idx.mention(p) && !idx.wanted().count(p)) continue;
        std::vector<Expr> xs;
        for (size_t i = 0; i < v.size(); ++i) xs.push_back(L(v[i], v[(i + 1) % v.size()]));
        Build b;
        b.need(n);
        b.eq(var(p), add(xs));
        emit(out, "Perimeter Definition", b);
    }
    for (const auto& tr : all_triangles(idx)) {
        if (tr.node) continue;
        Literal fig = poly_lit("Triangle", {tr.t[0], tr.t[1], tr.t[2]});
        std::string p = qname("PerimeterOf", fig);
        auto m = idx.mention(p);
        if (!m) continue;
        Build b;
        b.need(*m);
        b.eq(var(p), L(tr.t[0], tr.t[1]) + L(tr.t[1], tr.t[2]) + L(tr.t[2], tr.t[0]));
        emit(out, "Perimeter Definition", b);
    }
}

void trig_ratios(const FactIndex& idx, std::vector<Instance>& out) {
    for (const auto& tr : all_triangles(idx))
        for (int i = 0; i < 3; ++i) {
            const std::string &c = tr.t[i], &a = tr.t[(i + 1) % 3], &b1 = tr.t[(i + 2) % 3];
            auto ev = right_angle(idx, a, c, b1);
            if (!ev) continue;
            for (int flip = 0; flip < 2; ++flip) {
                const std::string& x = flip ? b1 : a;  // acute vertex
                const std::string& y = flip ? a : b1;
                auto m = idx.mention(ang(c, x, y));
                if (!m) continue;
                Build b;
                b.need(*ev);
                b.need(*m);
                Expr t = A(c, x, y);
                b.eq(func("sin", t), L(c, y) / L(x, y));
                b.eq(func("cos", t), L(c, x) / L(x, y));
                b.eq(func("tan", t), L(c, y) / L(c, x));
                emit(out, "Right Triangle Trigonometry", b);
            }
        }
}

// Restricts a matcher that serves several rules to one of them.
Matcher only(void (*fn)(const FactIndex&, std::vector<Instance>&), std::string name) {
    return [fn, name](const FactIndex& idx, std::vector<Instance>& out) {
        std::vector<Instance> all;
        fn(idx, all);
        for (auto& i : all)
            if (i.theorem == name) out.push_back(std::move(i));
    };
}

const std::vector<Rule>& rules() {
    static const std::vector<Rule> r = [] {
        std::vector<Rule> v;
        auto add_rule = [&](std::string name, std::string st, Matcher fn) {
            v.push_back({{std::move(name), std::move(st)}, std::move(fn)});
        };
        add_rule("Line Segment Split", "If M lies strictly between A and B, then AB = AM + MB.", segment_split);
        add_rule("Same Angle",
                 "If X' lies strictly between the vertex V and X, then angle XVY and angle X'VY are the same angle.",
                 [](const FactIndex& idx, std::vector<Instance>& out) {
                     std::vector<std::pair<std::string, int>> angs;
                     std::set<std::string> names;
                     for (size_t n = 0; n < idx.size(); ++n) {
                         const auto& eq = idx.equation(static_cast<int>(n));
                         std::set<std::string> vs;
                         if (eq) {
                             for (const auto& x : vars_of(eq->lhs)) vs.insert(x);
                             for (const auto& x : vars_of(eq->rhs)) vs.insert(x);
                         } else {
                             walk(idx.literal(static_cast<int>(n)), [&](const Literal& x) {
                                 if (x.pred == "Angle" && x.arity() == 3 && ids_only(x))
                                     vs.insert(qname("MeasureOf", x));
                             });
                         }
                         for (const auto& x : vs)
                             if (names.insert(x).second) angs.emplace_back(x, *idx.mention(x));
                     }
                     same_angle(idx, out, angs);
                 });
        add_rule("Vertical Angles", "Vertical angles formed by two crossing lines are equal.", vertical_angles);
        add_rule("Linear Pair", "Two adjacent angles whose outer sides form a straight line sum to 180 degrees.",
                 linear_pair);
        add_rule("Angle Addition", "If ray VD lies inside angle AVC, then angle AVC = angle AVD + angle DVC.",
                 angle_addition);
        add_rule("Perpendicular Angle", "Perpendicular lines meet at a right angle.", perpendicular_angle);
        add_rule("Corresponding Angle Theorem",
                 "A transversal of two parallel lines makes equal corresponding angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     parallel_family(i, o, ParallelKind::Corresponding, "Corresponding Angle Theorem");
                 });
        add_rule("Alternate Interior Angle Theorem",
                 "A transversal of two parallel lines makes equal alternate interior angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     parallel_family(i, o, ParallelKind::Alternate, "Alternate Interior Angle Theorem");
                 });
        add_rule("Consecutive Interior Angle Theorem",
                 "Interior angles on the same side of a transversal of two parallel lines sum to 180 degrees.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     parallel_family(i, o, ParallelKind::Consecutive, "Consecutive Interior Angle Theorem");
                 });
        add_rule("Triangle Angle Sum Theorem", "The interior angles of a triangle sum to 180 degrees.",
                 triangle_angle_sum);
        add_rule("Polygon Angle Sum Theorem", "The interior angles of a convex n-gon sum to (n-2)*180 degrees.",
                 polygon_angle_sum);
        add_rule("Isosceles Triangle Theorem", "Angles opposite equal sides of a triangle are equal.",
                 [](const FactIndex& i, std::vector<Instance>& o) { isosceles(i, o, false); });
        add_rule("Isosceles Triangle Converse", "Sides opposite equal angles of a triangle are equal.",
                 [](const FactIndex& i, std::vector<Instance>& o) { isosceles(i, o, true); });
        add_rule("Equilateral Triangle Property",
                 "An equilateral triangle has three equal sides and three 60 degree angles.", equilateral);
        add_rule("Pythagorean Theorem", "In a right triangle the squares of the legs sum to the square of the hypotenuse.",
                 pythagorean);
        add_rule("Pythagorean Converse",
                 "If the squares of two sides sum to the square of the third, the angle between them is right.",
                 pythagorean_converse);
        add_rule("Angle-Angle Similarity Theorem", "Triangles with corresponding angles equal are similar.",
                 aa_similarity);
        add_rule("Side-Angle-Side Similarity Theorem",
                 "Triangles with one equal angle between proportional sides are similar.", sas_similarity);
        add_rule("Side-Side-Side Similarity Theorem", "Triangles with all three sides proportional are similar.",
                 sss_similarity);
        add_rule("Similar Definition",
                 "Similar figures have proportional corresponding sides and equal corresponding angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) { correspondence_definition(i, o, true); });
        add_rule("Side-Angle-Side Congruence Theorem",
                 "Triangles with two sides and the included angle equal are congruent.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     congruence(i, o, "Side-Angle-Side Congruence Theorem",
                                {{{false, 0}, {true, 1}, {false, 1}},
                                 {{false, 1}, {true, 2}, {false, 2}},
                                 {{false, 2}, {true, 0}, {false, 0}}});
                 });
        add_rule("Angle-Side-Angle Congruence Theorem",
                 "Triangles with two angles and the included side equal are congruent.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     congruence(i, o, "Angle-Side-Angle Congruence Theorem",
                                {{{true, 0}, {false, 0}, {true, 1}},
                                 {{true, 1}, {false, 1}, {true, 2}},
                                 {{true, 2}, {false, 2}, {true, 0}}});
                 });
        add_rule("Side-Side-Side Congruence Theorem", "Triangles with three equal sides are congruent.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     congruence(i, o, "Side-Side-Side Congruence Theorem", {{{false, 0}, {false, 1}, {false, 2}}});
                 });
        add_rule("Congruent Definition", "Congruent figures have equal corresponding sides and angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) { correspondence_definition(i, o, false); });
        add_rule("Angle Bisector Definition", "A bisector splits an angle into two equal angles.", angle_bisector);
        add_rule("Midpoint Definition", "A midpoint splits a segment into two equal segments.", midpoint);
        add_rule("Perpendicular Bisector Theorem",
                 "A perpendicular bisector meets the segment at a right angle at its midpoint, and its points are "
                 "equidistant from the endpoints.",
                 perpendicular_bisector);
        add_rule("Median Definition", "A median joins a vertex to the midpoint of the opposite side.", median);
        add_rule("Triangle Midsegment Theorem",
                 "The segment joining midpoints of two sides is parallel to the third side and half as long.",
                 [](const FactIndex& i, std::vector<Instance>& o) { midsegment(i, o, false); });
        add_rule("Trapezoid Median Theorem", "The median of a trapezoid is the average of the two bases.",
                 [](const FactIndex& i, std::vector<Instance>& o) { midsegment(i, o, true); });
        add_rule("Parallelogram Property",
                 "A parallelogram has parallel and equal opposite sides, equal opposite angles and supplementary "
                 "consecutive angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     quad_rule(i, o, "Parallelogram", "Parallelogram Property", [](const Pts& v, Build& b) {
                         b.lit(par(v[0], v[1], v[2], v[3]));
                         b.lit(par(v[1], v[2], v[3], v[0]));
                         b.atoms(L(v[0], v[1]), L(v[2], v[3]));
                         b.atoms(L(v[1], v[2]), L(v[3], v[0]));
                         b.atoms(A(v[3], v[0], v[1]), A(v[1], v[2], v[3]));
                         b.atoms(A(v[0], v[1], v[2]), A(v[2], v[3], v[0]));
                         b.eq(A(v[3], v[0], v[1]) + A(v[0], v[1], v[2]), num(180));
                     });
                 });
        add_rule("Parallelogram Diagonals Theorem", "The diagonals of a parallelogram bisect each other.",
                 parallelogram_diagonals);
        add_rule("Rectangle Property",
                 "A rectangle is a parallelogram with four right angles and equal diagonals.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     quad_rule(i, o, "Rectangle", "Rectangle Property", [](const Pts& v, Build& b) {
                         b.lit(poly_lit("Parallelogram", v));
                         for (int k = 0; k < 4; ++k) b.eq(A(v[(k + 3) % 4], v[k], v[(k + 1) % 4]), num(90));
                         b.atoms(L(v[0], v[2]), L(v[1], v[3]));
                         b.lit(perp(v[0], v[1], v[1], v[2]));
                     });
                 });
        add_rule("Rhombus Property",
                 "A rhombus is a parallelogram with four equal sides whose diagonals are perpendicular and bisect "
                 "its angles.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     quad_rule(i, o, "Rhombus", "Rhombus Property", [](const Pts& v, Build& b) {
                         b.lit(poly_lit("Parallelogram", v));
                         for (int k = 0; k < 3; ++k) b.atoms(L(v[k], v[k + 1]), L(v[k + 1], v[(k + 2) % 4]));
                         b.lit(perp(v[0], v[2], v[1], v[3]));
                         for (int k = 0; k < 4; ++k)
                             b.atoms(A(v[(k + 3) % 4], v[k], v[(k + 2) % 4]), A(v[(k + 2) % 4], v[k], v[(k + 1) % 4]));
                     });
                 });
        add_rule("Square Definition", "A square is both a rectangle and a rhombus.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     quad_rule(i, o, "Square", "Square Definition", [](const Pts& v, Build& b) {
                         b.lit(poly_lit("Rectangle", v));
                         b.lit(poly_lit("Rhombus", v));
                     });
                 });
        add_rule("Kite Diagonals Theorem", "The diagonals of a kite are perpendicular.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     quad_rule(i, o, "Kite", "Kite Diagonals Theorem",
                               [](const Pts& v, Build& b) { b.lit(perp(v[0], v[2], v[1], v[3])); });
                 });
        add_rule("Regular Polygon Property",
                 "A regular n-gon has equal sides and interior angles of (n-2)*180/n degrees.", regular_polygon);
        add_rule("Radius Definition", "Every point of a circle is one radius away from its center.", radius_definition);
        add_rule("Diameter Definition", "A diameter passes through the center and is twice the radius.",
                 diameter_definition);
        add_rule("Thales Theorem", "An angle inscribed in a semicircle is a right angle.", thales);
        add_rule("Inscribed Angle Theorem",
                 "An inscribed angle is half the central angle subtending the same arc.", inscribed_angle);
        add_rule("Central Angle Theorem", "The measure of an arc equals its central angle.", central_angle);
        add_rule("Tangent Radius Theorem", "A tangent is perpendicular to the radius at the point of tangency.",
                 tangent_radius);
        add_rule("Tangent Segments Theorem", "Tangent segments from one external point to a circle are equal.",
                 tangent_segments);
        add_rule("Chord Bisector Theorem", "A line through the center perpendicular to a chord bisects the chord.",
                 chord_bisector);
        add_rule("Circumference Formula", "The circumference of a circle is 2*pi*r.",
                 [](const FactIndex& i, std::vector<Instance>& o) {
                     circle_formula(i, o, "CircumferenceOf", "Circumference Formula");
                 });
        add_rule("Circle Area Formula", "The area of a circle is pi*r^2.",
                 [](const FactIndex& i, std::vector<Instance>& o) { circle_formula(i, o, "AreaOf", "Circle Area Formula"); });
        add_rule("Sector Area Formula", "A sector with central angle t has area t/360*pi*r^2.", sector_area);
        add_rule("Triangle Area Formula", "The area of a triangle is half of base times height.", triangle_area);
        add_rule("Rectangle Area Formula", "The area of a rectangle is the product of two adjacent sides.",
                 only(quad_area, "Rectangle Area Formula"));
        add_rule("Parallelogram Area Formula", "The area of a parallelogram is base times height.",
                 only(quad_area, "Parallelogram Area Formula"));
        add_rule("Trapezoid Area Formula", "The area of a trapezoid is the mean of the bases times the height.",
                 only(quad_area, "Trapezoid Area Formula"));
        add_rule("Rhombus Area Formula", "The area of a rhombus is half the product of its diagonals.",
                 only(quad_area, "Rhombus Area Formula"));
        add_rule("Perimeter Definition", "The perimeter of a polygon is the sum of its sides.", perimeter);
        add_rule("Right Triangle Trigonometry",
                 "In a right triangle, sine, cosine and tangent of an acute angle are ratios of its sides.",
                 trig_ratios);
        return v;
    }();
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<TheoremInfo>& theorem_catalog() {
    static const std::vector<TheoremInfo> cat = [] {
        std::vector<TheoremInfo> v;
        for (const auto& r : rules()) v.push_back(r.info);
        return v;
    }();
    return cat;
}

const TheoremInfo* find_theorem(const std::string& name) {
    for (const auto& t : theorem_catalog())
        if (t.name == name) return &t;
    return nullptr;
}

NodeSpec eq_spec(const Equation& e) { return {equation_literal(e), "eq:" + e.key}; }

Equation atom_equation(const Expr& a, const Expr& b) {
    return print_expr(b) < print_expr(a) ? Equation(b, a) : Equation(a, b);
}

FactIndex::FactIndex(const GeometrySketch& sketch, std::set<std::string> wanted)
    : sketch_(&sketch), wanted_(std::move(wanted)) {
    std::set<std::string> seen;
    auto add_tri = [&](Pts t) {
        std::sort(t.begin(), t.end());
        if (t[0] == t[1] || t[1] == t[2]) return;
        if (seen.insert(join(t)).second) triangles_.push_back({t[0], t[1], t[2]});
    };
    for (const auto& p : sketch.polygons)
        if (p.pred == "Triangle" && ids_only(p)) add_tri(p.ids());
    Pts pts(sketch.points.begin(), sketch.points.end());
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            if (sketch.chain_of(pts[i], pts[j]) < 0) continue;
            for (size_t k = j + 1; k < pts.size(); ++k)
                if (sketch.chain_of(pts[i], pts[k]) >= 0 && sketch.chain_of(pts[j], pts[k]) >= 0 &&
                    !sketch.collinear(pts[i], pts[j], pts[k]))
                    add_tri({pts[i], pts[j], pts[k]});
        }
    std::sort(triangles_.begin(), triangles_.end());
}

void FactIndex::sync(const ProofHypergraph& g) {
    for (int n = static_cast<int>(lits_.size()); n < static_cast<int>(g.node_count()); ++n) {
        const Literal& l = g.literal(n);
        lits_.push_back(l);
        std::optional<Equation> eq;
        if (l.form == Literal::Form::App && l.pred == "Equals" && l.arity() == 2) {
            try {
                eq = equation_from_literal(l);
            } catch (const std::exception&) {
            }
        }
        eqs_.push_back(eq);
        if (l.form != Literal::Form::App) continue;
        by_pred_[l.pred].push_back(n);
        top_.emplace(l.str(), n);
        walk(l, [&](const Literal& x) {
            if (&x == &l) return;
            nested_.emplace(x.str(), n);
            if (x.pred == "Circle" && x.arity() > 1) nested_.emplace(circle_lit(x.arg(0).text).str(), n);
        });
        if (eq) {
            for (const auto* side : {&eq->lhs, &eq->rhs})
                for (const auto& v : vars_of(*side)) mention_.emplace(v, n);
            auto bind = [&](const Expr& x, const Expr& other) {
                if (!is_var(x) || has_vars(other)) return;
                if (auto c = const_value(other)) value_.emplace(x->name, std::make_pair(n, *c));
            };
            bind(eq->lhs, eq->rhs);
            bind(eq->rhs, eq->lhs);
            if (is_var(eq->lhs) && is_var(eq->rhs)) {
                std::string a = eq->lhs->name, b = eq->rhs->name;
                if (b < a) std::swap(a, b);
                atom_eq_.emplace(a + "\x1f" + b, n);
            }
        } else {
            walk(l, [&](const Literal& x) {
                if (x.pred == "Angle" && x.arity() == 3 && ids_only(x)) mention_.emplace(qname("MeasureOf", x), n);
                if (is_quantity_pred(x.pred)) mention_.emplace(quantity_name(x), n);
            });
        }
    }
}

const std::vector<int>& FactIndex::with_pred(const std::string& pred) const {
    static const std::vector<int> none;
    auto it = by_pred_.find(pred);
    return it == by_pred_.end() ? none : it->second;
}

std::optional<int> FactIndex::mention(const std::string& name) const {
    auto it = mention_.find(name);
    if (it != mention_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::pair<int, Number>> FactIndex::value(const std::string& v) const {
    auto it = value_.find(v);
    if (it == value_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> FactIndex::atom_eq(const std::string& a, const std::string& b) const {
    auto it = atom_eq_.find(a < b ? a + "\x1f" + b : b + "\x1f" + a);
    if (it == atom_eq_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> FactIndex::node_of(const Literal& l) const {
    auto it = top_.find(canonicalize(l).str());
    if (it == top_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> FactIndex::containing(const Literal& l) const {
    if (auto n = node_of(l)) return n;
    auto it = nested_.find(canonicalize(l).str());
    if (it == nested_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::vector<int>> FactIndex::equal_evidence(const std::string& a, const std::string& b) const {
    if (a == b) return std::vector<int>{};
    if (auto n = atom_eq(a, b)) return std::vector<int>{*n};
    auto va = value(a), vb = value(b);
    if (va && vb && va->second.approx_equal(vb->second)) return std::vector<int>{va->first, vb->first};
    return std::nullopt;
}

std::optional<std::vector<int>> FactIndex::between_evidence(const std::string& a, const std::string& m,
                                                           const std::string& b) const {
    if (!sketch_->between(a, m, b)) return std::nullopt;
    for (const char* p : {"PointLiesOnLine", "IsMidpointOf"})
        if (auto n = node_of(Literal::app(p, {Arg::id(m), Arg::sub(line_lit(a, b))}))) return std::vector<int>{*n};
    std::vector<int> out;
    int c = sketch_->chain_of(a, b);
    for (const auto& src : sketch_->lines[c].sources) {
        auto n = containing(src);
        if (n) out.push_back(*n);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Instance> match(const std::string& rule, const FactIndex& idx) {
    std::vector<Instance> out;
    for (const auto& r : rules())
        if (r.info.name == rule) r.fn(idx, out);
    return out;
}

AddResult apply_instance(ProofHypergraph& g, const Instance& inst) {
    std::vector<NodeSpec> keep;
    bool fresh = false;
    for (const auto& c : inst.conclusions) {
        auto id = g.find(c.key);
        if (!id) {
            fresh = true;
            keep.push_back(c);
            continue;
        }
        bool back = false;
        for (int p : inst.premises) back = back || p == *id || g.is_ancestor(*id, p);
        if (!back) keep.push_back(c);
    }
    if (!fresh) {
        AddResult r;
        r.status = AddResult::Status::Trivial;
        return r;
    }
    return g.add_step(inst.premises, inst.theorem, keep);
}

size_t deductive_pass(ProofHypergraph& g, FactIndex& idx, const std::set<std::string>& enabled, size_t max_sweeps) {
    size_t total = 0;
    for (size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        size_t added = 0;
        for (const auto& r : rules()) {
            if (!enabled.empty() && !enabled.count(r.info.name)) continue;
            idx.sync(g);
            std::vector<Instance> inst;
            r.fn(idx, inst);
            for (const auto& i : inst)
                if (apply_instance(g, i).added()) ++added;
        }
        idx.sync(g);
        total += added;
        if (added == 0) break;
    }
    return total;
}

}  // namespace gd
