#include "geodeduce/validation.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace gd {

namespace {

const std::set<std::string> kArithmetic = {"Equals", "Add",   "Mul",   "Sub",   "Div",    "Pow",    "RatioOf",
                                           "HalfOf", "SqrtOf", "SinOf", "CosOf", "TanOf", "CotOf", "Find"};

bool is_figure_pred(const std::string& p) {
    return p == "Line" || p == "Angle" || p == "Circle" || p == "Arc" || p == "Sector" || p == "Shape" ||
           is_polygon_pred(p);
}

Literal mk(const std::string& pred, std::vector<Arg> args) { return canonicalize(Literal::app(pred, std::move(args))); }
Literal line_lit(const std::string& a, const std::string& b) { return mk("Line", {Arg::id(a), Arg::id(b)}); }
Literal angle_lit(const std::string& a, const std::string& v, const std::string& b) {
    return mk("Angle", {Arg::id(a), Arg::id(v), Arg::id(b)});
}
Arg length_of(const std::string& a, const std::string& b) { return Arg::sub(mk("LengthOf", {Arg::sub(line_lit(a, b))})); }
Arg measure_of(const Literal& angle) { return Arg::sub(mk("MeasureOf", {Arg::sub(angle)})); }
Literal equals(Arg l, Arg r) { return mk("Equals", {std::move(l), std::move(r)}); }

// Endpoints of a Line(...) argument made of two identifiers.
std::optional<std::pair<std::string, std::string>> line_ends(const Arg& a) {
    if (!a.is_lit() || a.lit->pred != "Line" || a.lit->arity() != 2) return std::nullopt;
    if (!a.lit->arg(0).is_id() || !a.lit->arg(1).is_id()) return std::nullopt;
    return std::make_pair(a.lit->arg(0).text, a.lit->arg(1).text);
}

std::optional<std::string> circle_center(const Arg& a) {
    if (!a.is_lit() || a.lit->pred != "Circle" || !a.lit->arg(0).is_id()) return std::nullopt;
    return a.lit->arg(0).text;
}

bool all_id_args(const Literal& l) {
    return !l.args.empty() && std::all_of(l.args.begin(), l.args.end(), [](const Arg& a) { return a.is_id(); });
}

void walk(const Literal& l, const std::function<void(const Literal&)>& f) {
    f(l);
    for (const auto& a : l.args)
        if (a.is_lit()) walk(*a.lit, f);
}

// Point identifiers mentioned geometrically inside l.
void collect_points(const Literal& l, std::set<std::string>& out) {
    walk(l, [&](const Literal& x) {
        if (kArithmetic.count(x.pred)) return;
        for (size_t i = 0; i < x.args.size(); ++i) {
            if (x.pred == "Circle" && i == 1) continue;
            if (x.args[i].is_id()) out.insert(x.args[i].text);
        }
    });
}

std::string join_lits(const std::vector<Literal>& ls, size_t from) {
    std::string s;
    for (size_t i = from; i < ls.size(); ++i) s += (i > from ? ", " : "") + ls[i].str();
    return s;
}

Contradiction conflict(std::vector<Literal> lits) {
    Contradiction c;
    c.message = lits[0].str() + " conflicts with " + join_lits(lits, 1);
    c.literals = std::move(lits);
    return c;
}

Contradiction defect(const Literal& l, const std::string& why) { return {{l}, l.str() + " " + why}; }

std::string btw_key(const std::string& a, const std::string& m, const std::string& b) {
    return a < b ? a + "|" + m + "|" + b : b + "|" + m + "|" + a;
}

struct Item {
    std::set<std::string> pts;
    std::vector<std::array<std::string, 3>> triples;  // a, m, b with m strictly between
    bool collinear = false;
    std::optional<Literal> src;
};

// Orders of `pts` consistent with the triples, up to reversal. Stops after `cap` orders.
void enumerate_orders(const std::vector<std::string>& pts, const std::vector<std::array<std::string, 3>>& triples,
                      size_t cap, const std::function<void(const std::vector<std::string>&)>& emit, size_t& count) {
    std::map<std::string, int> pos;
    std::vector<std::string> cur;
    std::vector<bool> used(pts.size(), false);
    std::function<bool()> ok = [&]() {
        for (const auto& t : triples) {
            auto a = pos.find(t[0]), m = pos.find(t[1]), b = pos.find(t[2]);
            if (a == pos.end() || m == pos.end() || b == pos.end()) continue;
            if (!((a->second < m->second && m->second < b->second) || (b->second < m->second && m->second < a->second)))
                return false;
        }
        return true;
    };
    std::function<void()> rec = [&]() {
        if (count >= cap) return;
        if (cur.size() == pts.size()) {
            if (cur.front() < cur.back()) {
                ++count;
                emit(cur);
            }
            return;
        }
        for (size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            pos[pts[i]] = static_cast<int>(cur.size());
            cur.push_back(pts[i]);
            if (ok()) rec();
            cur.pop_back();
            pos.erase(pts[i]);
            used[i] = false;
        }
    };
    rec();
}

std::set<std::string> order_betweenness(const std::vector<std::string>& order) {
    std::set<std::string> out;
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = i + 1; j < order.size(); ++j)
            for (size_t k = j + 1; k < order.size(); ++k) out.insert(btw_key(order[i], order[j], order[k]));
    return out;
}

constexpr size_t kOrderCap = 20000;

}  // namespace

// ---------------------------------------------------------------------------
// Sketch queries

int GeometrySketch::chain_of(const std::string& a, const std::string& b) const {
    for (size_t i = 0; i < lines.size(); ++i)
        if (lines[i].has(a) && lines[i].has(b)) return static_cast<int>(i);
    return -1;
}

bool GeometrySketch::collinear(const std::string& a, const std::string& b, const std::string& c) const {
    for (const auto& ch : lines)
        if (ch.has(a) && ch.has(b) && ch.has(c)) return true;
    return false;
}

bool GeometrySketch::between(const std::string& a, const std::string& m, const std::string& b) const {
    int c = chain_of(a, b);
    if (c < 0) return false;
    return lines[c].between.count(btw_key(a, m, b)) > 0;
}

std::vector<std::string> GeometrySketch::line_points(const std::string& a, const std::string& b) const {
    int c = chain_of(a, b);
    if (c < 0) return {std::min(a, b), std::max(a, b)};
    return lines[c].order;
}

std::set<std::string> GeometrySketch::on_circle(const std::string& c) const {
    auto it = circles.find(c);
    return it == circles.end() ? std::set<std::string>{} : it->second.points;
}

bool GeometrySketch::is_convex_polygon(const Literal& poly) const {
    if (!is_polygon_pred(poly.pred) || !all_id_args(poly)) return false;
    auto v = poly.ids();
    std::set<std::string> uniq(v.begin(), v.end());
    if (uniq.size() != v.size()) return false;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j)
            for (size_t k = j + 1; k < v.size(); ++k)
                if (collinear(v[i], v[j], v[k])) return false;
    return true;
}

// Parity union-find over the points off one line: parity 0 = same side.
struct SideUF {
    std::map<std::string, std::pair<std::string, int>> parent;

    std::pair<std::string, int> find(const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = {x, 0};
            return {x, 0};
        }
        if (it->second.first == x) return it->second;
        auto [root, p] = find(it->second.first);
        parent[x] = {root, p ^ it->second.second};
        return parent[x];
    }
    void unite(const std::string& a, const std::string& b, int rel) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) return;  // conflicting evidence keeps the first reading
        parent[ra] = {rb, pa ^ pb ^ rel};
    }
};

struct GeometrySketch::SideCache {
    std::map<std::string, SideUF> by_line;
};

int GeometrySketch::side(const std::string& a, const std::string& b, const std::string& p, const std::string& q) const {
    if (!side_cache_) side_cache_ = std::make_shared<SideCache>();
    int li = chain_of(a, b);
    std::string key = li >= 0 ? "#" + std::to_string(li) : std::min(a, b) + "|" + std::max(a, b);
    auto lp = line_points(a, b);
    std::set<std::string> L(lp.begin(), lp.end());
    if (L.count(p) || L.count(q)) return 0;
    if (p == q) return 1;

    auto it = side_cache_->by_line.find(key);
    if (it == side_cache_->by_line.end()) {
        SideUF uf;
        // Parallel declarations between chains.
        auto parallel_to_L = [&](int ci) {
            for (const auto* group : {&relations, &derived})
                for (const auto& r : *group) {
                    if (r.pred != "Parallel") continue;
                    auto e1 = line_ends(r.arg(0)), e2 = line_ends(r.arg(1));
                    if (!e1 || !e2) continue;
                    int c1 = chain_of(e1->first, e1->second), c2 = chain_of(e2->first, e2->second);
                    bool l1 = L.count(e1->first) && L.count(e1->second);
                    bool l2 = L.count(e2->first) && L.count(e2->second);
                    if ((l1 && c2 == ci) || (l2 && c1 == ci)) return true;
                }
            return false;
        };
        for (size_t ci = 0; ci < lines.size(); ++ci) {
            if (static_cast<int>(ci) == li) continue;
            const Chain& m = lines[ci];
            std::vector<std::string> X, rest;
            for (const auto& x : m.order) (L.count(x) ? X : rest).push_back(x);
            if (X.size() == 1) {
                const std::string& x = X[0];
                for (size_t i = 0; i < rest.size(); ++i)
                    for (size_t j = i + 1; j < rest.size(); ++j) {
                        const auto &u = rest[i], &v = rest[j];
                        if (between(u, x, v)) uf.unite(u, v, 1);
                        else if (between(x, u, v) || between(x, v, u)) uf.unite(u, v, 0);
                    }
            } else if (X.empty() && parallel_to_L(static_cast<int>(ci))) {
                for (size_t i = 1; i < rest.size(); ++i) uf.unite(rest[0], rest[i], 0);
            }
        }
        for (const auto& poly : polygons) {
            if (!is_convex_polygon(poly)) continue;
            auto v = poly.ids();
            int n = static_cast<int>(v.size());
            for (int i = 0; i < n; ++i)
                for (int k = i + 1; k < n; ++k) {
                    if (!L.count(v[i]) || !L.count(v[k])) continue;
                    std::vector<std::string> g1, g2;
                    for (int t = 0; t < n; ++t) {
                        if (t == i || t == k || L.count(v[t])) continue;
                        (t > i && t < k ? g1 : g2).push_back(v[t]);
                    }
                    for (size_t t = 1; t < g1.size(); ++t) uf.unite(g1[0], g1[t], 0);
                    for (size_t t = 1; t < g2.size(); ++t) uf.unite(g2[0], g2[t], 0);
                    if (!g1.empty() && !g2.empty()) uf.unite(g1[0], g2[0], 1);
                }
        }
        it = side_cache_->by_line.emplace(key, std::move(uf)).first;
    }
    SideUF& uf = it->second;
    if (!uf.parent.count(p) || !uf.parent.count(q)) return 0;
    auto [rp, pp] = uf.find(p);
    auto [rq, pq] = uf.find(q);
    if (rp != rq) return 0;
    return pp == pq ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Construction

GeometrySketch build_sketch_only(const Formalization& f) {
    GeometrySketch s;
    std::vector<Literal> all = f.facts;
    all.push_back(f.goal);

    std::vector<Item> items;
    std::set<std::string> seen_poly, seen_angle;
    for (size_t fi = 0; fi < all.size(); ++fi) {
        const Literal& fact = all[fi];
        bool is_fact = fi < f.facts.size();
        collect_points(fact, s.points);
        walk(fact, [&](const Literal& x) {
            if (is_figure_pred(x.pred) && !s.figure_source.count(x.str())) s.figure_source.emplace(x.str(), fact);
            if (x.pred == "Line") {
                if (auto e = line_ends(Arg::sub(x)); e && e->first != e->second) items.push_back({{e->first, e->second}, {}, false, std::nullopt});
            } else if (x.pred == "Angle" && x.arity() == 3 && all_id_args(x)) {
                if (seen_angle.insert(x.str()).second) s.angles.push_back(x);
            } else if (is_polygon_pred(x.pred) && all_id_args(x)) {
                if (seen_poly.insert(x.str()).second) {
                    s.polygons.push_back(x);
                    // Polygon sides are segments of the figure.
                    auto v = x.ids();
                    for (size_t i = 0; i < v.size(); ++i) {
                        const auto& a = v[i];
                        const auto& b = v[(i + 1) % v.size()];
                        if (a != b) items.push_back({{a, b}, {}, false, std::nullopt});
                    }
                }
            } else if (x.pred == "Circle" && x.arity() >= 1 && x.arg(0).is_id()) {
                auto& c = s.circles[x.arg(0).text];
                c.center = x.arg(0).text;
                if (x.arity() == 2 && !c.radius) c.radius = x.arg(1);
            }
        });
        if (!is_fact) continue;
        const std::string& p = fact.pred;
        if (!is_figure_pred(p) && p != "Equals") s.relations.push_back(fact);

        auto add_triple = [&](const std::string& a, const std::string& m, const std::string& b) {
            if (a == m || m == b || a == b) return;
            items.push_back({{a, m, b}, {{a, m, b}}, false, fact});
        };
        auto on_circle = [&](const std::string& c, const std::string& pt) {
            auto& ci = s.circles[c];
            ci.center = c;
            if (pt != c) ci.points.insert(pt);
        };
        if (p == "PointLiesOnLine" || p == "IsMidpointOf") {
            if (auto e = line_ends(fact.arg(1)); e && fact.arg(0).is_id()) add_triple(e->first, fact.arg(0).text, e->second);
        } else if (p == "Collinear" && all_id_args(fact)) {
            auto ids = fact.ids();
            items.push_back({{ids.begin(), ids.end()}, {}, true, fact});
        } else if (p == "PointLiesOnCircle") {
            auto c = circle_center(fact.arg(1));
            if (c && fact.arg(0).is_id()) on_circle(*c, fact.arg(0).text);
        } else if (p == "IsRadiusOf" || p == "IsDiameterOf" || p == "IsChordOf") {
            auto e = line_ends(fact.arg(0));
            auto c = circle_center(fact.arg(1));
            if (e && c) {
                for (const auto& pt : {e->first, e->second}) on_circle(*c, pt);
                if (p == "IsDiameterOf") add_triple(e->first, *c, e->second);
            }
        } else if (p == "InscribedIn" || p == "CircumscribedTo") {
            // Polygon inscribed in a circle, or circle circumscribed about a polygon.
            const Arg& poly = p == "InscribedIn" ? fact.arg(0) : fact.arg(1);
            const Arg& circ = p == "InscribedIn" ? fact.arg(1) : fact.arg(0);
            auto c = circle_center(circ);
            if (c && poly.is_lit() && is_polygon_pred(poly.lit->pred))
                for (const auto& v : poly.lit->ids()) on_circle(*c, v);
        }
        walk(fact, [&](const Literal& x) {
            if (x.pred == "Sector" && all_id_args(x)) {
                auto ids = x.ids();
                on_circle(ids[0], ids[1]);
                on_circle(ids[0], ids[2]);
            }
        });
    }

    // Merge items sharing two or more points.
    std::vector<Item> groups;
    for (auto& it : items) {
        Item cur = it;
        bool merged = true;
        while (merged) {
            merged = false;
            for (size_t g = 0; g < groups.size(); ++g) {
                size_t shared = 0;
                for (const auto& pt : cur.pts) shared += groups[g].pts.count(pt);
                if (shared < 2) continue;
                Item& o = groups[g];
                cur.pts.insert(o.pts.begin(), o.pts.end());
                cur.triples.insert(cur.triples.end(), o.triples.begin(), o.triples.end());
                cur.collinear = cur.collinear || o.collinear;
                groups.erase(groups.begin() + static_cast<long>(g));
                merged = true;
                break;
            }
        }
        groups.push_back(cur);
    }
    // Sources are every item whose points fall inside the group.
    for (auto& g : groups) {
        Chain ch;
        ch.points = g.pts;
        std::set<std::string> seen_src;
        for (const auto& it : items) {
            if (!it.src) continue;
            if (!std::all_of(it.pts.begin(), it.pts.end(), [&](const std::string& p) { return g.pts.count(p) > 0; })) continue;
            if (seen_src.insert(it.src->str()).second) ch.sources.push_back(*it.src);
        }
        std::vector<std::string> pts(g.pts.begin(), g.pts.end());
        if (g.triples.empty()) {
            ch.ordered = pts.size() == 2;
            ch.order = pts;
        } else {
            std::optional<std::vector<std::string>> best;
            std::optional<std::set<std::string>> common;
            size_t count = 0;
            enumerate_orders(pts, g.triples, kOrderCap, [&](const std::vector<std::string>& o) {
                if (!best || o < *best) best = o;
                auto b = order_betweenness(o);
                if (!common) {
                    common = b;
                } else {
                    std::set<std::string> keep;
                    std::set_intersection(common->begin(), common->end(), b.begin(), b.end(),
                                          std::inserter(keep, keep.begin()));
                    common = std::move(keep);
                }
            }, count);
            if (!best) {
                s.build_conflicts.push_back(ch.sources.size() > 1 ? conflict(ch.sources)
                                                                  : defect(ch.sources.at(0), "has no consistent point order"));
                ch.ordered = false;
                ch.order = pts;
            } else {
                ch.order = *best;
                if (count >= kOrderCap) {
                    for (const auto& t : g.triples) ch.between.insert(btw_key(t[0], t[1], t[2]));
                } else {
                    ch.between = *common;
                }
            }
        }
        s.lines.push_back(std::move(ch));
    }
    std::sort(s.lines.begin(), s.lines.end(), [](const Chain& a, const Chain& b) { return a.order < b.order; });
    return s;
}

// ---------------------------------------------------------------------------
// Completions

std::vector<Completion> complete_relations(GeometrySketch& s) {
    std::vector<Completion> out;
    std::set<std::string> known;
    for (const auto& r : s.relations) known.insert(r.str());
    for (const auto& r : s.derived) known.insert(r.str());
    for (const auto& kv : s.figure_source) known.insert(kv.first);

    auto add = [&](const Literal& l, const std::string& rule) {
        if (!known.insert(l.str()).second) return false;
        s.derived.push_back(l);
        out.push_back({l, rule});
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Literal> pool = s.relations;
        pool.insert(pool.end(), s.derived.begin(), s.derived.end());
        for (const auto& r : pool) {
            if (r.pred != "Perpendicular" && r.pred != "Parallel") continue;
            auto e1 = line_ends(r.arg(0)), e2 = line_ends(r.arg(1));
            if (!e1 || !e2) continue;
            auto p1 = s.line_points(e1->first, e1->second), p2 = s.line_points(e2->first, e2->second);
            std::string rule = r.pred == "Perpendicular" ? "perpendicular_propagation" : "parallel_propagation";
            for (size_t i = 0; i < p1.size(); ++i)
                for (size_t j = i + 1; j < p1.size(); ++j)
                    for (size_t k = 0; k < p2.size(); ++k)
                        for (size_t m = k + 1; m < p2.size(); ++m) {
                            Literal l = mk(r.pred, {Arg::sub(line_lit(p1[i], p1[j])), Arg::sub(line_lit(p2[k], p2[m]))});
                            changed |= add(l, rule);
                        }
        }
    }

    // Sides and vertex angles of polygons stated as facts.
    for (const auto& poly : s.polygons) {
        auto src = s.figure_source.find(poly.str());
        if (src == s.figure_source.end() || src->second.str() != poly.str()) continue;
        auto v = poly.ids();
        size_t n = v.size();
        for (size_t i = 0; i < n; ++i) add(line_lit(v[i], v[(i + 1) % n]), "polygon_sides");
        for (size_t i = 0; i < n; ++i) {
            Literal a = angle_lit(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            if (add(a, "polygon_angles") &&
                std::none_of(s.angles.begin(), s.angles.end(), [&](const Literal& x) { return x.str() == a.str(); }))
                s.angles.push_back(a);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Staged equations

std::vector<Completion> staged_equations(const GeometrySketch& s) {
    std::vector<Completion> out;
    std::set<std::string> seen;
    auto add = [&](const Literal& l, const std::string& rule) {
        if (seen.insert(l.str()).second) out.push_back({l, rule});
    };

    for (const auto& ch : s.lines) {
        const auto& o = ch.order;
        for (size_t i = 0; i < o.size(); ++i)
            for (size_t j = i + 1; j < o.size(); ++j)
                for (size_t k = j + 1; k < o.size(); ++k) {
                    if (!ch.between.count(btw_key(o[i], o[j], o[k]))) continue;
                    add(equals(length_of(o[i], o[k]),
                               Arg::sub(mk("Add", {length_of(o[i], o[j]), length_of(o[j], o[k])}))),
                        "segment_split");
                }
    }

    auto ray = [&](const std::string& v, const std::string& x) {
        std::vector<std::string> r{x};
        int c = s.chain_of(v, x);
        if (c < 0) return r;
        for (const auto& p : s.lines[c].order)
            if (p != v && p != x && (s.between(v, x, p) || s.between(v, p, x))) r.push_back(p);
        return r;
    };
    for (const auto& ang : s.angles) {
        auto ids = ang.ids();
        auto rx = ray(ids[1], ids[0]), ry = ray(ids[1], ids[2]);
        for (const auto& x : rx)
            for (const auto& y : ry) {
                Literal other = angle_lit(x, ids[1], y);
                if (other.str() == ang.str()) continue;
                std::string a = ang.str(), b = other.str();
                add(a < b ? equals(measure_of(ang), measure_of(other)) : equals(measure_of(other), measure_of(ang)),
                    "same_angle");
            }
    }

    for (const auto& [c, info] : s.circles) {
        Arg r = info.radius ? *info.radius : Arg::sub(mk("RadiusOf", {Arg::sub(mk("Circle", {Arg::id(c)}))}));
        for (const auto& p : info.points) add(equals(length_of(c, p), r), "radius");
    }
    for (const auto& rel : s.relations) {
        if (rel.pred != "IsDiameterOf") continue;
        auto e = line_ends(rel.arg(0));
        auto c = circle_center(rel.arg(1));
        if (!e || !c) continue;
        add(equals(length_of(e->first, e->second),
                   Arg::sub(mk("Mul", {Arg::expr("2"), Arg::sub(mk("RadiusOf", {Arg::sub(mk("Circle", {Arg::id(*c)}))}))}))),
            "diameter");
    }

    for (size_t i = 0; i < s.lines.size(); ++i)
        for (size_t j = i + 1; j < s.lines.size(); ++j) {
            const auto &c1 = s.lines[i], &c2 = s.lines[j];
            std::vector<std::string> common;
            for (const auto& p : c1.points)
                if (c2.has(p)) common.push_back(p);
            if (common.size() != 1) continue;
            const std::string& v = common[0];
            auto splits = [&](const Chain& c) {
                std::vector<std::pair<std::string, std::string>> r;
                for (const auto& a : c.order)
                    for (const auto& b : c.order)
                        if (a != v && b != v && a != b && s.between(a, v, b)) r.emplace_back(a, b);
                return r;
            };
            for (const auto& [a1, b1] : splits(c1))
                for (const auto& [a2, b2] : splits(c2)) {
                    Literal x = angle_lit(a1, v, a2), y = angle_lit(b1, v, b2);
                    if (x.str() == y.str()) continue;
                    add(x.str() < y.str() ? equals(measure_of(x), measure_of(y)) : equals(measure_of(y), measure_of(x)),
                        "vertical_angles");
                }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Consistency

std::vector<Contradiction> check_consistency(const GeometrySketch& s) {
    std::vector<Contradiction> out = s.build_conflicts;
    auto mentions = [](const Literal& l) {
        std::set<std::string> p;
        collect_points(l, p);
        return p;
    };

    for (const auto& poly : s.polygons) {
        auto v = poly.ids();
        const Literal& src = s.figure_source.at(poly.str());
        std::set<std::string> uniq;
        std::string rep;
        for (const auto& x : v)
            if (!uniq.insert(x).second && rep.empty()) rep = x;
        if (!rep.empty()) {
            out.push_back(defect(src, "is degenerate: vertex " + rep + " repeats"));
            continue;
        }
        for (const auto& ch : s.lines) {
            std::set<std::string> on;
            for (const auto& x : v)
                if (ch.has(x)) on.insert(x);
            if (on.size() < 3) continue;
            std::vector<Literal> lits{src};
            for (const auto& l : ch.sources) {
                auto m = mentions(l);
                size_t hits = 0;
                for (const auto& x : on) hits += m.count(x);
                if (hits >= 2) lits.push_back(l);
            }
            if (lits.size() == 1) lits.insert(lits.end(), ch.sources.begin(), ch.sources.end());
            if (lits.size() == 1) {
                out.push_back(defect(src, "has three collinear vertices"));
            } else {
                out.push_back(conflict(lits));
            }
        }
    }

    std::vector<const Literal*> par, perp;
    for (const auto& r : s.relations) {
        if (r.pred == "PointLiesOnLine" || r.pred == "IsMidpointOf") {
            auto e = line_ends(r.arg(1));
            if (e && r.arg(0).is_id() && (r.arg(0).text == e->first || r.arg(0).text == e->second))
                out.push_back(defect(r, "is degenerate: the point is an endpoint of the line"));
        } else if (r.pred == "PointLiesOnCircle") {
            auto c = circle_center(r.arg(1));
            if (c && r.arg(0).is_id() && r.arg(0).text == *c)
                out.push_back(defect(r, "is inconsistent: the center cannot lie on its circle"));
        } else if (r.pred == "Parallel") {
            par.push_back(&r);
        } else if (r.pred == "Perpendicular") {
            perp.push_back(&r);
        }
    }
    struct Pair {
        int c1, c2;
        std::vector<std::string> p1, p2;
    };
    auto chains = [&](const Literal& r) -> std::optional<Pair> {
        auto e1 = line_ends(r.arg(0)), e2 = line_ends(r.arg(1));
        if (!e1 || !e2) return std::nullopt;
        Pair p{s.chain_of(e1->first, e1->second), s.chain_of(e2->first, e2->second),
               s.line_points(e1->first, e1->second), s.line_points(e2->first, e2->second)};
        return p;
    };
    for (const auto* r : par) {
        auto p = chains(*r);
        if (!p) continue;
        if (p->c1 >= 0 && p->c1 == p->c2) {
            out.push_back(defect(*r, "is inconsistent: both lines are the same line"));
            continue;
        }
        for (const auto& x : p->p1)
            if (std::find(p->p2.begin(), p->p2.end(), x) != p->p2.end()) {
                out.push_back(defect(*r, "is inconsistent: the lines meet at " + x));
                break;
            }
        for (const auto* q : perp) {
            auto pq = chains(*q);
            if (!pq || p->c1 < 0 || p->c2 < 0) continue;
            if ((pq->c1 == p->c1 && pq->c2 == p->c2) || (pq->c1 == p->c2 && pq->c2 == p->c1))
                out.push_back(conflict({*r, *q}));
        }
    }
    for (const auto* r : perp) {
        auto p = chains(*r);
        if (p && p->c1 >= 0 && p->c1 == p->c2) out.push_back(defect(*r, "is inconsistent: a line cannot be perpendicular to itself"));
    }

    std::vector<Contradiction> uniq;
    std::set<std::string> seen;
    for (auto& c : out)
        if (seen.insert(c.message).second) uniq.push_back(std::move(c));
    return uniq;
}

// ---------------------------------------------------------------------------

std::pair<GeometrySketch, ValidationReport> build_sketch(const Formalization& f) {
    GeometrySketch s = build_sketch_only(f);
    ValidationReport r;
    r.completions = complete_relations(s);
    r.staged = staged_equations(s);
    r.contradictions = check_consistency(s);
    r.consistent = r.contradictions.empty();
    return {std::move(s), std::move(r)};
}

std::string format_feedback(const ValidationReport& report) {
    std::vector<std::string> errors, added;
    for (const auto& c : report.contradictions) errors.push_back("ERROR: " + c.message);
    for (const auto& c : report.completions) added.push_back("ADDED: " + c.lit.str() + " [" + c.rule + "]");
    std::sort(errors.begin(), errors.end());
    std::sort(added.begin(), added.end());
    if (errors.empty() && added.empty()) return "OK\n";
    std::string out;
    for (const auto& e : errors) out += e + "\n";
    for (const auto& a : added) out += a + "\n";
    return out;
}

ValidationReport validate(const Formalization& f) { return build_sketch(f).second; }

}  // namespace gd
