#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace gd {

namespace {

// Sparse affine row: sum c[a] * a + k = 0.
struct Row {
    std::map<std::string, Number> c;
    Number k;
};

std::optional<Row> row_of(const Equation& eq) {
    Poly p;
    try {
        p = residual_poly(eq);
    } catch (const AlgebraError&) {
        return std::nullopt;
    }
    Row r;
    for (auto& [m, coef] : p.terms) {
        if (m.empty()) r.k = coef;
        else if (m.size() == 1 && m[0].second == 1) r.c[m[0].first] = coef;
        else r.c["m:" + monomial_str(m)] = coef;
    }
    return r;
}

bool real_atom(const std::string& a) { return a.rfind("m:", 0) != 0 && a.rfind("{", 0) != 0; }

bool negligible(const Number& v, long double scale) {
    if (v.exact()) return v.is_zero();
    return std::fabs(v.value()) <= 1e-9L * std::max(1.0L, scale);
}

// Dense view of a row set over a fixed atom index; the last column is the constant.
struct Dense {
    std::vector<std::string> atoms;
    std::map<std::string, int> index;
    int width() const { return static_cast<int>(atoms.size()) + 1; }
};

std::vector<double> dense_row(const Row& r, const Dense& d) {
    std::vector<double> v(d.width(), 0.0);
    for (auto& [a, c] : r.c) v[d.index.at(a)] = static_cast<double>(c.value());
    v.back() = static_cast<double>(r.k.value());
    return v;
}

// Is t in the span of rows? Floating elimination, used inside the search.
bool span_contains_f(const std::vector<const std::vector<double>*>& rows, const std::vector<double>& t) {
    size_t w = t.size();
    std::vector<std::vector<double>> basis;
    std::vector<size_t> piv;
    double scale = 1;
    for (double x : t) scale = std::max(scale, std::fabs(x));
    for (auto* r : rows)
        for (double x : *r) scale = std::max(scale, std::fabs(x));
    const double eps = 1e-9 * scale;
    auto reduce = [&](std::vector<double> v) {
        for (size_t i = 0; i < basis.size(); ++i) {
            double f = v[piv[i]];
            if (f != 0)
                for (size_t j = 0; j < w; ++j) v[j] -= f * basis[i][j];
        }
        return v;
    };
    for (auto* r : rows) {
        auto v = reduce(*r);
        size_t best = w;
        double bv = eps;
        for (size_t j = 0; j < w; ++j)
            if (std::fabs(v[j]) > bv) {
                bv = std::fabs(v[j]);
                best = j;
            }
        if (best == w) continue;
        double p = v[best];
        for (auto& x : v) x /= p;
        for (auto& b : basis) {
            double f = b[best];
            if (f != 0)
                for (size_t j = 0; j < w; ++j) b[j] -= f * v[j];
        }
        basis.push_back(std::move(v));
        piv.push_back(best);
    }
    auto res = reduce(t);
    for (double x : res)
        if (std::fabs(x) > eps) return false;
    return true;
}

// Exact reduced row echelon form over Number.
struct Echelon {
    std::vector<std::map<std::string, Number>> rows;  // includes key "" for the constant
    std::vector<std::string> pivots;
    long double scale = 1;

    std::map<std::string, Number> reduce(std::map<std::string, Number> v) const {
        for (size_t i = 0; i < rows.size(); ++i) {
            auto it = v.find(pivots[i]);
            if (it == v.end()) continue;
            Number f = it->second;
            for (auto& [a, c] : rows[i]) {
                Number n = v[a] - f * c;
                if (negligible(n, scale)) v.erase(a);
                else v[a] = n;
            }
        }
        return v;
    }

    void insert(std::map<std::string, Number> v) {
        for (auto& [a, c] : v) scale = std::max(scale, std::fabs(c.value()));
        v = reduce(std::move(v));
        std::string best;
        bool found = false;
        for (auto& [a, c] : v) {
            if (a.empty()) continue;
            if (!found) {
                best = a;
                found = true;
            }
        }
        if (!found) {
            if (!v.empty()) {
                v[""] = Number(1);
                rows.push_back(v);  // 0 = nonzero constant
                pivots.push_back("");
            }
            return;
        }
        Number p = v[best];
        for (auto& [a, c] : v) c = c / p;
        for (size_t i = 0; i < rows.size(); ++i) {
            auto it = rows[i].find(best);
            if (it == rows[i].end()) continue;
            Number f = it->second;
            auto& r = rows[i];
            for (auto& [a, c] : v) {
                Number n = r[a] - f * c;
                if (negligible(n, scale)) r.erase(a);
                else r[a] = n;
            }
        }
        rows.push_back(std::move(v));
        pivots.push_back(best);
    }

    bool contains(const std::map<std::string, Number>& t) const {
        auto r = reduce(t);
        return r.empty();
    }
};

std::map<std::string, Number> as_map(const Row& r) {
    std::map<std::string, Number> m = r.c;
    if (!r.k.is_zero()) m[""] = r.k;
    return m;
}

bool implies_rows(const std::vector<Row>& rows, const std::vector<size_t>& subset, const Row& target) {
    Echelon e;
    for (size_t i : subset) e.insert(as_map(rows[i]));
    return e.contains(as_map(target));
}

struct Search {
    const std::vector<Row>& rows;
    const Row& target;
    Dense dense;
    std::vector<std::vector<double>> drows;
    std::vector<double> dt;
    std::vector<std::vector<int>> row_atoms;  // indices, constant column included when nonzero
    std::vector<char> in_target;
    size_t budget;
    size_t steps = 0;
    bool hit = false;
    std::optional<std::vector<size_t>> found;
    std::unordered_set<std::string> seen;

    Search(const std::vector<Row>& rs, const Row& t, size_t b) : rows(rs), target(t), budget(b) {
        std::set<std::string> names;
        for (auto& r : rows)
            for (auto& [a, c] : r.c) names.insert(a);
        for (auto& [a, c] : target.c) names.insert(a);
        dense.atoms.assign(names.begin(), names.end());
        for (size_t i = 0; i < dense.atoms.size(); ++i) dense.index[dense.atoms[i]] = static_cast<int>(i);
        for (auto& r : rows) drows.push_back(dense_row(r, dense));
        dt = dense_row(target, dense);
        int w = dense.width();
        for (auto& r : rows) {
            std::vector<int> as;
            for (auto& [a, c] : r.c) as.push_back(dense.index[a]);
            if (!r.k.is_zero()) as.push_back(w - 1);
            std::sort(as.begin(), as.end());
            row_atoms.push_back(as);
        }
        in_target.assign(w, 0);
        for (auto& [a, c] : target.c) in_target[dense.index[a]] = 1;
        if (!target.k.is_zero()) in_target[w - 1] = 1;
    }

    int unbalanced(const std::vector<int>& cnt) const {
        for (size_t a = 0; a < cnt.size(); ++a) {
            if (in_target[a] && cnt[a] == 0) return static_cast<int>(a);
            if (!in_target[a] && cnt[a] == 1) return static_cast<int>(a);
        }
        return -1;
    }

    bool test(const std::vector<size_t>& s) {
        std::vector<const std::vector<double>*> rs;
        for (size_t i : s) rs.push_back(&drows[i]);
        if (!span_contains_f(rs, dt)) return false;
        return implies_rows(rows, s, target);
    }

    void dfs(std::vector<size_t>& s, std::vector<int>& cnt, size_t limit) {
        if (found || hit) return;
        if (++steps > budget) {
            hit = true;
            return;
        }
        std::vector<size_t> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        std::string sig;
        for (size_t i : sorted) sig += std::to_string(i) + ",";
        if (!seen.insert(sig).second) return;

        int a = unbalanced(cnt);
        if (a < 0 && !s.empty() && s.size() == limit) {
            if (test(sorted)) found = sorted;
            return;
        }
        if (s.size() >= limit) return;
        std::vector<size_t> cand;
        std::vector<char> in_s(rows.size(), 0);
        for (size_t i : s) in_s[i] = 1;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (in_s[r]) continue;
            bool ok = false;
            if (a >= 0) {
                ok = std::binary_search(row_atoms[r].begin(), row_atoms[r].end(), a);
            } else {
                for (int x : row_atoms[r])
                    if (cnt[x] > 0 || in_target[x]) {
                        ok = true;
                        break;
                    }
            }
            if (ok) cand.push_back(r);
        }
        for (size_t r : cand) {
            s.push_back(r);
            for (int x : row_atoms[r]) ++cnt[x];
            dfs(s, cnt, limit);
            for (int x : row_atoms[r]) --cnt[x];
            s.pop_back();
            if (found || hit) return;
        }
    }

    std::optional<std::vector<size_t>> run(size_t max_size) {
        for (size_t k = 1; k <= std::min(max_size, rows.size()); ++k) {
            seen.clear();
            std::vector<size_t> s;
            std::vector<int> cnt(dense.width(), 0);
            dfs(s, cnt, k);
            if (found || hit) break;
        }
        return found;
    }
};

// Inclusion-minimal fallback when the exact search runs out of budget.
std::optional<std::vector<size_t>> greedy_premises(const std::vector<Row>& rows, const Row& target) {
    std::vector<size_t> all(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) all[i] = i;
    if (!implies_rows(rows, all, target)) return std::nullopt;
    for (size_t i = rows.size(); i-- > 0;) {
        std::vector<size_t> trial;
        for (size_t j : all)
            if (j != i) trial.push_back(j);
        if (implies_rows(rows, trial, target)) all = trial;
    }
    return all;
}

std::optional<std::vector<size_t>> minimal_rows(const std::vector<Row>& rows, const Row& target, size_t max_size,
                                                size_t budget, bool* budget_hit) {
    Search s(rows, target, budget);
    auto r = s.run(max_size);
    if (budget_hit) *budget_hit = s.hit;
    if (!r && s.hit) return greedy_premises(rows, target);
    return r;
}

Row target_row(const Equation& eq) {
    auto r = row_of(eq);
    if (!r) throw AlgebraError(AlgebraError::Kind::NotApplicable, "target is not linearizable");
    return *r;
}

}  // namespace

bool implies(const std::vector<Equation>& eqs, const std::vector<size_t>& subset, const Equation& target) {
    std::vector<Row> rows;
    for (auto& e : eqs) {
        auto r = row_of(e);
        rows.push_back(r ? *r : Row{});
    }
    return implies_rows(rows, subset, target_row(target));
}

std::optional<std::vector<size_t>> minimal_premises(const std::vector<Equation>& eqs, const Equation& target,
                                                    size_t max_size, size_t budget, bool* budget_hit) {
    std::vector<Row> rows;
    for (auto& e : eqs) {
        auto r = row_of(e);
        rows.push_back(r ? *r : Row{});
    }
    return minimal_rows(rows, target_row(target), max_size, budget, budget_hit);
}

LinearResult solve_linear_system(const std::vector<Equation>& eqs, const LinearOptions& opt) {
    LinearResult out;
    std::vector<Row> rows;
    for (auto& e : eqs) {
        auto r = row_of(e);
        rows.push_back(r ? *r : Row{});
    }

    Echelon ech;
    for (auto& r : rows) ech.insert(as_map(r));

    for (size_t i = 0; i < ech.rows.size(); ++i) {
        if (!ech.pivots[i].empty()) continue;
        Row contradiction;
        contradiction.k = Number(1);
        bool hit = false;
        auto sub = minimal_rows(rows, contradiction, rows.size(), opt.search_budget, &hit);
        out.budget_hit |= hit;
        if (sub) out.inconsistent = *sub;
        return out;
    }

    std::set<std::string> determined;
    for (size_t i = 0; i < ech.rows.size(); ++i) {
        const auto& r = ech.rows[i];
        const std::string& a = ech.pivots[i];
        bool single = true;
        for (auto& [x, c] : r)
            if (!x.empty() && x != a) single = false;
        if (!single || !real_atom(a)) continue;
        determined.insert(a);
        if (opt.known.count(a)) continue;
        Number value = r.count("") ? -r.at("") : Number(0);
        Row t;
        t.c[a] = Number(1);
        t.k = -value;
        bool hit = false;
        auto prem = minimal_rows(rows, t, opt.max_premises, opt.search_budget, &hit);
        out.budget_hit |= hit;
        if (!prem) continue;
        out.derived.push_back({Equation(num(value), var(a)), *prem});
    }

    if (opt.pair_filter) {
        std::vector<std::string> cands;
        for (auto& r : ech.rows)
            for (auto& [x, c] : r)
                if (!x.empty() && real_atom(x) && !determined.count(x) && opt.pair_filter(x)) cands.push_back(x);
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (size_t i = 0; i < cands.size(); ++i) {
            for (size_t j = i + 1; j < cands.size(); ++j) {
                std::map<std::string, Number> t{{cands[i], Number(1)}, {cands[j], Number(-1)}};
                if (!ech.contains(t)) continue;
                Row tr;
                tr.c = t;
                bool hit = false;
                auto prem = minimal_rows(rows, tr, opt.max_premises, opt.search_budget, &hit);
                out.budget_hit |= hit;
                if (!prem) continue;
                out.derived.push_back({Equation(var(cands[i]), var(cands[j])), *prem});
            }
        }
    }
    return out;
}

}  // namespace gd
