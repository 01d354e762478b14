#include "geodeduce/text_parser.hpp"

#include "geodeduce/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace gd {

namespace {

// ---------------------------------------------------------------- tokens

struct Tok {
    enum class Kind { Word, Num, Sym, Stop };
    Kind kind;
    std::string text;
    std::string low;
    size_t begin, end;  // byte span in the source
};

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

size_t utf8_len(unsigned char c) {
    if (c < 0x80) return 1;
    if ((c >> 5) == 0x6) return 2;
    if ((c >> 4) == 0xE) return 3;
    if ((c >> 3) == 0x1E) return 4;
    return 1;
}

const std::set<std::string>& unit_words() {
    static const std::set<std::string> u = {"cm", "mm", "km", "m", "in", "inch", "inches", "ft", "feet", "foot",
                                            "yd", "yards", "units", "unit", "meters", "meter", "centimeters",
                                            "millimeters", "degrees", "degree"};
    return u;
}

std::vector<Tok> tokenize(const std::string& s) {
    std::vector<Tok> out;
    size_t i = 0;
    auto push = [&](Tok::Kind k, size_t b, size_t e) { out.push_back({k, s.substr(b, e - b), lower(s.substr(b, e - b)), b, e}); };
    while (i < s.size()) {
        unsigned char c = s[i];
        if (std::isspace(c)) {
            ++i;
        } else if (std::isdigit(c)) {
            size_t b = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
                ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            push(Tok::Kind::Num, b, i);
        } else if (std::isalpha(c)) {
            size_t b = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            push(Tok::Kind::Word, b, i);
        } else if (c == '.' || c == '?' || c == '!' || c == ';') {
            push(Tok::Kind::Stop, i, i + 1);
            ++i;
        } else {
            size_t n = std::min(utf8_len(c), s.size() - i);
            std::string sym = s.substr(i, n);
            if (sym != "\xC2\xB0" && sym != "\xC2\xB2")  // degree sign and superscript two are dropped
                push(Tok::Kind::Sym, i, i + n);
            i += n;
        }
    }
    // Unit words right after a number.
    std::vector<Tok> kept;
    for (size_t k = 0; k < out.size(); ++k) {
        kept.push_back(out[k]);
        if (out[k].kind != Tok::Kind::Num) continue;
        size_t j = k + 1;
        if (j < out.size() && (out[j].low == "square" || out[j].low == "sq")) ++j;
        if (j < out.size() && out[j].kind == Tok::Kind::Word && unit_words().count(out[j].low)) {
            bool in_ok = out[j].low != "in" || j + 1 >= out.size() || out[j + 1].kind == Tok::Kind::Stop ||
                         out[j + 1].text == ",";
            if (in_ok) k = j;
        }
    }
    return kept;
}

bool all_upper(const std::string& w) {
    return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

// ---------------------------------------------------------------- slots

using Binding = std::map<std::string, std::vector<std::string>>;
struct Hit {
    size_t end;
    std::vector<std::string> vals;
};

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

// n point labels written "ABC" or "A B C"; n = 0 accepts three or more.
std::optional<Hit> points(const std::vector<Tok>& t, size_t i, size_t n) {
    if (i >= t.size() || t[i].kind != Tok::Kind::Word || !all_upper(t[i].text)) return std::nullopt;
    const std::string& w = t[i].text;
    if (w.size() > 1 && (n == 0 ? w.size() >= 3 : w.size() == n)) {
        std::vector<std::string> ps;
        for (char c : w) ps.emplace_back(1, c);
        return Hit{i + 1, {join(ps, ",")}};
    }
    if (w.size() != 1) return std::nullopt;
    std::vector<std::string> ps;
    size_t j = i;
    while (j < t.size() && t[j].kind == Tok::Kind::Word && t[j].text.size() == 1 && all_upper(t[j].text) &&
           (n == 0 || ps.size() < n)) {
        ps.push_back(t[j].text);
        ++j;
    }
    if (n == 1) return Hit{i + 1, {ps[0]}};
    if ((n == 0 && ps.size() >= 3) || (n > 0 && ps.size() == n)) return Hit{j, {join(ps, ",")}};
    return std::nullopt;
}

bool is_var(const Tok& t) {
    if (t.kind != Tok::Kind::Word || t.text.empty() || !(t.text[0] >= 'a' && t.text[0] <= 'z')) return false;
    return std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

const std::string kSqrt = "\xE2\x88\x9A";

std::optional<Hit> number(const std::vector<Tok>& t, size_t i) {
    if (i >= t.size()) return std::nullopt;
    if (t[i].text == kSqrt && i + 1 < t.size() && t[i + 1].kind == Tok::Kind::Num)
        return Hit{i + 2, {"SqrtOf(" + t[i + 1].text + ")"}};
    if (t[i].kind != Tok::Kind::Num) return std::nullopt;
    if (i + 2 < t.size() && t[i + 1].text == "/" && t[i + 2].kind == Tok::Kind::Num)
        return Hit{i + 3, {t[i].text + "/" + t[i + 2].text}};
    if (i + 2 < t.size() && t[i + 1].text == kSqrt && t[i + 2].kind == Tok::Kind::Num)
        return Hit{i + 3, {"Mul(" + t[i].text + ",SqrtOf(" + t[i + 2].text + "))"}};
    return Hit{i + 1, {t[i].text}};
}

// Arithmetic over numbers and lowercase variables.
std::optional<Hit> expression(const std::vector<Tok>& t, size_t i) {
    static const std::map<std::string, std::string> ops = {
        {"+", "+"}, {"-", "-"}, {"*", "*"}, {"/", "/"}, {"(", "("}, {")", ")"}, {"^", "^"},
        {"\xC3\x97", "*"}, {"\xC2\xB7", "*"}, {"\xE2\x88\x92", "-"}};
    std::string text;
    size_t j = i, last_good = i;
    std::string good_text;
    int depth = 0;
    bool operand = false;
    while (j < t.size()) {
        const Tok& k = t[j];
        if (k.kind == Tok::Kind::Num || is_var(k)) {
            text += k.text;
            operand = true;
        } else if (k.text == kSqrt && j + 1 < t.size() && t[j + 1].kind == Tok::Kind::Num) {
            text += "\\sqrt{" + t[j + 1].text + "}";
            ++j;
            operand = true;
        } else if (auto it = ops.find(k.text); it != ops.end()) {
            if (it->second == "(") ++depth;
            if (it->second == ")" && --depth < 0) break;
            text += it->second;
            operand = it->second == ")";
        } else {
            break;
        }
        ++j;
        if (operand && depth == 0) {
            last_good = j;
            good_text = text;
        }
    }
    if (last_good == i) return std::nullopt;
    if (good_text.rfind("\\sqrt{", 0) == 0 && good_text.find('}') == good_text.size() - 1)
        good_text = "SqrtOf(" + good_text.substr(6, good_text.size() - 7) + ")";
    else {
        try {
            parse_expr(good_text);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return Hit{last_good, {good_text}};
}

bool word_at(const std::vector<Tok>& t, size_t i, const std::string& w) { return i < t.size() && t[i].low == w; }

// A quantity mention or an arithmetic expression.
std::optional<Hit> term(const std::vector<Tok>& t, size_t i) {
    std::vector<Hit> alts;
    size_t j = word_at(t, i, "m") ? i + 1 : i;
    const std::string angle_sym = "\xE2\x88\xA0", arc_sym = "\xE2\x8C\x92";
    if (word_at(t, j, angle_sym) || word_at(t, j, "angle")) {
        if (auto p = points(t, j + 1, 3)) alts.push_back({p->end, {"MeasureOf(Angle(" + p->vals[0] + "))"}});
        else if (j + 1 < t.size() && t[j + 1].kind == Tok::Kind::Num) alts.push_back({j + 2, {"MeasureOf(Angle($))"}});
    }
    if (word_at(t, j, arc_sym) || word_at(t, j, "arc"))
        if (auto p = points(t, j + 1, 2)) alts.push_back({p->end, {"MeasureOf(Arc(" + p->vals[0] + "))"}});
    size_t k = (word_at(t, i, "segment") || word_at(t, i, "side")) ? i + 1 : i;
    if (auto p = points(t, k, 2)) alts.push_back({p->end, {"LengthOf(Line(" + p->vals[0] + "))"}});
    if (auto e = expression(t, i)) alts.push_back(*e);
    if (alts.empty()) return std::nullopt;
    return *std::max_element(alts.begin(), alts.end(), [](const Hit& a, const Hit& b) { return a.end < b.end; });
}

std::optional<Hit> slot(PatternItem::Kind k, const std::vector<Tok>& t, size_t i) {
    using K = PatternItem::Kind;
    switch (k) {
        case K::Point: return points(t, i, 1);
        case K::Segment: return points(t, i, 2);
        case K::Angle:
        case K::Triangle: return points(t, i, 3);
        case K::Quad: return points(t, i, 4);
        case K::Points: return points(t, i, 0);
        case K::Number: return number(t, i);
        case K::Var:
            if (i < t.size() && is_var(t[i])) return Hit{i + 1, {t[i].text}};
            return std::nullopt;
        case K::Expr: return expression(t, i);
        case K::Term: return term(t, i);
        case K::TermChain: {
            auto first = term(t, i);
            if (!first) return std::nullopt;
            Hit h = *first;
            while (h.end < t.size() && t[h.end].text == "=") {
                auto next = term(t, h.end + 1);
                if (!next) break;
                h.vals.push_back(next->vals[0]);
                h.end = next->end;
            }
            if (h.vals.size() < 2) return std::nullopt;
            return h;
        }
        case K::Word: break;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- matching

std::optional<std::pair<size_t, Binding>> match_from(const ParseRule& r, size_t pi, const std::vector<Tok>& t, size_t i,
                                                     Binding b) {
    if (pi == r.pattern.size()) return std::make_pair(i, b);
    const PatternItem& it = r.pattern[pi];
    if (it.kind == PatternItem::Kind::Word) {
        bool optional = it.text.size() > 1 && it.text.back() == '?';
        std::string w = optional ? it.text.substr(0, it.text.size() - 1) : it.text;
        if (i < t.size() && t[i].low == w)
            if (auto m = match_from(r, pi + 1, t, i + 1, b)) return m;
        if (optional) return match_from(r, pi + 1, t, i, b);
        return std::nullopt;
    }
    auto h = slot(it.kind, t, i);
    if (!h) return std::nullopt;
    b[it.text] = h->vals;
    return match_from(r, pi + 1, t, h->end, std::move(b));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
    return s;
}

std::vector<std::string> expand(const ParseRule& r, const Binding& b) {
    std::vector<std::string> out;
    if (trim(r.emission) == "-") return out;
    for (const auto& tmpl : split(r.emission, ';')) {
        std::string base = trim(tmpl);
        std::string chain;
        for (const auto& [name, vals] : b)
            if (base.find("{" + name + ".0}") != std::string::npos) chain = name;
        size_t reps = chain.empty() ? 1 : b.at(chain).size() - 1;
        for (size_t k = 0; k < reps; ++k) {
            std::string s = base;
            if (!chain.empty()) {
                s = replace_all(s, "{" + chain + ".0}", b.at(chain)[k]);
                s = replace_all(s, "{" + chain + ".1}", b.at(chain)[k + 1]);
            }
            for (const auto& [name, vals] : b) s = replace_all(s, "{" + name + "}", vals[0]);
            out.push_back(s);
        }
    }
    return out;
}

const std::set<std::string>& filler() {
    static const std::set<std::string> f = {"the", "a", "an", "and", "of", "in", "is", "are", "given", "that", "if",
                                            "then", "with", "as", "shown", "figure", "below", "above", "diagram",
                                            "let", "suppose", "assume", "where", "so", ",", ":", "(", ")", "'"};
    return f;
}

PatternItem::Kind slot_kind(const std::string& k) {
    using K = PatternItem::Kind;
    static const std::map<std::string, K> m = {{"P", K::Point},      {"SEG", K::Segment}, {"ANG", K::Angle},
                                               {"TRI", K::Triangle}, {"QUAD", K::Quad},   {"PTS", K::Points},
                                               {"NUM", K::Number},   {"VAR", K::Var},     {"EXPR", K::Expr},
                                               {"TERM", K::Term},    {"TERMS", K::TermChain}};
    auto it = m.find(k);
    if (it == m.end()) throw RuleTableError("unknown slot type " + k);
    return it->second;
}

}  // namespace

std::vector<ParseRule> parse_rule_table(const std::string& tsv) {
    std::vector<ParseRule> out;
    std::stringstream ss(tsv);
    size_t lineno = 0;
    for (std::string line; std::getline(ss, line);) {
        ++lineno;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() != 3) throw RuleTableError("line " + std::to_string(lineno) + ": expected 3 tab-separated columns");
        ParseRule r;
        try {
            r.priority = std::stoi(trim(cols[0]));
        } catch (const std::exception&) {
            throw RuleTableError("line " + std::to_string(lineno) + ": bad priority");
        }
        r.source = trim(cols[1]);
        r.emission = trim(cols[2]);
        std::set<std::string> bound;
        std::stringstream ps(r.source);
        for (std::string item; ps >> item;) {
            if (item.size() > 2 && item.front() == '{' && item.back() == '}') {
                auto colon = item.find(':');
                if (colon == std::string::npos) throw RuleTableError("line " + std::to_string(lineno) + ": slot needs a name");
                PatternItem p{slot_kind(item.substr(1, colon - 1)), item.substr(colon + 1, item.size() - colon - 2)};
                bound.insert(p.text);
                r.pattern.push_back(p);
            } else {
                r.pattern.push_back({PatternItem::Kind::Word, lower(item)});
            }
        }
        if (r.pattern.empty()) throw RuleTableError("line " + std::to_string(lineno) + ": empty pattern");
        // Every slot named in the emission must be bound by the pattern.
        for (size_t p = r.emission.find('{'); p != std::string::npos; p = r.emission.find('{', p + 1)) {
            auto q = r.emission.find('}', p);
            std::string name = r.emission.substr(p + 1, q - p - 1);
            if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(0, dot);
            if (!bound.count(name) && name.find_first_not_of("0123456789") != std::string::npos)
                throw RuleTableError("line " + std::to_string(lineno) + ": unbound slot " + name);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ParseRule> load_rule_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuleTableError("cannot read rule table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rule_table(ss.str());
}

const std::vector<ParseRule>& default_rules() {
    static const std::vector<ParseRule> r = load_rule_table(std::string(GEODEDUCE_DATA_DIR) + "/text_rules.tsv");
    return r;
}

TextParse parse_text(const std::string& text, const std::vector<ParseRule>& rules) {
    auto toks = tokenize(text);
    TextParse out;
    std::set<std::string> seen;
    std::vector<bool> covered(toks.size(), false);
    size_t i = 0;
    while (i < toks.size()) {
        const ParseRule* best = nullptr;
        size_t best_end = i;
        Binding best_b;
        for (const auto& r : rules) {
            auto m = match_from(r, 0, toks, i, {});
            if (!m || m->first == i) continue;
            bool better = !best || m->first > best_end ||
                          (m->first == best_end && (r.priority > best->priority ||
                                                    (r.priority == best->priority && r.emission < best->emission)));
            if (better) {
                best = &r;
                best_end = m->first;
                best_b = m->second;
            }
        }
        if (!best) {
            ++i;
            continue;
        }
        for (size_t k = i; k < best_end; ++k) covered[k] = true;
        for (const auto& s : expand(*best, best_b)) {
            try {
                // Kept in text order; duplicates detected on the canonical form.
                Literal l = parse_literal_raw(s);
                if (seen.insert(canonicalize(l).str()).second) out.literals.push_back(l);
            } catch (const std::exception& e) {
                out.unmatched.push_back("unbuildable literal " + s + ": " + e.what());
            }
        }
        i = best_end;
    }
    // Uncovered spans, ignoring filler and punctuation.
    for (size_t k = 0; k < toks.size();) {
        if (covered[k] || toks[k].kind == Tok::Kind::Stop) {
            ++k;
            continue;
        }
        size_t e = k;
        while (e < toks.size() && !covered[e] && toks[e].kind != Tok::Kind::Stop) ++e;
        size_t a = k, b = e;
        while (a < b && filler().count(toks[a].low)) ++a;
        while (b > a && filler().count(toks[b - 1].low)) --b;
        if (a < b) out.unmatched.push_back(text.substr(toks[a].begin, toks[b - 1].end - toks[a].begin));
        k = e;
    }
    return out;
}

}  // namespace gd
