#pragma once

#include "geodeduce/formal_lang.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace gd {

// One pattern element: a literal token (matched case-insensitively) or a typed slot.
struct PatternItem {
    enum class Kind { Word, Point, Segment, Angle, Triangle, Quad, Points, Number, Var, Expr, Term, TermChain };
    Kind kind = Kind::Word;
    std::string text;  // the word, or the slot name
};

struct ParseRule {
    int priority = 0;
    std::vector<PatternItem> pattern;
    std::string emission;  // ';'-separated literal templates; "-" consumes text silently
    std::string source;    // the pattern as written
};

class RuleTableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tab-separated rows (priority, pattern, emission); '#' starts a comment.
std::vector<ParseRule> parse_rule_table(const std::string& tsv);
std::vector<ParseRule> load_rule_table(const std::string& path);
// The table shipped in data/text_rules.tsv.
const std::vector<ParseRule>& default_rules();

struct TextParse {
    std::vector<Literal> literals;
    std::vector<std::string> unmatched;  // uncovered text spans, filler words dropped
};

// Longest match at each position; ties go to higher priority, then to the smaller emission text.
TextParse parse_text(const std::string& text, const std::vector<ParseRule>& rules = default_rules());

}  // namespace gd
