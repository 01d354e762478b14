#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gd {

struct Literal;
using LiteralPtr = std::shared_ptr<const Literal>;

// One argument of a predicate application.
struct Arg {
    enum class Kind { Id, Lit, Expr, Placeholder };
    Kind kind = Kind::Id;
    std::string text;  // identifier name or expression text (whitespace stripped)
    LiteralPtr lit;    // set when kind == Lit

    static Arg id(std::string name);
    static Arg expr(std::string text);
    static Arg sub(Literal l);
    static Arg placeholder();

    bool is_id() const { return kind == Kind::Id; }
    bool is_lit() const { return kind == Kind::Lit; }
    bool is_expr() const { return kind == Kind::Expr; }
    std::string str() const;
};

struct Literal {
    enum class Form { App, BareId, BareExpr };
    Form form = Form::App;
    std::string pred;       // predicate name for App; the text for bare forms
    std::vector<Arg> args;

    static Literal app(std::string pred, std::vector<Arg> args);

    std::string str() const;
    bool operator==(const Literal& o) const { return str() == o.str(); }
    bool operator<(const Literal& o) const { return str() < o.str(); }

    // Convenience accessors for App literals.
    size_t arity() const { return args.size(); }
    const Arg& arg(size_t i) const { return args.at(i); }
    // Identifier names of all Id arguments, in order.
    std::vector<std::string> ids() const;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownPredicate, ArityMismatch, MissingGoal, MultipleGoals, BadFact };
    ParseError(Kind k, std::string msg, size_t pos = 0, int line = 0);
    Kind kind;
    size_t pos;
    int line;
};

struct PredicateInfo {
    std::string name;
    int min_arity;
    int max_arity;  // -1 for variadic
    bool internal;  // engine-only predicate
};

// Catalog of accepted predicates, sorted by name.
const std::vector<PredicateInfo>& predicate_catalog();
const PredicateInfo* find_predicate(const std::string& name);

bool is_polygon_pred(const std::string& p);
// Number of vertices implied by a polygon predicate name, 0 if variadic.
int polygon_size(const std::string& p);

bool is_identifier(const std::string& s);

// Parse one logic form and return it canonicalized.
Literal parse_literal(const std::string& text);
// Parse without canonicalization (used by tests of the canonicalizer).
Literal parse_literal_raw(const std::string& text);
std::string print_literal(const Literal& l);

Literal canonicalize(const Literal& l);

struct Formalization {
    std::vector<Literal> facts;  // canonical, deduplicated, in first-seen order
    Literal goal;                // the target term inside Find(...)
    Literal find;                // the Find literal itself
};

// One literal per line; blank lines and '#' comments skipped.
Formalization parse_problem(const std::string& text);
std::string print_problem(const Formalization& f);

}  // namespace gd
