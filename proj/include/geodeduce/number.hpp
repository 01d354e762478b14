#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace gd {

using Rat = boost::multiprecision::cpp_rational;

// A numeric value that is either an exact rational or an approximate float.
// Arithmetic stays exact while both operands are exact.
class Number {
public:
    Number() : exact_(true), q_(0), f_(0) {}
    Number(long long v) : exact_(true), q_(v), f_(0) {}  // NOLINT
    Number(const Rat& q) : exact_(true), q_(q), f_(0) {}  // NOLINT
    static Number approx(long double v);
    static Number ratio(long long n, long long d) { return Number(Rat(n, d)); }

    bool exact() const { return exact_; }
    const Rat& rat() const { return q_; }
    long double value() const;

    bool is_zero() const;
    bool is_one() const;
    bool is_integer() const;
    int sign() const;
    // True when value is an exact integer representable as int.
    std::optional<long long> as_int() const;

    Number operator-() const;
    Number operator+(const Number& o) const;
    Number operator-(const Number& o) const;
    Number operator*(const Number& o) const;
    Number operator/(const Number& o) const;
    Number& operator+=(const Number& o) { return *this = *this + o; }
    Number& operator-=(const Number& o) { return *this = *this - o; }
    Number& operator*=(const Number& o) { return *this = *this * o; }
    Number& operator/=(const Number& o) { return *this = *this / o; }

    // Integer power; exact when the base is exact.
    Number pow(long long k) const;
    // Exact square root when the rational is a perfect square, else approximate.
    Number sqrt() const;

    // Tolerant comparison: 1e-6 relative / 1e-9 absolute when either side is approximate.
    bool approx_equal(const Number& o) const;
    bool operator==(const Number& o) const;
    bool operator<(const Number& o) const;

    // Decimal when the denominator is of the form 2^a5^b, "p/q" otherwise.
    std::string str() const;
    // Round-trippable text for formal literals; approximate values keep full precision.
    std::string formal() const;

private:
    bool exact_;
    Rat q_;
    long double f_;
};

inline constexpr double kRelTol = 1e-6;
inline constexpr double kAbsTol = 1e-9;

bool close(long double a, long double b, double rel = kRelTol, double abs = kAbsTol);

// Parse an integer or decimal literal ("12", "3.5", "-0.25"); exact up to 12 fractional digits, approximate beyond.
std::optional<Number> parse_decimal(const std::string& s);

}  // namespace gd
