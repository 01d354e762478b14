#include "geodeduce/number.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gd {

namespace mp = boost::multiprecision;

Number Number::approx(long double v) {
    Number n;
    n.exact_ = false;
    n.f_ = v;
    return n;
}

long double Number::value() const {
    if (!exact_) return f_;
    return mp::numerator(q_).convert_to<long double>() / mp::denominator(q_).convert_to<long double>();
}

bool Number::is_zero() const { return exact_ ? q_ == 0 : f_ == 0; }
bool Number::is_one() const { return exact_ && q_ == 1; }
bool Number::is_integer() const { return exact_ && mp::denominator(q_) == 1; }

int Number::sign() const {
    if (exact_) return q_ > 0 ? 1 : (q_ < 0 ? -1 : 0);
    return f_ > 0 ? 1 : (f_ < 0 ? -1 : 0);
}

std::optional<long long> Number::as_int() const {
    if (!is_integer()) return std::nullopt;
    auto n = mp::numerator(q_);
    if (mp::abs(n) > 1000000000000LL) return std::nullopt;
    return n.convert_to<long long>();
}

Number Number::operator-() const { return exact_ ? Number(Rat(-q_)) : approx(-f_); }

Number Number::operator+(const Number& o) const {
    if (exact_ && o.exact_) return Number(Rat(q_ + o.q_));
    return approx(value() + o.value());
}
Number Number::operator-(const Number& o) const {
    if (exact_ && o.exact_) return Number(Rat(q_ - o.q_));
    return approx(value() - o.value());
}
Number Number::operator*(const Number& o) const {
    if (exact_ && o.exact_) return Number(Rat(q_ * o.q_));
    return approx(value() * o.value());
}
Number Number::operator/(const Number& o) const {
    if (exact_ && o.exact_) {
        if (o.q_ == 0) return approx(value() / 0.0L);
        return Number(Rat(q_ / o.q_));
    }
    return approx(value() / o.value());
}

Number Number::pow(long long k) const {
    if (!exact_) return approx(std::pow(f_, static_cast<long double>(k)));
    if (k == 0) return Number(1);
    if (k < 0) {
        if (q_ == 0) return approx(1.0L / 0.0L);
        return Number(1) / pow(-k);
    }
    if (k > 64) return approx(std::pow(value(), static_cast<long double>(k)));
    Rat r = 1;
    for (long long i = 0; i < k; ++i) r *= q_;
    return Number(r);
}

static std::optional<mp::cpp_int> exact_isqrt(const mp::cpp_int& n) {
    if (n < 0) return std::nullopt;
    mp::cpp_int r = mp::sqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

Number Number::sqrt() const {
    if (exact_ && q_ >= 0) {
        auto a = exact_isqrt(mp::numerator(q_));
        auto b = exact_isqrt(mp::denominator(q_));
        if (a && b) return Number(Rat(*a, *b));
    }
    return approx(std::sqrt(value()));
}

bool close(long double a, long double b, double rel, double abs) {
    long double d = std::fabs(a - b);
    if (d <= abs) return true;
    long double m = std::max(std::fabs(a), std::fabs(b));
    return d <= rel * m;
}

bool Number::approx_equal(const Number& o) const {
    if (exact_ && o.exact_) return q_ == o.q_;
    return close(value(), o.value());
}

bool Number::operator==(const Number& o) const { return approx_equal(o); }

bool Number::operator<(const Number& o) const {
    if (exact_ && o.exact_) return q_ < o.q_;
    return value() < o.value();
}

static bool only_2_and_5(mp::cpp_int d, int& digits) {
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    digits = std::max(twos, fives);
    return d == 1;
}

std::string Number::formal() const {
    if (exact_ || std::isnan(f_) || std::isinf(f_)) return str();
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.21Lg", f_);
    std::string s = buf;
    if (s.find('e') != std::string::npos) {
        std::snprintf(buf, sizeof buf, "%.40Lf", f_);
        s = buf;
    }
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string Number::str() const {
    if (!exact_) {
        if (std::isnan(f_)) return "nan";
        if (std::isinf(f_)) return f_ > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6Lf", f_);
        std::string s = buf;
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        if (s == "-0") s = "0";
        return s;
    }
    auto num = mp::numerator(q_);
    auto den = mp::denominator(q_);
    if (den == 1) return num.str();
    int digits = 0;
    if (only_2_and_5(den, digits) && digits <= 12) {
        bool neg = num < 0;
        mp::cpp_int a = mp::abs(num);
        mp::cpp_int scale = 1;
        for (int i = 0; i < digits; ++i) scale *= 10;
        mp::cpp_int scaled = a * scale / den;
        std::string s = scaled.str();
        while (static_cast<int>(s.size()) <= digits) s = "0" + s;
        s.insert(s.size() - digits, ".");
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
        return neg ? "-" + s : s;
    }
    return num.str() + "/" + den.str();
}

std::optional<Number> parse_decimal(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-') { neg = true; i = 1; }
    mp::cpp_int intpart = 0, frac = 0, scale = 1;
    bool any = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (dot) return std::nullopt;
            dot = true;
        } else if (c >= '0' && c <= '9') {
            any = true;
            if (dot) {
                frac = frac * 10 + (c - '0');
                scale *= 10;
            } else {
                intpart = intpart * 10 + (c - '0');
            }
        } else {
            return std::nullopt;
        }
    }
    if (!any) return std::nullopt;
    Rat r = Rat(intpart) + Rat(frac, scale);
    if (neg) r = -r;
    // More fractional digits than an exact value ever prints: a rounded float.
    if (scale > mp::cpp_int(1000000000000LL)) return Number::approx(static_cast<long double>(r));
    return Number(r);
}

}  // namespace gd
