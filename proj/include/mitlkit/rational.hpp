#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mitlkit {

// Exact rational arithmetic on int64 numerator/denominator, always kept
// normalized (gcd 1, positive denominator).  Magnitudes in this toolkit stay
// tiny (grid timestamps, small constants), but intermediates go through
// __int128 so mixed-denominator sums cannot silently wrap.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0)
            throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        num_ = g ? n / g : n;
        den_ = g ? d / g : d;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                    i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                    i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0)
            throw std::invalid_argument("Rational: division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Accepts "3", "-3", "7/2" and terminating decimals like "0.25".
    static Rational parse(const std::string& text) {
        if (text.empty())
            throw std::invalid_argument("Rational: empty string");
        std::size_t pos = 0;
        bool neg = false;
        if (text[pos] == '-' || text[pos] == '+') { neg = text[pos] == '-'; ++pos; }
        std::int64_t intpart = 0;
        const std::size_t digits_start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            intpart = intpart * 10 + (text[pos++] - '0');
        if (pos == digits_start)
            throw std::invalid_argument("Rational: bad number '" + text + "'");
        Rational r(intpart);
        if (pos < text.size() && text[pos] == '/') {
            ++pos;
            std::int64_t den = 0;
            const std::size_t den_start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                den = den * 10 + (text[pos++] - '0');
            if (pos == den_start || pos != text.size())
                throw std::invalid_argument("Rational: bad fraction '" + text + "'");
            r = Rational(intpart, den);
        } else if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::int64_t frac = 0, scale = 1;
            const std::size_t frac_start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                frac = frac * 10 + (text[pos++] - '0');
                scale *= 10;
            }
            if (pos == frac_start || pos != text.size())
                throw std::invalid_argument("Rational: bad decimal '" + text + "'");
            r = Rational(intpart) + Rational(frac, scale);
        } else if (pos != text.size()) {
            throw std::invalid_argument("Rational: trailing junk in '" + text + "'");
        }
        return neg ? -r : r;
    }

    // Integers print bare; denominators of the form 2^a 5^b print as an exact
    // decimal; everything else falls back to "p/q".
    std::string to_string() const {
        if (den_ == 1)
            return std::to_string(num_);
        std::int64_t d = den_;
        int twos = 0, fives = 0;
        while (d % 2 == 0) { d /= 2; ++twos; }
        while (d % 5 == 0) { d /= 5; ++fives; }
        if (d != 1)
            return std::to_string(num_) + "/" + std::to_string(den_);
        const int k = twos > fives ? twos : fives;
        i128 scaled = i128(num_ < 0 ? -num_ : num_);
        for (int i = twos; i < k; ++i) scaled *= 2;
        for (int i = fives; i < k; ++i) scaled *= 5;
        i128 pow10 = 1;
        for (int i = 0; i < k; ++i) pow10 *= 10;
        std::string whole = u128_str(scaled / pow10);
        std::string frac = u128_str(scaled % pow10);
        frac.insert(frac.begin(), k - static_cast<int>(frac.size()), '0');
        return (num_ < 0 ? "-" : "") + whole + "." + frac;
    }

    std::size_t hash() const {
        return std::hash<std::int64_t>()(num_) * 1000003u ^ std::hash<std::int64_t>()(den_);
    }

private:
    using i128 = __int128;

    static Rational make(i128 n, i128 d) {
        if (d < 0) { n = -n; d = -d; }
        const i128 g = gcd128(n < 0 ? -n : n, d);
        if (g) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: value out of range");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }
    static i128 gcd128(i128 a, i128 b) {
        while (b) { const i128 t = a % b; a = b; b = t; }
        return a;
    }
    static std::string u128_str(i128 v) {
        if (v == 0) return "0";
        std::string s;
        while (v > 0) { s.insert(s.begin(), static_cast<char>('0' + int(v % 10))); v /= 10; }
        return s;
    }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace mitlkit

template <>
struct std::hash<mitlkit::Rational> {
    std::size_t operator()(const mitlkit::Rational& r) const { return r.hash(); }
};
