#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace mitlkit {

enum class Cmp { Lt, Le, Gt, Ge };

inline const char* cmp_symbol(Cmp op) {
    switch (op) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Gt: return ">";
        case Cmp::Ge: return ">=";
    }
    return "?";
}

inline Cmp cmp_from_symbol(const std::string& s) {
    if (s == "<") return Cmp::Lt;
    if (s == "<=") return Cmp::Le;
    if (s == ">") return Cmp::Gt;
    if (s == ">=") return Cmp::Ge;
    throw std::invalid_argument("unknown comparison '" + s + "'");
}

// Clock constraint x ⋈ c with c a natural number or +∞ (nullopt).
struct ClockConstraint {
    Cmp op;
    std::optional<std::uint64_t> bound;

    bool operator==(const ClockConstraint&) const = default;

    std::string to_string() const {
        return std::string("x") + cmp_symbol(op) + (bound ? std::to_string(*bound) : "inf");
    }
};

// Interval over the rationals with open/closed endpoints and optional +∞
// upper bound.  Lower endpoints may be negative (shifting by a scalar can
// push them below zero).  Invariants: lo < hi, or lo == hi with both ends
// closed; an infinite upper bound is always open.
class Interval {
public:
    static Interval closed(Rational lo, Rational hi) { return Interval(lo, false, hi, false, false); }
    static Interval open(Rational lo, Rational hi) { return Interval(lo, true, hi, true, false); }
    static Interval left_open(Rational lo, Rational hi) { return Interval(lo, true, hi, false, false); }
    static Interval right_open(Rational lo, Rational hi) { return Interval(lo, false, hi, true, false); }
    static Interval point(Rational v) { return closed(v, v); }
    static Interval unbounded(Rational lo, bool lo_open) {
        return Interval(lo, lo_open, Rational(0), true, true);
    }
    static Interval make(Rational lo, bool lo_open, std::optional<Rational> hi, bool hi_open) {
        if (!hi) return unbounded(lo, lo_open);
        return Interval(lo, lo_open, *hi, hi_open, false);
    }

    Rational lo() const { return lo_; }
    bool lo_open() const { return lo_open_; }
    bool hi_infinite() const { return hi_inf_; }
    Rational hi() const {
        if (hi_inf_) throw std::logic_error("Interval: sup is infinite");
        return hi_;
    }
    bool hi_open() const { return hi_open_; }

    bool is_singular() const { return !hi_inf_ && lo_ == hi_; }

    bool contains(const Rational& v) const {
        if (v < lo_ || (v == lo_ && lo_open_)) return false;
        if (hi_inf_) return true;
        return v < hi_ || (v == hi_ && !hi_open_);
    }

    Interval shift(const Rational& t) const {
        Interval r = *this;
        r.lo_ = lo_ + t;
        if (!hi_inf_) r.hi_ = hi_ + t;
        return r;
    }

    bool operator==(const Interval& o) const {
        if (hi_inf_ != o.hi_inf_ || lo_ != o.lo_ || lo_open_ != o.lo_open_) return false;
        return hi_inf_ || (hi_ == o.hi_ && hi_open_ == o.hi_open_);
    }
    bool operator!=(const Interval& o) const { return !(*this == o); }

    // Orders by lower endpoint first (open after closed at the same value),
    // then by upper.  Total order used for canonical configuration layout.
    bool operator<(const Interval& o) const {
        if (lo_ != o.lo_) return lo_ < o.lo_;
        if (lo_open_ != o.lo_open_) return !lo_open_;
        if (hi_inf_ != o.hi_inf_) return !hi_inf_;
        if (!hi_inf_) {
            if (hi_ != o.hi_) return hi_ < o.hi_;
            if (hi_open_ != o.hi_open_) return hi_open_;
        }
        return false;
    }

    std::string to_string() const {
        std::string s = lo_open_ ? "(" : "[";
        s += lo_.to_string();
        s += ",";
        s += hi_inf_ ? "inf" : hi_.to_string();
        s += (hi_open_ || hi_inf_) ? ")" : "]";
        return s;
    }

    std::size_t hash() const {
        std::size_t h = lo_.hash() * 31 + (lo_open_ ? 1 : 0);
        h = h * 31 + (hi_inf_ ? 2 : hi_.hash());
        return h * 31 + (hi_open_ ? 1 : 0);
    }

private:
    Interval(Rational lo, bool lo_open, Rational hi, bool hi_open, bool hi_inf)
        : lo_(lo), hi_(hi), lo_open_(lo_open), hi_open_(hi_open || hi_inf), hi_inf_(hi_inf) {
        if (!hi_inf_) {
            if (hi_ < lo_)
                throw std::invalid_argument("Interval: sup below inf");
            if (lo_ == hi_ && (lo_open_ || hi_open_))
                throw std::invalid_argument("Interval: empty interval");
        }
    }

    Rational lo_;
    Rational hi_;
    bool lo_open_;
    bool hi_open_;
    bool hi_inf_;
};

inline Interval interval_shift(const Interval& i, const Rational& t) { return i.shift(t); }
inline Interval interval_minus_scalar(const Interval& i, const Rational& v) { return i.shift(-v); }

// Strictly-before order: every point of i is below every point of j.
inline bool interval_lt(const Interval& i, const Interval& j) {
    if (i.hi_infinite()) return false;
    if (i.hi() < j.lo()) return true;
    return i.hi() == j.lo() && (i.hi_open() || j.lo_open());
}

inline bool interval_disjoint(const Interval& i, const Interval& j) {
    return interval_lt(i, j) || interval_lt(j, i);
}

// Whether every point of i satisfies the clock constraint.
inline bool interval_sat(const Interval& i, const ClockConstraint& cc) {
    if (!cc.bound)
        return cc.op == Cmp::Lt || cc.op == Cmp::Le;
    const Rational c(static_cast<std::int64_t>(*cc.bound));
    switch (cc.op) {
        case Cmp::Lt:
            return !i.hi_infinite() && (i.hi() < c || (i.hi() == c && i.hi_open()));
        case Cmp::Le:
            return !i.hi_infinite() && i.hi() <= c;
        case Cmp::Gt:
            return i.lo() > c || (i.lo() == c && i.lo_open());
        case Cmp::Ge:
            return i.lo() >= c;
    }
    return false;
}

// Smallest interval containing both arguments.
inline Interval interval_hull(const Interval& i, const Interval& j) {
    Rational lo = i.lo();
    bool lo_open = i.lo_open();
    if (j.lo() < lo || (j.lo() == lo && !j.lo_open())) {
        lo = j.lo();
        lo_open = j.lo() == i.lo() ? (i.lo_open() && j.lo_open()) : j.lo_open();
    }
    if (i.hi_infinite() || j.hi_infinite())
        return Interval::unbounded(lo, lo_open);
    Rational hi = i.hi();
    bool hi_open = i.hi_open();
    if (j.hi() > hi || (j.hi() == hi && !j.hi_open())) {
        hi = j.hi();
        hi_open = j.hi() == i.hi() ? (i.hi_open() && j.hi_open()) : j.hi_open();
    }
    return Interval::make(lo, lo_open, hi, hi_open);
}

// Number of clock copies an interval list costs: 1 per singular interval,
// 2 per non-singular one.
inline std::size_t clock_copies(const std::vector<Interval>& intervals) {
    std::size_t n = 0;
    for (const auto& i : intervals) n += i.is_singular() ? 1 : 2;
    return n;
}

}  // namespace mitlkit

template <>
struct std::hash<mitlkit::Interval> {
    std::size_t operator()(const mitlkit::Interval& i) const { return i.hash(); }
};
