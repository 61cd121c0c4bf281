#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "configuration.hpp"
#include "mitl.hpp"
#include "ocata.hpp"

namespace mitlkit {

// ---------------------------------------------------------------------------
// Definition-3 contract
// ---------------------------------------------------------------------------

// Checks the three approximation conditions of C' against C, per location:
// (i) no more clock copies, (ii) every original interval is covered by some
// new one, (iii) every new interval inherits its inf and sup from original
// intervals.  Endpoint provenance compares values only; Merge may close an
// endpoint that was open.
inline bool validate_approx(const Configuration& c, const Configuration& cp) {
    std::set<std::string> locs;
    for (const auto& [loc, list] : c.locations()) { (void)list; locs.insert(loc); }
    for (const auto& [loc, list] : cp.locations()) { (void)list; locs.insert(loc); }
    for (const auto& loc : locs) {
        const auto old_list = c.at(loc);
        const auto new_list = cp.at(loc);
        if (clock_copies(new_list) > clock_copies(old_list)) return false;
        for (const auto& i : old_list) {
            bool covered = false;
            for (const auto& j : new_list) {
                const bool lo_ok = j.lo() < i.lo() || (j.lo() == i.lo() && (!j.lo_open() || i.lo_open()));
                const bool hi_ok = j.hi_infinite() ||
                                   (!i.hi_infinite() &&
                                    (i.hi() < j.hi() || (i.hi() == j.hi() && (!j.hi_open() || i.hi_open()))));
                if (lo_ok && hi_ok) { covered = true; break; }
            }
            if (!covered) return false;
        }
        for (const auto& j : new_list) {
            bool lo_from = false, hi_from = false;
            for (const auto& i : old_list) {
                if (i.lo() == j.lo()) lo_from = true;
                if (j.hi_infinite() ? i.hi_infinite() : (!i.hi_infinite() && i.hi() == j.hi()))
                    hi_from = true;
            }
            if (!lo_from || !hi_from) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Merge, F^k, hull
// ---------------------------------------------------------------------------

// Absorbs a leading fresh copy: if the list starts with [0,0] and has a
// second interval, the first two become [0, sup(I1)] (closed; [0,inf) if I1
// is unbounded).  Anything else is returned untouched.
inline std::vector<Interval> merge_location(const std::vector<Interval>& list) {
    if (list.size() < 2 || !(list[0] == Interval::point(Rational(0)))) return list;
    std::vector<Interval> out;
    out.push_back(list[1].hi_infinite() ? Interval::unbounded(Rational(0), false)
                                        : Interval::closed(Rational(0), list[1].hi()));
    out.insert(out.end(), list.begin() + 2, list.end());
    return out;
}

namespace detail {
inline bool sorted_disjoint(const std::vector<Interval>& list) {
    for (std::size_t k = 0; k + 1 < list.size(); ++k)
        if (!interval_lt(list[k], list[k + 1])) return false;
    return true;
}
}  // namespace detail

// Convex hull per location, optionally restricted to a subset of locations.
inline Configuration hull(const Configuration& c) {
    Configuration out;
    for (const auto& [loc, list] : c.locations()) {
        Interval h = list.front();
        for (std::size_t k = 1; k < list.size(); ++k) h = interval_hull(h, list[k]);
        out.set_location(loc, {h});
    }
    return out;
}

inline Configuration hull_on(const Configuration& c, const std::set<std::string>& locs) {
    Configuration out;
    for (const auto& [loc, list] : c.locations()) {
        if (!locs.count(loc)) {
            out.set_location(loc, list);
            continue;
        }
        Interval h = list.front();
        for (std::size_t k = 1; k < list.size(); ++k) h = interval_hull(h, list[k]);
        out.set_location(loc, {h});
    }
    return out;
}

// F^k: every merge/no-merge combination across locations whose total copy
// count stays within k (the no-merge combination first, so the identity
// successor is explored before coarser ones); when no combination fits, the
// full per-location hull, kept total for the sake of completeness.
// Combinations whose merged list would overlap a later interval are skipped.
inline std::vector<Configuration> f_k(const Configuration& c, std::size_t k) {
    if (k < 1) throw std::invalid_argument("f_k: k must be >= 1");
    std::vector<std::string> mergeable;
    for (const auto& [loc, list] : c.locations()) {
        const auto merged = merge_location(list);
        if (merged != list && detail::sorted_disjoint(merged)) mergeable.push_back(loc);
    }
    std::vector<Configuration> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << mergeable.size()); ++mask) {
        Configuration cand = c;
        for (std::size_t b = 0; b < mergeable.size(); ++b)
            if (mask & (std::uint64_t(1) << b))
                cand.set_location(mergeable[b], merge_location(c.at(mergeable[b])));
        if (cand.copies() <= k &&
            std::find(out.begin(), out.end(), cand) == out.end())
            out.push_back(std::move(cand));
    }
    if (out.empty()) out.push_back(hull(c));
    return out;
}

// ---------------------------------------------------------------------------
// Copy-count bound recursion
// ---------------------------------------------------------------------------

struct BoundTriple {
    std::uint64_t m = 0;      // M
    std::uint64_t m_inf = 0;  // M^inf
    std::uint64_t m_one = 0;  // M^1

    bool operator==(const BoundTriple&) const = default;
};

namespace detail {

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

inline std::uint64_t nat_of(const Rational& r) { return static_cast<std::uint64_t>(r.num()); }

// ceil(inf(I)/|I|); an unbounded interval has infinite width, so the ratio
// of a finite inf is 0.
inline std::uint64_t ceil_inf_term(const Interval& i) {
    if (i.hi_infinite()) return 0;
    return ceil_div(nat_of(i.lo()), nat_of(i.hi()) - nat_of(i.lo()));
}

// ceil(sup(I)/|I|); for unbounded intervals both are infinite and the term
// is taken as 1 (a safe over-count).
inline std::uint64_t ceil_sup_term(const Interval& i) {
    if (i.hi_infinite()) return 1;
    return ceil_div(nat_of(i.hi()), nat_of(i.hi()) - nat_of(i.lo()));
}

}  // namespace detail

// The M / M^inf / M^1 recursion bounding how many clock copies suffice per
// location.  Constants count like atoms.  Requires NNF.
inline BoundTriple m_bound(const FormulaPtr& p) {
    switch (p->kind) {
        case FKind::True: case FKind::False: case FKind::Atom: case FKind::NegAtom:
            return {2, 0, 0};
        case FKind::Not:
            throw std::invalid_argument("m_bound: formula must be in negative normal form");
        case FKind::And: {
            const BoundTriple a = m_bound(p->lhs), b = m_bound(p->rhs);
            return {std::max<std::uint64_t>(2, a.m_one + b.m_one), a.m_inf + b.m_inf, a.m_one + b.m_one};
        }
        case FKind::Or: {
            const BoundTriple a = m_bound(p->lhs), b = m_bound(p->rhs);
            return {std::max<std::uint64_t>(2, std::max(a.m_one, b.m_one)),
                    std::max(a.m_inf, b.m_inf), std::max(a.m_one, b.m_one)};
        }
        case FKind::Until: {
            const BoundTriple a = m_bound(p->lhs), b = m_bound(p->rhs);
            const std::uint64_t own = 4 * detail::ceil_inf_term(*p->ivl) + 2;
            return {std::max<std::uint64_t>(2, a.m_inf + b.m_one + 1),
                    own + a.m_inf + b.m_inf, a.m_inf + b.m_one + 1};
        }
        case FKind::Release: {
            const BoundTriple a = m_bound(p->lhs), b = m_bound(p->rhs);
            const std::uint64_t own = 2 * detail::ceil_sup_term(*p->ivl) + 2;
            return {std::max<std::uint64_t>(2, a.m_one + b.m_inf + 1),
                    own + a.m_inf + b.m_inf, a.m_one + b.m_inf + 1};
        }
    }
    throw std::logic_error("m_bound: bad node");
}

// K = max(2|L|, M(Φ)); |L| is 1 (initial copy) + number of modalities.
inline std::size_t k_star(const FormulaPtr& p) {
    return std::max<std::size_t>(2 * (1 + size(p)), m_bound(p).m);
}

inline std::size_t k_star(const FormulaPtr& p, const Ocata& a) {
    return std::max<std::size_t>(2 * a.locations().size(), m_bound(p).m);
}

inline ApproxFn approx_fk(std::size_t k) {
    return {"fk:" + std::to_string(k), k,
            [k](const Configuration& c) { return f_k(c, k); }};
}

inline ApproxFn f_star(const FormulaPtr& p) {
    const std::size_t k = k_star(p);
    return {"fstar", k, [k](const Configuration& c) { return f_k(c, k); }};
}

inline ApproxFn approx_hull_all() {
    return {"hull:all", std::nullopt,
            [](const Configuration& c) { return std::vector<Configuration>{hull(c)}; }};
}

inline ApproxFn approx_hull_on(const std::set<std::string>& locs) {
    std::string name = "hull:";
    for (const auto& l : locs) name += (name.size() > 5 ? "," : "") + l;
    return {name, std::nullopt,
            [locs](const Configuration& c) { return std::vector<Configuration>{hull_on(c, locs)}; }};
}

// CLI names: "id", "fk:<k>", "fstar", "hull:<loc,loc,...|all>".  fstar needs
// the formula the automaton came from.
inline ApproxFn approx_by_name(const std::string& name, const FormulaPtr& phi) {
    if (name == "id") return approx_id();
    if (name == "fstar") {
        if (!phi) throw std::invalid_argument("approximation 'fstar' needs a formula context");
        return f_star(phi);
    }
    if (name.rfind("fk:", 0) == 0) {
        const std::size_t k = std::stoul(name.substr(3));
        return approx_fk(k);
    }
    if (name.rfind("hull:", 0) == 0) {
        const std::string rest = name.substr(5);
        if (rest == "all") return approx_hull_all();
        std::set<std::string> locs;
        std::size_t start = 0;
        while (start <= rest.size()) {
            const std::size_t comma = rest.find(',', start);
            const std::string tok = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!tok.empty()) locs.insert(tok);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (locs.empty()) throw std::invalid_argument("hull approximation needs locations or 'all'");
        return approx_hull_on(locs);
    }
    throw std::invalid_argument("unknown approximation '" + name + "'");
}

}  // namespace mitlkit
