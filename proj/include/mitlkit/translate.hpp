#pragma once

#include <set>
#include <string>
#include <vector>

#include "mitl.hpp"
#include "ocata.hpp"

namespace mitlkit {

// One modality occurrence = one automaton location.  Locations are named
// U<n>/R<n> by preorder position so that syntactically equal occurrences
// stay distinct; path is the syntax-tree address ("l"/"r" per descent).
struct ModalityInfo {
    std::string name;
    bool is_release;
    std::string path;
    Interval ivl;
    FormulaPtr node;
};

struct Translation {
    Ocata automaton;
    std::vector<ModalityInfo> modalities;
    FormulaPtr root;
};

inline std::size_t location_count(const FormulaPtr& p) { return 1 + size(p); }

namespace detail {

inline void collect_modalities(const FormulaPtr& p, const std::string& path,
                               std::vector<ModalityInfo>& out) {
    switch (p->kind) {
        case FKind::Until: case FKind::Release: {
            const std::string name =
                (p->kind == FKind::Release ? "R" : "U") + std::to_string(out.size());
            out.push_back({name, p->kind == FKind::Release, path, *p->ivl, p});
            collect_modalities(p->lhs, path + "l", out);
            collect_modalities(p->rhs, path + "r", out);
            return;
        }
        case FKind::And: case FKind::Or:
            collect_modalities(p->lhs, path + "l", out);
            collect_modalities(p->rhs, path + "r", out);
            return;
        default:
            return;
    }
}

inline std::uint64_t guard_const(const Rational& r) { return static_cast<std::uint64_t>(r.num()); }

// x ∈ I as a conjunction (⊤ when unconstrained: I = [0,inf)).
inline TfPtr membership(const Interval& i) {
    TfPtr res;
    auto add = [&](const ClockConstraint& cc) {
        TfPtr c = tf_constraint(cc);
        res = res ? tf_and(res, c) : c;
    };
    if (i.lo() > Rational(0) || i.lo_open())
        add({i.lo_open() ? Cmp::Gt : Cmp::Ge, guard_const(i.lo())});
    if (!i.hi_infinite())
        add({i.hi_open() ? Cmp::Lt : Cmp::Le, guard_const(i.hi())});
    return res ? res : tf_true();
}

// x ∉ I as the disjunction of the two complement half-lines (⊥ when I
// covers the whole clock range).
inline TfPtr non_membership(const Interval& i) {
    TfPtr res;
    auto add = [&](const ClockConstraint& cc) {
        TfPtr c = tf_constraint(cc);
        res = res ? tf_or(res, c) : c;
    };
    if (i.lo() > Rational(0))
        add({i.lo_open() ? Cmp::Le : Cmp::Lt, guard_const(i.lo())});
    else if (i.lo_open())  // complement of (0,..) keeps only x <= 0
        add({Cmp::Le, 0});
    if (!i.hi_infinite())
        add({i.hi_open() ? Cmp::Ge : Cmp::Gt, guard_const(i.hi())});
    return res ? res : tf_false();
}

struct DeltaCtx {
    const std::vector<ModalityInfo>* modalities;
    std::string letter;

    const std::string& name_at(const std::string& path) const {
        for (const auto& m : *modalities)
            if (m.path == path) return m.name;
        throw std::logic_error("translate: no location for path '" + path + "'");
    }
};

// The transition recursion.  A modality subformula contributes its
// location's defining clause inline; the caller wraps the whole thing in a
// reset when building δ(init,·).
inline TfPtr delta(const DeltaCtx& ctx, const FormulaPtr& p, const std::string& path) {
    switch (p->kind) {
        case FKind::True: return tf_true();
        case FKind::False: return tf_false();
        case FKind::Atom: return p->atom == ctx.letter ? tf_true() : tf_false();
        case FKind::NegAtom: return p->atom == ctx.letter ? tf_false() : tf_true();
        case FKind::And:
            return tf_and(delta(ctx, p->lhs, path + "l"), delta(ctx, p->rhs, path + "r"));
        case FKind::Or:
            return tf_or(delta(ctx, p->lhs, path + "l"), delta(ctx, p->rhs, path + "r"));
        case FKind::Until: {
            const Interval& i = *p->ivl;
            TfPtr fire = tf_and(tf_reset(delta(ctx, p->rhs, path + "r")), membership(i));
            TfPtr wait = tf_and(tf_reset(delta(ctx, p->lhs, path + "l")), tf_loc(ctx.name_at(path)));
            if (!i.hi_infinite())
                wait = tf_and(wait, tf_constraint({Cmp::Le, guard_const(i.hi())}));
            return tf_or(fire, wait);
        }
        case FKind::Release: {
            const Interval& i = *p->ivl;
            TfPtr obliged = tf_or(tf_reset(delta(ctx, p->rhs, path + "r")), non_membership(i));
            TfPtr release = tf_or(tf_reset(delta(ctx, p->lhs, path + "l")), tf_loc(ctx.name_at(path)));
            if (!i.hi_infinite())
                release = tf_or(release, tf_constraint({Cmp::Gt, guard_const(i.hi())}));
            return tf_and(obliged, release);
        }
        case FKind::Not:
            throw std::invalid_argument("mitl_to_ocata: formula must be in negative normal form");
    }
    throw std::logic_error("delta: bad node");
}

}  // namespace detail

inline Translation translate(const FormulaPtr& phi, const std::vector<std::string>& alphabet) {
    if (!is_nnf(phi))
        throw std::invalid_argument("mitl_to_ocata: formula must be in negative normal form");
    validate(phi);
    std::vector<ModalityInfo> mods;
    detail::collect_modalities(phi, "", mods);
    std::vector<std::string> locations{"init"};
    std::set<std::string> accepting;
    for (const auto& m : mods) {
        locations.push_back(m.name);
        if (m.is_release) accepting.insert(m.name);
    }
    Ocata a(alphabet, locations, "init", accepting);
    for (const auto& letter : alphabet) {
        detail::DeltaCtx ctx{&mods, letter};
        a.add_transition("init", letter, tf_reset(detail::delta(ctx, phi, "")));
        for (const auto& m : mods)
            a.add_transition(m.name, letter, detail::delta(ctx, m.node, m.path));
    }
    return {std::move(a), std::move(mods), phi};
}

inline std::vector<std::string> default_alphabet(const FormulaPtr& phi) {
    std::set<std::string> atoms;
    collect_atoms(phi, atoms);
    return {atoms.begin(), atoms.end()};
}

inline Ocata mitl_to_ocata(const FormulaPtr& phi, const std::vector<std::string>& alphabet) {
    return translate(phi, alphabet).automaton;
}

inline Ocata mitl_to_ocata(const FormulaPtr& phi) {
    return translate(phi, default_alphabet(phi)).automaton;
}

// ---------------------------------------------------------------------------
// Acceptance criteria for runs starting in a modality location with a
// nontrivial interval.  Both quantify event times from "now" (the start of
// the residual word, time origin 0), which is how accepts_from counts
// delays; subformula obligations use the ordinary pointwise semantics.
// ---------------------------------------------------------------------------

namespace detail {
inline void require_closed_bounded(const Interval& j, const char* who) {
    if (j.hi_infinite() || j.lo_open() || j.hi_open())
        throw std::invalid_argument(std::string(who) + ": starting interval must be closed and bounded");
}

// ∃m: τ_m ∈ win ∧ (θ,m) ⊨ φ2 ∧ ∀m'<m: (θ,m') ⊨ φ1
inline bool until_from_now(const TimedWord& th, const FormulaPtr& p1, const FormulaPtr& p2,
                           const Interval& win) {
    for (std::size_t m = 1; m <= th.size(); ++m) {
        if (win.contains(th[m - 1].time) && eval(th, m, p2)) return true;
        if (!eval(th, m, p1)) return false;
    }
    return false;
}

// Dual: no m with τ_m ∈ win, ¬φ2 at m, and ¬φ1 strictly before m.
inline bool release_from_now(const TimedWord& th, const FormulaPtr& p1, const FormulaPtr& p2,
                             const Interval& win) {
    for (std::size_t m = 1; m <= th.size(); ++m) {
        if (win.contains(th[m - 1].time) && !eval(th, m, p2)) return false;
        if (eval(th, m, p1)) return true;
    }
    return true;
}
}  // namespace detail

// Whether an Id-run from {(ℓ_{φ1 U_I φ2}, J)} accepts θ: some event must
// discharge the obligation inside I shifted by both ends of J.
inline bool check_until_criterion(const TimedWord& th, const FormulaPtr& p1, const FormulaPtr& p2,
                                  const Interval& i, const Interval& j) {
    detail::require_closed_bounded(j, "check_until_criterion");
    const Interval lo_win = interval_minus_scalar(i, j.lo());
    const Interval hi_win = interval_minus_scalar(i, j.hi());
    for (std::size_t m = 1; m <= th.size(); ++m) {
        if (lo_win.contains(th[m - 1].time) && hi_win.contains(th[m - 1].time) && eval(th, m, p2))
            return true;
        if (!eval(th, m, p1)) return false;
    }
    return false;
}

// Whether an Id-run from {(ℓ_{φ1 R_I φ2}, J)} accepts θ.  The release
// obligation quantifies over every v ∈ J; the verdict is piecewise constant in v
// between the points where an event enters or leaves I − v, so sampling
// J's endpoints, every boundary point inf(I)−τ_m / sup(I)−τ_m inside J,
// and a midpoint between consecutive samples decides it.
inline bool check_release_criterion(const TimedWord& th, const FormulaPtr& p1, const FormulaPtr& p2,
                                    const Interval& i, const Interval& j,
                                    const std::vector<Rational>& extra_samples = {}) {
    detail::require_closed_bounded(j, "check_release_criterion");
    std::vector<Rational> samples{j.lo(), j.hi()};
    for (const auto& e : th.events()) {
        const Rational lo_b = i.lo() - e.time;
        if (j.contains(lo_b)) samples.push_back(lo_b);
        if (!i.hi_infinite()) {
            const Rational hi_b = i.hi() - e.time;
            if (j.contains(hi_b)) samples.push_back(hi_b);
        }
    }
    for (const auto& v : extra_samples)
        if (j.contains(v)) samples.push_back(v);
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    std::vector<Rational> mids;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
        mids.push_back((samples[k] + samples[k + 1]) / Rational(2));
    samples.insert(samples.end(), mids.begin(), mids.end());
    for (const auto& v : samples)
        if (!detail::release_from_now(th, p1, p2, interval_minus_scalar(i, v)))
            return false;
    return true;
}

}  // namespace mitlkit
