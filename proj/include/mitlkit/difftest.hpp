#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "approx.hpp"
#include "mitl.hpp"
#include "ocata.hpp"
#include "ta.hpp"
#include "timed_word.hpp"
#include "translate.hpp"

namespace mitlkit {

namespace detail {

// splitmix64 step; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Non-singular interval with natural endpoints; the upper end may be
// infinite and is forced to be when the lower end hits maxConst.
inline Interval gen_interval(std::mt19937_64& rng, std::uint64_t maxConst) {
    const std::uint64_t lo = detail::pick(rng, maxConst + 1);
    const bool lo_open = lo > 0 && detail::pick(rng, 2) == 0;
    if (lo == maxConst || detail::pick(rng, 3) == 0)
        return Interval::unbounded(Rational(static_cast<std::int64_t>(lo)), lo_open);
    const std::uint64_t hi = lo + 1 + detail::pick(rng, maxConst - lo);
    const bool hi_open = detail::pick(rng, 2) == 0;
    return Interval::make(Rational(static_cast<std::int64_t>(lo)), lo_open,
                          Rational(static_cast<std::int64_t>(hi)), hi_open);
}

namespace detail {

inline FormulaPtr gen_formula_rec(std::mt19937_64& rng, std::size_t budget, int depth,
                                  std::uint64_t maxConst, const std::vector<std::string>& ab) {
    auto atom = [&]() { return f_atom(ab[pick(rng, ab.size())]); };
    auto leaf = [&]() -> FormulaPtr {
        switch (pick(rng, 10)) {
            case 0: return f_true();
            case 1: return f_false();
            case 2: case 3: case 4: return f_neg_atom(ab[pick(rng, ab.size())]);
            default: return atom();
        }
    };
    if (depth >= 4 || (budget == 0 && depth >= 3)) return leaf();
    const std::uint64_t r = pick(rng, 100);
    if (budget > 0 && r < 40) {
        const Interval ivl = gen_interval(rng, maxConst);
        const std::size_t lb = pick(rng, budget);  // children share budget-1
        const std::size_t rb = budget - 1 - lb;
        const bool release = r >= 25;
        // A constant on the left reproduces the common eventually/globally
        // shapes often enough to matter.
        FormulaPtr lhs = (pick(rng, 3) == 0)
                             ? (release ? f_false() : f_true())
                             : gen_formula_rec(rng, lb, depth + 1, maxConst, ab);
        FormulaPtr rhs = gen_formula_rec(rng, rb, depth + 1, maxConst, ab);
        return release ? f_release(std::move(lhs), ivl, std::move(rhs))
                       : f_until(std::move(lhs), ivl, std::move(rhs));
    }
    if (r < 60) {
        const std::size_t lb = pick(rng, budget + 1);
        FormulaPtr lhs = gen_formula_rec(rng, lb, depth + 1, maxConst, ab);
        FormulaPtr rhs = gen_formula_rec(rng, budget - lb, depth + 1, maxConst, ab);
        return r < 50 ? f_and(std::move(lhs), std::move(rhs)) : f_or(std::move(lhs), std::move(rhs));
    }
    return leaf();
}

}  // namespace detail

inline FormulaPtr gen_formula(std::uint64_t seed, std::size_t maxModalities, std::uint64_t maxConst,
                              const std::vector<std::string>& alphabet) {
    std::mt19937_64 rng(seed);
    return detail::gen_formula_rec(rng, maxModalities, 0, maxConst, alphabet);
}

inline TimedWord gen_word(std::uint64_t seed, std::size_t maxLen, std::uint64_t gridDenominator,
                          std::uint64_t horizon, const std::vector<std::string>& alphabet) {
    std::mt19937_64 rng(seed);
    const std::size_t len = maxLen == 0 ? 0 : detail::pick(rng, maxLen + 1);
    std::vector<Rational> times;
    for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t ticks = detail::pick(rng, horizon * gridDenominator + 1);
        times.push_back(Rational(static_cast<std::int64_t>(ticks),
                                 static_cast<std::int64_t>(gridDenominator)));
    }
    std::sort(times.begin(), times.end());
    std::vector<TimedEvent> events;
    for (const auto& t : times)
        events.push_back({alphabet[detail::pick(rng, alphabet.size())], t});
    return TimedWord(std::move(events));
}

// Random automaton in the raw arc format (targets and guards unrestricted
// beyond well-formedness); exercises the semantics outside the compiled
// fragment.
inline Ocata gen_ocata(std::uint64_t seed, const std::vector<std::string>& alphabet,
                       std::size_t maxLocations, std::uint64_t maxConst) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 1 + detail::pick(rng, maxLocations);
    std::vector<std::string> locs;
    for (std::size_t i = 0; i < n; ++i) locs.push_back("l" + std::to_string(i));
    std::set<std::string> accepting;
    for (const auto& l : locs)
        if (detail::pick(rng, 2) == 0) accepting.insert(l);
    Ocata a(alphabet, locs, "l0", accepting);
    for (const auto& loc : locs)
        for (const auto& letter : alphabet) {
            const std::size_t arcs = detail::pick(rng, 4);
            for (std::size_t k = 0; k < arcs; ++k) {
                ArcBody body;
                std::set<std::pair<std::string, bool>> targets;
                const std::size_t tn = detail::pick(rng, 3);
                for (std::size_t t = 0; t < tn; ++t)
                    targets.emplace(locs[detail::pick(rng, n)], detail::pick(rng, 2) == 0);
                body.targets.assign(targets.begin(), targets.end());
                const std::size_t gn = detail::pick(rng, 3);
                for (std::size_t g = 0; g < gn; ++g)
                    body.guard.push_back({static_cast<Cmp>(detail::pick(rng, 4)),
                                          detail::pick(rng, maxConst + 1)});
                std::sort(body.guard.begin(), body.guard.end(), detail::constraint_before);
                body.guard.erase(std::unique(body.guard.begin(), body.guard.end()),
                                 body.guard.end());
                a.add_arc(loc, letter, std::move(body));
            }
        }
    return a;
}

// Random member of the implemented approximation families.
inline ApproxFn gen_approx(std::uint64_t seed, const std::vector<std::string>& locations) {
    std::mt19937_64 rng(seed);
    switch (detail::pick(rng, 4)) {
        case 0: return approx_id();
        case 1: return approx_fk(1 + detail::pick(rng, 4));
        case 2: return approx_hull_all();
        default: {
            std::set<std::string> subset;
            subset.insert(locations[detail::pick(rng, locations.size())]);
            for (const auto& l : locations)
                if (detail::pick(rng, 3) == 0) subset.insert(l);
            return approx_hull_on(subset);
        }
    }
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct TrialReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string formula;
    std::string word;
    bool eval_v = false;
    bool id_v = false;
    bool fstar_v = false;
    std::optional<bool> ta_v;
    std::size_t max_copies = 0;   // over the f* witness, 0 when rejected
    std::size_t k_bound = 0;
    bool k_respected = true;      // witness stays within k_bound
    bool loc_bound_ok = true;     // some witness respects per-location caps
    bool agree = true;
    bool prop1_violation = false;  // approximation accepts, exact rejects
    std::optional<std::string> witness_text;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["trial"] = index;
        j["seed"] = seed;
        j["formula"] = formula;
        j["word"] = word;
        j["eval"] = eval_v;
        j["id"] = id_v;
        j["fstar"] = fstar_v;
        if (ta_v) j["ta"] = *ta_v;
        else j["ta"] = nullptr;
        j["max_copies"] = max_copies;
        j["k"] = k_bound;
        j["k_respected"] = k_respected;
        j["loc_bound_ok"] = loc_bound_ok;
        j["agree"] = agree;
        j["prop1_violation"] = prop1_violation;
        if (witness_text) j["witness"] = *witness_text;
        return j;
    }
};

namespace detail {

inline std::size_t witness_max_copies(const WitnessRun& w) {
    std::size_t m = config_clock_copies(w.initial);
    for (const auto& s : w.steps) m = std::max(m, config_clock_copies(s.after_fire));
    return m;
}

inline std::string witness_summary(const AcceptResult& r) {
    std::string s;
    if (r.accepted && r.witness) {
        s = r.witness->initial.to_string();
        for (const auto& step : r.witness->steps)
            s += " -(" + step.delay.to_string() + "," + step.letter + ")-> " +
                 step.after_fire.to_string();
    } else {
        s = "blocked at letter " + std::to_string(r.blocked_at) + ":";
        for (const auto& c : r.blocking) s += " " + c.to_string();
    }
    return s;
}

// Copy caps claimed for each Until location by the bound recursion.
inline std::map<std::string, std::size_t> until_copy_caps(const Translation& tr) {
    std::map<std::string, std::size_t> caps;
    for (const auto& m : tr.modalities)
        if (!m.is_release)
            caps[m.name] = static_cast<std::size_t>(4 * ceil_inf_term(m.ivl) + 2);
    return caps;
}

inline bool within_caps(const Configuration& c, const std::map<std::string, std::size_t>& caps) {
    for (const auto& [loc, list] : c.locations()) {
        auto it = caps.find(loc);
        if (it != caps.end() && clock_copies(list) > it->second) return false;
    }
    return true;
}

// Accepting run search restricted to configurations inside the caps.
inline bool bounded_witness_exists(const Ocata& a, const TimedWord& th, const ApproxFn& f,
                                   const std::map<std::string, std::size_t>& caps) {
    std::vector<std::set<Configuration>> dead(th.size());
    auto dfs = [&](auto&& self, std::size_t i, const Configuration& c) -> bool {
        if (i == th.size()) return a.is_accepting(c);
        if (dead[i].count(c)) return false;
        const Configuration elapsed = time_elapse(c, th.delay(i));
        for (const auto& o : fire_outcomes(a, elapsed, th[i].letter, f)) {
            if (!within_caps(o.post, caps)) continue;
            if (self(self, i + 1, o.post)) return true;
        }
        dead[i].insert(c);
        return false;
    };
    return dfs(dfs, 0, a.initial_config());
}

}  // namespace detail

inline TrialReport run_trial(const FormulaPtr& phi, const TimedWord& th, bool with_ta) {
    TrialReport r;
    r.formula = print(phi);
    r.word = th.to_string();
    r.k_bound = k_star(phi);

    const std::vector<std::string> word_letters = th.letters();
    std::set<std::string> letters(word_letters.begin(), word_letters.end());
    for (const auto& l : default_alphabet(phi)) letters.insert(l);
    const std::vector<std::string> alphabet(letters.begin(), letters.end());
    const Translation tr = translate(phi, alphabet);

    // The empty word belongs to no compiled language and has no position 1;
    // every oracle reports false for it.
    r.eval_v = th.size() > 0 && eval(th, 1, phi);
    const AcceptResult id_res = accepts(tr.automaton, th, approx_id());
    const ApproxFn fs = f_star(phi);
    const AcceptResult fs_res = accepts(tr.automaton, th, fs);
    r.id_v = id_res.accepted;
    r.fstar_v = fs_res.accepted;
    if (fs_res.accepted) {
        r.max_copies = detail::witness_max_copies(*fs_res.witness);
        r.k_respected = r.max_copies <= r.k_bound;
        r.loc_bound_ok =
            detail::bounded_witness_exists(tr.automaton, th, fs, detail::until_copy_caps(tr));
    }
    if (with_ta) {
        TimedAutomaton b(tr.automaton, static_cast<int>(m_bound(phi).m));
        r.ta_v = ta_accepts(b, th);
    }
    r.agree = r.eval_v == r.id_v && r.id_v == r.fstar_v && (!r.ta_v || *r.ta_v == r.fstar_v);
    r.prop1_violation = r.fstar_v && !r.id_v;
    if (!r.agree) {
        std::string text = "eval=" + std::string(r.eval_v ? "true" : "false") +
                           " id=" + (r.id_v ? "true" : "false") +
                           " fstar=" + (r.fstar_v ? "true" : "false");
        if (r.ta_v) text += " ta=" + std::string(*r.ta_v ? "true" : "false");
        text += " | id: " + detail::witness_summary(id_res);
        text += " | fstar: " + detail::witness_summary(fs_res);
        r.witness_text = text;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct DifftestOptions {
    std::uint64_t seed = 7;
    std::size_t trials = 500;
    std::size_t max_modalities = 3;
    std::uint64_t max_const = 3;
    std::size_t max_len = 5;
    std::uint64_t grid_denominator = 4;
    std::uint64_t horizon = 6;
    std::vector<std::string> alphabet{"a", "b"};
    std::size_t ta_period = 5;  // finite-clock oracle on every Nth trial; 0 disables
};

struct DifftestSummary {
    std::size_t trials = 0;
    std::size_t ta_trials = 0;
    std::size_t disagreements = 0;
    std::size_t prop1_violations = 0;
    std::size_t k_violations = 0;
    std::size_t loc_bound_failures = 0;

    bool clean() const {
        return disagreements == 0 && prop1_violations == 0 && k_violations == 0 &&
               loc_bound_failures == 0;
    }

    std::string to_string() const {
        return "trials=" + std::to_string(trials) + " ta_trials=" + std::to_string(ta_trials) +
               " disagreements=" + std::to_string(disagreements) +
               " prop1_violations=" + std::to_string(prop1_violations) +
               " k_violations=" + std::to_string(k_violations) +
               " loc_bound_failures=" + std::to_string(loc_bound_failures);
    }
};

struct DifftestResult {
    DifftestSummary summary;
    std::vector<TrialReport> reports;
};

inline DifftestResult run_difftest(const DifftestOptions& opt, std::ostream* jsonl = nullptr) {
    DifftestResult res;
    res.summary.trials = opt.trials;
    for (std::size_t i = 0; i < opt.trials; ++i) {
        const std::uint64_t s = detail::mix_seed(opt.seed, i);
        const FormulaPtr phi =
            gen_formula(detail::mix_seed(s, 1), opt.max_modalities, opt.max_const, opt.alphabet);
        TimedWord th;
        for (std::uint64_t attempt = 0; th.size() == 0 && opt.max_len > 0; ++attempt)
            th = gen_word(detail::mix_seed(s, 2 + attempt), opt.max_len, opt.grid_denominator,
                          opt.horizon, opt.alphabet);
        const bool with_ta = opt.ta_period != 0 && i % opt.ta_period == 0;
        TrialReport rep = run_trial(phi, th, with_ta);
        rep.index = i;
        rep.seed = s;
        if (with_ta) ++res.summary.ta_trials;
        if (!rep.agree) ++res.summary.disagreements;
        if (rep.prop1_violation) ++res.summary.prop1_violations;
        if (!rep.k_respected) ++res.summary.k_violations;
        if (!rep.loc_bound_ok) ++res.summary.loc_bound_failures;
        if (jsonl) *jsonl << rep.to_json().dump() << "\n";
        res.reports.push_back(std::move(rep));
    }
    return res;
}

}  // namespace mitlkit
