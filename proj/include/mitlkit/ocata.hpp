#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "configuration.hpp"
#include "interval.hpp"
#include "timed_word.hpp"

namespace mitlkit {

// ---------------------------------------------------------------------------
// Transition formulas γ := ⊤ | ⊥ | γ∨γ | γ∧γ | ℓ | x⋈c | x.γ
// ---------------------------------------------------------------------------

struct TransFormula;
using TfPtr = std::shared_ptr<const TransFormula>;

struct TransFormula {
    enum class Kind { True, False, Loc, Constr, Or, And, Reset };
    Kind kind;
    std::string loc;     // Loc
    ClockConstraint cc;  // Constr
    TfPtr lhs, rhs;      // Or/And; Reset uses lhs
};

inline TfPtr tf_true() { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::True, "", {}, nullptr, nullptr}); }
inline TfPtr tf_false() { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::False, "", {}, nullptr, nullptr}); }
inline TfPtr tf_loc(std::string l) { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::Loc, std::move(l), {}, nullptr, nullptr}); }
inline TfPtr tf_constraint(ClockConstraint cc) { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::Constr, "", cc, nullptr, nullptr}); }
inline TfPtr tf_or(TfPtr a, TfPtr b) { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::Or, "", {}, std::move(a), std::move(b)}); }
inline TfPtr tf_and(TfPtr a, TfPtr b) { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::And, "", {}, std::move(a), std::move(b)}); }
inline TfPtr tf_reset(TfPtr a) { return std::make_shared<TransFormula>(TransFormula{TransFormula::Kind::Reset, "", {}, std::move(a), nullptr}); }

// One DNF disjunct: conjunction of (possibly reset) location targets and
// clock constraints.  An empty body (no targets, no guard) is the ⊤ arc
// whose only minimal model is the empty configuration.
struct ArcBody {
    std::vector<std::pair<std::string, bool>> targets;  // (location, reset), sorted
    std::vector<ClockConstraint> guard;                 // conjunction, sorted

    bool operator==(const ArcBody&) const = default;

    bool guard_sat(const Interval& i) const {
        for (const auto& cc : guard)
            if (!interval_sat(i, cc)) return false;
        return true;
    }

    std::string to_string() const {
        std::string s;
        for (const auto& [loc, reset] : targets) {
            if (!s.empty()) s += " & ";
            s += reset ? "x." + loc : loc;
        }
        for (const auto& cc : guard) {
            if (!s.empty()) s += " & ";
            s += cc.to_string();
        }
        return s.empty() ? "true" : s;
    }
};

namespace detail {

struct Disjunct {
    std::set<std::pair<std::string, bool>> targets;
    std::vector<ClockConstraint> guard;
};

inline bool zero_sat(const ClockConstraint& cc) { return interval_sat(Interval::point(Rational(0)), cc); }

// Rewrites x. inward (it distributes over ∨/∧, collapses on itself, turns
// constraints into 0⋈c which is evaluated on the spot) while distributing
// ∧ over ∨.  Returns the list of disjuncts; ⊥ contributes none.
inline std::vector<Disjunct> dnf(const TfPtr& g, bool reset) {
    using K = TransFormula::Kind;
    switch (g->kind) {
        case K::True: return {Disjunct{}};
        case K::False: return {};
        case K::Loc: return {Disjunct{{{g->loc, reset}}, {}}};
        case K::Constr: {
            if (reset) return zero_sat(g->cc) ? std::vector<Disjunct>{Disjunct{}} : std::vector<Disjunct>{};
            if (!g->cc.bound)  // x<inf, x<=inf trivially hold; x>inf, x>=inf cannot
                return (g->cc.op == Cmp::Lt || g->cc.op == Cmp::Le)
                           ? std::vector<Disjunct>{Disjunct{}}
                           : std::vector<Disjunct>{};
            return {Disjunct{{}, {g->cc}}};
        }
        case K::Or: {
            std::vector<Disjunct> out = dnf(g->lhs, reset);
            for (auto& d : dnf(g->rhs, reset)) out.push_back(std::move(d));
            return out;
        }
        case K::And: {
            const std::vector<Disjunct> ls = dnf(g->lhs, reset);
            const std::vector<Disjunct> rs = dnf(g->rhs, reset);
            std::vector<Disjunct> out;
            for (const auto& l : ls)
                for (const auto& r : rs) {
                    Disjunct d = l;
                    d.targets.insert(r.targets.begin(), r.targets.end());
                    d.guard.insert(d.guard.end(), r.guard.begin(), r.guard.end());
                    out.push_back(std::move(d));
                }
            return out;
        }
        case K::Reset: return dnf(g->lhs, true);
    }
    return {};
}

inline bool constraint_before(const ClockConstraint& a, const ClockConstraint& b) {
    const bool ai = !a.bound, bi = !b.bound;
    if (ai != bi) return bi;
    if (!ai && *a.bound != *b.bound) return *a.bound < *b.bound;
    return static_cast<int>(a.op) < static_cast<int>(b.op);
}

}  // namespace detail

inline std::vector<ArcBody> normalize_dnf(const TfPtr& g) {
    std::vector<ArcBody> out;
    for (const auto& d : detail::dnf(g, false)) {
        ArcBody body;
        body.targets.assign(d.targets.begin(), d.targets.end());
        body.guard = d.guard;
        std::sort(body.guard.begin(), body.guard.end(), detail::constraint_before);
        body.guard.erase(std::unique(body.guard.begin(), body.guard.end()), body.guard.end());
        if (std::find(out.begin(), out.end(), body) == out.end())
            out.push_back(std::move(body));
    }
    return out;
}

// ---------------------------------------------------------------------------
// OCATA
// ---------------------------------------------------------------------------

class Ocata {
public:
    Ocata(std::vector<std::string> alphabet, std::vector<std::string> locations,
          std::string initial, std::set<std::string> accepting)
        : alphabet_(std::move(alphabet)),
          locations_(std::move(locations)),
          initial_(std::move(initial)),
          accepting_(std::move(accepting)) {
        for (const auto& l : locations_) loc_set_.insert(l);
        if (!loc_set_.count(initial_))
            throw std::invalid_argument("ocata: initial location '" + initial_ + "' not declared");
        for (const auto& l : accepting_)
            if (!loc_set_.count(l))
                throw std::invalid_argument("ocata: accepting location '" + l + "' not declared");
    }

    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::vector<std::string>& locations() const { return locations_; }
    const std::string& initial() const { return initial_; }
    const std::set<std::string>& accepting() const { return accepting_; }
    bool has_location(const std::string& l) const { return loc_set_.count(l) != 0; }

    void add_arc(const std::string& source, const std::string& letter, ArcBody body) {
        if (!loc_set_.count(source))
            throw std::invalid_argument("ocata: arc from undeclared location '" + source + "'");
        for (const auto& [loc, reset] : body.targets) {
            (void)reset;
            if (!loc_set_.count(loc))
                throw std::invalid_argument("ocata: arc targets undeclared location '" + loc + "'");
        }
        table_[{source, letter}].push_back(std::move(body));
    }

    void add_transition(const std::string& source, const std::string& letter, const TfPtr& gamma) {
        for (auto& body : normalize_dnf(gamma)) add_arc(source, letter, std::move(body));
    }

    const std::vector<ArcBody>& arcs_for(const std::string& loc, const std::string& letter) const {
        static const std::vector<ArcBody> none;
        auto it = table_.find({loc, letter});
        return it == table_.end() ? none : it->second;
    }

    bool is_accepting(const Configuration& c) const {
        for (const auto& [loc, list] : c.locations()) {
            (void)list;
            if (!accepting_.count(loc)) return false;
        }
        return true;
    }

    Configuration initial_config() const {
        Configuration c;
        c.try_add(initial_, Interval::point(Rational(0)));
        return c;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["alphabet"] = alphabet_;
        j["locations"] = locations_;
        j["initial"] = initial_;
        j["accepting"] = std::vector<std::string>(accepting_.begin(), accepting_.end());
        auto arcs = nlohmann::ordered_json::array();
        for (const auto& loc : locations_)
            for (const auto& letter : alphabet_)
                for (const auto& body : arcs_for(loc, letter)) {
                    nlohmann::ordered_json a;
                    a["source"] = loc;
                    a["letter"] = letter;
                    auto guard = nlohmann::ordered_json::array();
                    for (const auto& cc : body.guard) {
                        nlohmann::ordered_json g;
                        g["op"] = cmp_symbol(cc.op);
                        if (cc.bound) g["const"] = *cc.bound;
                        else g["const"] = "inf";
                        guard.push_back(g);
                    }
                    a["guard"] = guard;
                    auto targets = nlohmann::ordered_json::array();
                    for (const auto& [tloc, reset] : body.targets) {
                        nlohmann::ordered_json t;
                        t["loc"] = tloc;
                        t["reset"] = reset;
                        targets.push_back(t);
                    }
                    a["targets"] = targets;
                    arcs.push_back(a);
                }
        j["arcs"] = arcs;
        return j;
    }

    static Ocata from_json(const nlohmann::json& j) {
        Ocata a(j.at("alphabet").get<std::vector<std::string>>(),
                j.at("locations").get<std::vector<std::string>>(),
                j.at("initial").get<std::string>(),
                std::set<std::string>(j.at("accepting").begin(), j.at("accepting").end()));
        for (const auto& arc : j.at("arcs")) {
            ArcBody body;
            for (const auto& g : arc.at("guard")) {
                ClockConstraint cc;
                cc.op = cmp_from_symbol(g.at("op").get<std::string>());
                if (g.at("const").is_string()) {
                    if (g.at("const").get<std::string>() != "inf")
                        throw std::invalid_argument("ocata json: bad guard constant");
                    cc.bound = std::nullopt;
                } else {
                    cc.bound = g.at("const").get<std::uint64_t>();
                }
                body.guard.push_back(cc);
            }
            std::sort(body.guard.begin(), body.guard.end(), detail::constraint_before);
            for (const auto& t : arc.at("targets"))
                body.targets.emplace_back(t.at("loc").get<std::string>(), t.at("reset").get<bool>());
            std::sort(body.targets.begin(), body.targets.end());
            body.targets.erase(std::unique(body.targets.begin(), body.targets.end()), body.targets.end());
            a.add_arc(arc.at("source").get<std::string>(), arc.at("letter").get<std::string>(), std::move(body));
        }
        return a;
    }

    // Graphviz export.  Conjunctive arcs (several targets) fan out from a
    // point-shaped junction node; discharge arcs (no target) end in a blank
    // sink; resets are labeled "x:=0".
    std::string to_dot() const {
        std::string out = "digraph ocata {\n  rankdir=LR;\n  node [shape=circle];\n";
        out += "  __init [shape=point, label=\"\"];\n";
        for (const auto& loc : locations_)
            out += "  \"" + loc + "\"" +
                   (accepting_.count(loc) ? " [shape=doublecircle]" : "") + ";\n";
        out += "  __init -> \"" + initial_ + "\";\n";
        int aux = 0;
        for (const auto& loc : locations_)
            for (const auto& letter : alphabet_)
                for (const auto& body : arcs_for(loc, letter)) {
                    std::string label = letter;
                    for (const auto& cc : body.guard) label += ", " + cc.to_string();
                    if (body.targets.empty()) {
                        const std::string sink = "__sink" + std::to_string(aux++);
                        out += "  " + sink + " [shape=none, label=\"\"];\n";
                        out += "  \"" + loc + "\" -> " + sink + " [label=\"" + label + "\"];\n";
                    } else if (body.targets.size() == 1) {
                        const auto& [tloc, reset] = body.targets.front();
                        out += "  \"" + loc + "\" -> \"" + tloc + "\" [label=\"" + label +
                               (reset ? ", x:=0" : "") + "\"];\n";
                    } else {
                        const std::string junction = "__j" + std::to_string(aux++);
                        out += "  " + junction + " [shape=point, label=\"\"];\n";
                        out += "  \"" + loc + "\" -> " + junction + " [label=\"" + label +
                               "\", arrowhead=none];\n";
                        for (const auto& [tloc, reset] : body.targets)
                            out += "  " + junction + " -> \"" + tloc + "\"" +
                                   (reset ? " [label=\"x:=0\"]" : "") + ";\n";
                    }
                }
        out += "}\n";
        return out;
    }

private:
    std::vector<std::string> alphabet_;
    std::vector<std::string> locations_;
    std::string initial_;
    std::set<std::string> accepting_;
    std::set<std::string> loc_set_;
    std::map<std::pair<std::string, std::string>, std::vector<ArcBody>> table_;
};

// ---------------------------------------------------------------------------
// Approximation functions (the semantics is parametrized by one; the
// concrete families live in approx.hpp)
// ---------------------------------------------------------------------------

struct ApproxFn {
    std::string name;
    std::optional<std::size_t> bound;
    std::function<std::vector<Configuration>(const Configuration&)> map;

    std::vector<Configuration> operator()(const Configuration& c) const { return map(c); }
};

inline ApproxFn approx_id() {
    return {"id", std::nullopt, [](const Configuration& c) { return std::vector<Configuration>{c}; }};
}

// ---------------------------------------------------------------------------
// Interval semantics: minimal models, discrete successors, acceptance
// ---------------------------------------------------------------------------

namespace detail {

// Valid arc candidates for one state, keeping the generating arc's index.
// Candidates that would stack overlapping intervals on one location are
// dropped (they satisfy no well-formed configuration).
inline std::vector<std::pair<std::size_t, Configuration>> arc_models(
    const Ocata& a, const std::string& loc, const std::string& letter, const Interval& ivl) {
    std::vector<std::pair<std::size_t, Configuration>> out;
    const auto& arcs = a.arcs_for(loc, letter);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        if (!arcs[k].guard_sat(ivl)) continue;
        Configuration m;
        bool ok = true;
        for (const auto& [tloc, reset] : arcs[k].targets)
            if (!m.try_add(tloc, reset ? Interval::point(Rational(0)) : ivl)) { ok = false; break; }
        if (!ok) continue;
        bool dup = false;
        for (const auto& [idx, prev] : out) {
            (void)idx;
            if (prev == m) { dup = true; break; }
        }
        if (!dup) out.emplace_back(k, std::move(m));
    }
    return out;
}

}  // namespace detail

// Minimal models of δ(loc,letter) with respect to the interval: one
// candidate per firable arc, deduplicated, then filtered to the ⊆-minimal
// ones.
inline std::vector<Configuration> minimal_models(const Ocata& a, const std::string& loc,
                                                 const std::string& letter, const Interval& ivl) {
    std::vector<Configuration> cands;
    for (auto& [idx, m] : detail::arc_models(a, loc, letter, ivl)) {
        (void)idx;
        cands.push_back(std::move(m));
    }
    std::vector<Configuration> out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        bool minimal = true;
        for (std::size_t j = 0; j < cands.size(); ++j)
            if (j != i && cands[j].subset_of(cands[i]) && cands[j] != cands[i]) { minimal = false; break; }
        if (minimal) out.push_back(cands[i]);
    }
    return out;
}

// One way of firing a discrete transition from C: the arc chosen for each
// state (in C.states() order), the resulting union C'' and the configuration
// picked from f(C'').
struct FireOutcome {
    std::vector<std::size_t> arcs;
    Configuration pre_approx;
    Configuration post;
};

inline std::vector<FireOutcome> fire_outcomes(const Ocata& a, const Configuration& c,
                                              const std::string& letter, const ApproxFn& f) {
    const auto states = c.states();
    // Candidate models per state; any state with none blocks every choice.
    std::vector<std::vector<std::pair<std::size_t, Configuration>>> menu;
    menu.reserve(states.size());
    for (const auto& [loc, ivl] : states) {
        auto models = detail::arc_models(a, loc, letter, ivl);
        if (models.empty()) return {};
        menu.push_back(std::move(models));
    }
    std::vector<FireOutcome> out;
    std::set<Configuration> seen;
    // Distinct arc choices often union to the same partial model; identical
    // partial unions have identical completions, so each is expanded once.
    std::vector<std::set<Configuration>> level_seen(states.size() + 1);
    std::vector<std::size_t> choice(states.size(), 0);
    auto expand = [&](auto&& self, std::size_t i, const Configuration& unioned) -> void {
        if (!level_seen[i].insert(unioned).second) return;
        if (i == states.size()) {
            for (auto& post : f(unioned)) {
                if (!seen.insert(post).second) continue;
                out.push_back({choice, unioned, std::move(post)});
            }
            return;
        }
        for (std::size_t k = 0; k < menu[i].size(); ++k) {
            Configuration next = unioned;
            // A zero-delay reset can propose a fresh point inside a grouped
            // interval, which configurations cannot represent.  Skipping the
            // union is safe: a branch that postponed the grouping reaches a
            // same-shape configuration with pointwise-contained intervals,
            // and that branch accepts every continuation this one would.
            if (!next.try_merge(menu[i][k].second)) continue;
            choice[i] = menu[i][k].first;
            self(self, i + 1, next);
        }
    };
    expand(expand, 0, Configuration{});
    return out;
}

inline std::vector<Configuration> discrete_successors(const Ocata& a, const Configuration& c,
                                                      const std::string& letter, const ApproxFn& f) {
    std::vector<Configuration> out;
    for (auto& o : fire_outcomes(a, c, letter, f)) out.push_back(std::move(o.post));
    return out;
}

// One elapse+fire step of a witness run.
struct RunStep {
    Rational delay;
    std::string letter;
    Configuration after_elapse;
    std::vector<std::size_t> arcs;  // arc index per state of after_elapse
    Configuration pre_approx;       // union of fired models, before f
    Configuration after_fire;
};

struct WitnessRun {
    Configuration initial;
    std::vector<RunStep> steps;
};

struct AcceptResult {
    bool accepted = false;
    std::optional<WitnessRun> witness;
    // On reject: 1-based index of the letter where the deepest dead end
    // occurred (|θ|+1 when every branch survived to the end but finished
    // non-accepting) and the configurations seen there: after elapse for
    // dead ends, final configurations otherwise.
    std::size_t blocked_at = 0;
    std::vector<Configuration> blocking;
};

inline AcceptResult accepts_from(const Ocata& a, const Configuration& c0, const TimedWord& th,
                                 const ApproxFn& f) {
    AcceptResult res;
    const std::size_t n = th.size();
    std::vector<RunStep> steps;
    auto note_block = [&](std::size_t depth, const Configuration& c) {
        if (depth > res.blocked_at) {
            res.blocked_at = depth;
            res.blocking.clear();
        }
        if (depth == res.blocked_at &&
            std::find(res.blocking.begin(), res.blocking.end(), c) == res.blocking.end())
            res.blocking.push_back(c);
    };
    // Configurations already proven to have no accepting continuation from
    // step i; the word suffix is fixed per step, so the verdict is a function
    // of (i, configuration) and failed states never need re-exploration.
    std::vector<std::set<Configuration>> dead(n);
    auto dfs = [&](auto&& self, std::size_t i, const Configuration& c) -> bool {
        if (i == n) {
            if (a.is_accepting(c)) return true;
            note_block(n + 1, c);
            return false;
        }
        if (dead[i].count(c)) return false;
        const Rational t = th.delay(i);
        const Configuration elapsed = time_elapse(c, t);
        auto outcomes = fire_outcomes(a, elapsed, th[i].letter, f);
        if (outcomes.empty()) {
            note_block(i + 1, elapsed);
            dead[i].insert(c);
            return false;
        }
        for (auto& o : outcomes) {
            steps.push_back({t, th[i].letter, elapsed, o.arcs, o.pre_approx, o.post});
            if (self(self, i + 1, o.post)) return true;
            steps.pop_back();
        }
        dead[i].insert(c);
        return false;
    };
    if (dfs(dfs, 0, c0)) {
        res.accepted = true;
        res.witness = WitnessRun{c0, std::move(steps)};
        res.blocked_at = 0;
    }
    return res;
}

inline AcceptResult accepts(const Ocata& a, const TimedWord& th, const ApproxFn& f) {
    return accepts_from(a, a.initial_config(), th, f);
}

// Every accepting run (up to limit), for witness-shape assertions.
inline std::vector<WitnessRun> accepting_runs(const Ocata& a, const Configuration& c0,
                                              const TimedWord& th, const ApproxFn& f,
                                              std::size_t limit) {
    std::vector<WitnessRun> runs;
    const std::size_t n = th.size();
    std::vector<RunStep> steps;
    // States with no accepting continuation at all can be skipped; states that
    // do lead to runs must be revisited to enumerate each distinct run.
    std::vector<std::set<Configuration>> dead(n);
    auto dfs = [&](auto&& self, std::size_t i, const Configuration& c) -> bool {
        if (runs.size() >= limit) return true;
        if (i == n) {
            if (a.is_accepting(c)) runs.push_back(WitnessRun{c0, steps});
            return runs.size() >= limit;
        }
        if (dead[i].count(c)) return false;
        const std::size_t found_before = runs.size();
        const Rational t = th.delay(i);
        const Configuration elapsed = time_elapse(c, t);
        for (auto& o : fire_outcomes(a, elapsed, th[i].letter, f)) {
            steps.push_back({t, th[i].letter, elapsed, o.arcs, o.pre_approx, o.post});
            const bool stop = self(self, i + 1, o.post);
            steps.pop_back();
            if (stop) return true;
        }
        if (runs.size() == found_before) dead[i].insert(c);
        return false;
    };
    dfs(dfs, 0, c0);
    return runs;
}

// Re-derives every configuration of a witness from its recorded choices;
// used by tests to confirm witnesses replay deterministically.
inline bool replay_witness(const Ocata& a, const TimedWord& th, const ApproxFn& f,
                           const WitnessRun& w) {
    if (w.steps.size() != th.size()) return false;
    Configuration c = w.initial;
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const RunStep& s = w.steps[i];
        if (s.delay != th.delay(i) || s.letter != th[i].letter) return false;
        const Configuration elapsed = time_elapse(c, s.delay);
        if (elapsed != s.after_elapse) return false;
        const auto states = elapsed.states();
        if (s.arcs.size() != states.size()) return false;
        Configuration unioned;
        for (std::size_t k = 0; k < states.size(); ++k) {
            const auto& arcs = a.arcs_for(states[k].first, s.letter);
            if (s.arcs[k] >= arcs.size() || !arcs[s.arcs[k]].guard_sat(states[k].second)) return false;
            for (const auto& [tloc, reset] : arcs[s.arcs[k]].targets)
                if (!unioned.try_add(tloc, reset ? Interval::point(Rational(0)) : states[k].second))
                    return false;
        }
        if (unioned != s.pre_approx) return false;
        const auto approximations = f(unioned);
        if (std::find(approximations.begin(), approximations.end(), s.after_fire) ==
            approximations.end())
            return false;
        c = s.after_fire;
    }
    return a.is_accepting(c);
}

}  // namespace mitlkit
