#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "interval.hpp"
#include "ocata.hpp"
#include "rational.hpp"
#include "timed_word.hpp"

namespace mitlkit {

// Finite-clock back end.  A configuration of the alternating automaton is
// packed into clock pairs: the pair (x,y) denotes the closed interval
// [v(x), v(y)].  A singular interval shares one clock (x == y), so a packed
// configuration uses exactly as many clocks as its clock-copy count.

struct TaLocation {
    // One pair sequence per automaton location (indexed like
    // Ocata::locations()), each ordered youngest interval first.
    std::vector<std::vector<std::pair<int, int>>> pairs;

    bool operator==(const TaLocation& o) const { return pairs == o.pairs; }
    bool operator!=(const TaLocation& o) const { return pairs != o.pairs; }
    bool operator<(const TaLocation& o) const { return pairs < o.pairs; }

    bool empty() const {
        for (const auto& seq : pairs)
            if (!seq.empty()) return false;
        return true;
    }

    std::vector<int> live_clocks() const {
        std::set<int> s;
        for (const auto& seq : pairs)
            for (const auto& [x, y] : seq) {
                s.insert(x);
                s.insert(y);
            }
        return {s.begin(), s.end()};
    }

    std::string to_string(const std::vector<std::string>& names) const {
        std::string out;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i].empty()) continue;
            if (!out.empty()) out += "; ";
            out += names[i] + ":";
            for (const auto& [x, y] : pairs[i])
                out += "(x" + std::to_string(x) + ",x" + std::to_string(y) + ")";
        }
        return out.empty() ? "{}" : out;
    }
};

// First-use renaming: scanning locations in index order and each pair inf
// before sup, clocks are renumbered consecutively.  Structurally equal
// packings then compare equal regardless of which concrete clocks were free
// when their pairs were allocated.
inline std::vector<int> canonical_renaming(const TaLocation& s, int clock_count) {
    std::vector<int> perm(static_cast<std::size_t>(clock_count), -1);
    int next = 0;
    for (const auto& seq : s.pairs)
        for (const auto& [x, y] : seq) {
            if (perm[x] < 0) perm[x] = next++;
            if (perm[y] < 0) perm[y] = next++;
        }
    return perm;
}

inline TaLocation apply_renaming(const TaLocation& s, const std::vector<int>& perm) {
    TaLocation out = s;
    for (auto& seq : out.pairs)
        for (auto& [x, y] : seq) {
            x = perm[x];
            y = perm[y];
        }
    return out;
}

struct TaTransition {
    // Guard constraints are over source-frame clocks.  The target location
    // is canonically renamed; clock_map sends each surviving source clock to
    // its target-frame index (-1 for dropped clocks) and resets lists
    // target-frame clocks that restart at 0.
    std::vector<std::pair<int, ClockConstraint>> guard;
    std::vector<int> resets;
    TaLocation target;
    std::vector<int> clock_map;

    bool operator==(const TaTransition&) const = default;
};

class TimedAutomaton {
public:
    TimedAutomaton(Ocata a, int clock_count) : a_(std::move(a)), clocks_(clock_count) {
        if (clocks_ < 2)
            throw std::runtime_error("clock budget exceeded: the initial pair needs two clocks");
        const auto& locs = a_.locations();
        for (std::size_t i = 0; i < locs.size(); ++i) loc_index_[locs[i]] = static_cast<int>(i);
        for (const auto& loc : locs)
            for (const auto& letter : a_.alphabet())
                for (const auto& body : a_.arcs_for(loc, letter))
                    for (const auto& [tloc, reset] : body.targets)
                        if (!reset && tloc != loc)
                            throw std::invalid_argument(
                                "ta: arc from '" + loc + "' on '" + letter +
                                "' has unreset non-self target '" + tloc + "'");
        initial_.pairs.assign(locs.size(), {});
        initial_.pairs[loc_index_.at(a_.initial())] = {{0, 1}};
    }

    const Ocata& automaton() const { return a_; }
    const std::vector<std::string>& alphabet() const { return a_.alphabet(); }
    int clock_count() const { return clocks_; }
    const TaLocation& initial() const { return initial_; }

    bool accepting(const TaLocation& s) const {
        const auto& locs = a_.locations();
        for (std::size_t i = 0; i < s.pairs.size(); ++i)
            if (!s.pairs[i].empty() && !a_.accepting().count(locs[i])) return false;
        return true;
    }

    const std::vector<TaTransition>& transitions(const TaLocation& s, const std::string& letter) const {
        const auto key = std::make_pair(s, letter);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        std::vector<TaTransition> built = generate(s, letter);
        std::lock_guard<std::mutex> lock(mu_);
        return memo_.emplace(key, std::move(built)).first->second;
    }

private:
    struct LivePair {
        int loc;
        std::size_t pos;
    };

    std::vector<TaTransition> generate(const TaLocation& s, const std::string& letter) const {
        const auto& locs = a_.locations();
        std::vector<LivePair> live;
        std::vector<const std::vector<ArcBody>*> menu;
        for (std::size_t i = 0; i < s.pairs.size(); ++i)
            for (std::size_t p = 0; p < s.pairs[i].size(); ++p) {
                const auto& arcs = a_.arcs_for(locs[i], letter);
                if (arcs.empty()) return {};
                live.push_back({static_cast<int>(i), p});
                menu.push_back(&arcs);
            }

        std::vector<TaTransition> out;
        std::vector<std::size_t> choice(live.size(), 0);
        auto emit_combo = [&]() {
            // Kept pairs and the reset-target locations of this arc choice.
            std::vector<std::vector<std::pair<int, int>>> kept(s.pairs.size());
            std::set<int> reset_locs;
            std::vector<std::pair<int, ClockConstraint>> guard;
            for (std::size_t k = 0; k < live.size(); ++k) {
                const auto& [loc, pos] = live[k];
                const ArcBody& arc = (*menu[k])[choice[k]];
                bool keep = false;
                for (const auto& [tloc, reset] : arc.targets) {
                    if (reset)
                        reset_locs.insert(loc_index_.at(tloc));
                    else
                        keep = true;
                }
                if (keep) kept[loc].push_back(s.pairs[loc][pos]);
                const auto& [x, y] = s.pairs[loc][pos];
                for (const auto& cc : arc.guard) {
                    guard.emplace_back(x, cc);
                    if (y != x) guard.emplace_back(y, cc);
                }
            }
            std::sort(guard.begin(), guard.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return detail::constraint_before(a.second, b.second);
            });
            guard.erase(std::unique(guard.begin(), guard.end()), guard.end());

            std::vector<bool> used(static_cast<std::size_t>(clocks_), false);
            for (const auto& seq : kept)
                for (const auto& [x, y] : seq) used[x] = used[y] = true;

            const std::vector<int> rl(reset_locs.begin(), reset_locs.end());
            // Option bit per reset location: 0 keeps the fresh [0,0] pair
            // separate, 1 folds it into the location's first kept pair.
            for (std::size_t mask = 0; mask < (std::size_t{1} << rl.size()); ++mask) {
                TaLocation target;
                target.pairs = kept;
                std::vector<int> reset_clocks;
                std::vector<bool> pool = used;
                auto alloc = [&]() -> int {
                    for (int c = 0; c < clocks_; ++c)
                        if (!pool[c]) {
                            pool[c] = true;
                            return c;
                        }
                    return -1;
                };
                bool ok = true;
                for (std::size_t b = 0; b < rl.size(); ++b) {
                    const int loc = rl[b];
                    auto& seq = target.pairs[loc];
                    if (mask & (std::size_t{1} << b)) {
                        if (seq.empty()) { ok = false; break; }
                        auto& [x1, y1] = seq.front();
                        if (x1 == y1) {
                            const int z = alloc();
                            if (z < 0) { ok = false; break; }
                            seq.front() = {z, y1};
                            reset_clocks.push_back(z);
                        } else {
                            reset_clocks.push_back(x1);
                        }
                    } else {
                        const int z = alloc();
                        if (z < 0) { ok = false; break; }
                        seq.insert(seq.begin(), {z, z});
                        reset_clocks.push_back(z);
                    }
                }
                if (!ok) continue;

                const std::vector<int> perm = canonical_renaming(target, clocks_);
                TaTransition t;
                t.guard = guard;
                t.target = apply_renaming(target, perm);
                t.clock_map = perm;
                for (int c : reset_clocks) t.resets.push_back(perm[c]);
                std::sort(t.resets.begin(), t.resets.end());
                if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
            }
        };
        auto enumerate = [&](auto&& self, std::size_t k) -> void {
            if (k == live.size()) {
                emit_combo();
                return;
            }
            for (std::size_t i = 0; i < menu[k]->size(); ++i) {
                choice[k] = i;
                self(self, k + 1);
            }
        };
        enumerate(enumerate, 0);
        return out;
    }

    Ocata a_;
    int clocks_;
    std::map<std::string, int> loc_index_;
    TaLocation initial_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<TaLocation, std::string>, std::vector<TaTransition>> memo_;
};

inline TimedAutomaton ocata_to_ta(Ocata a, int clock_count) {
    return TimedAutomaton(std::move(a), clock_count);
}

// ---------------------------------------------------------------------------
// Simulation on timed words (exact rational valuations)
// ---------------------------------------------------------------------------

struct TaConfig {
    TaLocation loc;
    std::vector<Rational> vals;  // indexed by clock; free clocks stay at 0

    bool operator==(const TaConfig& o) const { return loc == o.loc && vals == o.vals; }
    bool operator<(const TaConfig& o) const {
        if (loc != o.loc) return loc < o.loc;
        return vals < o.vals;
    }
};

inline TaConfig ta_initial_config(const TimedAutomaton& b) {
    return {b.initial(), std::vector<Rational>(static_cast<std::size_t>(b.clock_count()), Rational(0))};
}

inline TaConfig ta_elapse(TaConfig c, const Rational& d) {
    if (d.is_negative()) throw std::invalid_argument("ta_elapse: negative delay");
    for (int x : c.loc.live_clocks()) c.vals[x] = c.vals[x] + d;
    return c;
}

inline std::vector<TaConfig> ta_successors(const TimedAutomaton& b, const TaConfig& c,
                                           const std::string& letter) {
    std::set<TaConfig> out;
    for (const auto& t : b.transitions(c.loc, letter)) {
        bool sat = true;
        for (const auto& [x, cc] : t.guard)
            if (!interval_sat(Interval::point(c.vals[x]), cc)) { sat = false; break; }
        if (!sat) continue;
        TaConfig next{t.target,
                      std::vector<Rational>(static_cast<std::size_t>(b.clock_count()), Rational(0))};
        for (int x = 0; x < b.clock_count(); ++x)
            if (t.clock_map[x] >= 0) next.vals[t.clock_map[x]] = c.vals[x];
        for (int r : t.resets) next.vals[r] = Rational(0);
        out.insert(std::move(next));
    }
    return {out.begin(), out.end()};
}

inline bool ta_accepts(const TimedAutomaton& b, const TimedWord& th) {
    std::set<TaConfig> frontier{ta_initial_config(b)};
    for (std::size_t i = 0; i < th.size(); ++i) {
        std::set<TaConfig> next;
        for (const auto& c : frontier) {
            const TaConfig elapsed = ta_elapse(c, th.delay(i));
            for (auto& s : ta_successors(b, elapsed, th[i].letter)) next.insert(std::move(s));
        }
        frontier = std::move(next);
        if (frontier.empty()) return false;
    }
    for (const auto& c : frontier)
        if (b.accepting(c.loc)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Bounded exploration, stats, exports
// ---------------------------------------------------------------------------

struct TaStats {
    int clock_count = 0;
    std::size_t locations_discovered = 0;
    bool capped = false;
};

namespace detail {

struct TaFragment {
    std::vector<TaLocation> locations;  // discovery order, initial first
    std::map<TaLocation, std::size_t> index;
    struct Edge {
        std::size_t from;
        std::string letter;
        const TaTransition* t;
        std::size_t to;
    };
    std::vector<Edge> edges;
    bool capped = false;
};

inline TaFragment explore_ta(const TimedAutomaton& b, std::size_t cap) {
    TaFragment f;
    auto discover = [&](const TaLocation& s) -> std::size_t {
        auto it = f.index.find(s);
        if (it != f.index.end()) return it->second;
        f.locations.push_back(s);
        f.index.emplace(s, f.locations.size() - 1);
        return f.locations.size() - 1;
    };
    discover(b.initial());
    for (std::size_t i = 0; i < f.locations.size(); ++i) {
        for (const auto& letter : b.alphabet()) {
            // Copied because discover() may reallocate f.locations.
            const TaLocation source = f.locations[i];
            for (const auto& t : b.transitions(source, letter)) {
                auto it = f.index.find(t.target);
                if (it == f.index.end() && f.locations.size() >= cap) {
                    f.capped = true;
                    continue;
                }
                const std::size_t to = discover(t.target);
                f.edges.push_back({i, letter, &t, to});
            }
        }
    }
    return f;
}

inline std::string ta_clock_name(int c) { return "x" + std::to_string(c); }

inline std::string ta_constraint_text(int clock, const ClockConstraint& cc) {
    std::string s = ta_clock_name(clock) + cmp_symbol(cc.op);
    s += cc.bound ? std::to_string(*cc.bound) : std::string("inf");
    return s;
}

}  // namespace detail

inline TaStats ta_stats(const TimedAutomaton& b, std::size_t cap) {
    const auto f = detail::explore_ta(b, cap);
    return {b.clock_count(), f.locations.size(), f.capped};
}

inline nlohmann::ordered_json ta_to_json(const TimedAutomaton& b, std::size_t cap) {
    const auto f = detail::explore_ta(b, cap);
    const auto& names = b.automaton().locations();
    nlohmann::ordered_json j;
    j["clocks"] = b.clock_count();
    j["initial"] = 0;
    j["capped"] = f.capped;
    auto locs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < f.locations.size(); ++i) {
        nlohmann::ordered_json l;
        l["id"] = i;
        auto assignment = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < f.locations[i].pairs.size(); ++k) {
            if (f.locations[i].pairs[k].empty()) continue;
            auto seq = nlohmann::ordered_json::array();
            for (const auto& [x, y] : f.locations[i].pairs[k])
                seq.push_back(nlohmann::ordered_json::array({x, y}));
            assignment[names[k]] = seq;
        }
        l["assignment"] = assignment;
        l["accepting"] = b.accepting(f.locations[i]);
        locs.push_back(l);
    }
    j["locations"] = locs;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : f.edges) {
        nlohmann::ordered_json t;
        t["from"] = e.from;
        t["letter"] = e.letter;
        auto guard = nlohmann::ordered_json::array();
        for (const auto& [clock, cc] : e.t->guard)
            guard.push_back(detail::ta_constraint_text(clock, cc));
        t["guard"] = guard;
        auto resets = nlohmann::ordered_json::array();
        for (int r : e.t->resets) resets.push_back(detail::ta_clock_name(r));
        t["resets"] = resets;
        auto map = nlohmann::ordered_json::object();
        for (int c = 0; c < b.clock_count(); ++c)
            if (e.t->clock_map[c] >= 0)
                map[detail::ta_clock_name(c)] = detail::ta_clock_name(e.t->clock_map[c]);
        t["map"] = map;
        t["to"] = e.to;
        edges.push_back(t);
    }
    j["transitions"] = edges;
    return j;
}

inline std::string ta_to_dot(const TimedAutomaton& b, std::size_t cap) {
    const auto f = detail::explore_ta(b, cap);
    const auto& names = b.automaton().locations();
    std::string out = "digraph ta {\n  rankdir=LR;\n  node [shape=box];\n";
    out += "  __init [shape=point, label=\"\"];\n";
    for (std::size_t i = 0; i < f.locations.size(); ++i) {
        out += "  S" + std::to_string(i) + " [label=\"S" + std::to_string(i) + "\\n" +
               f.locations[i].to_string(names) + "\"" +
               (b.accepting(f.locations[i]) ? ", peripheries=2" : "") + "];\n";
    }
    out += "  __init -> S0;\n";
    for (const auto& e : f.edges) {
        std::string label = e.letter;
        for (const auto& [clock, cc] : e.t->guard)
            label += ", " + detail::ta_constraint_text(clock, cc);
        for (int r : e.t->resets) label += ", " + detail::ta_clock_name(r) + ":=0";
        out += "  S" + std::to_string(e.from) + " -> S" + std::to_string(e.to) + " [label=\"" +
               label + "\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace mitlkit
