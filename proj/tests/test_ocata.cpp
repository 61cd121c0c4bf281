#include <catch2/catch_amalgamated.hpp>

#include <mitlkit/approx.hpp>
#include <mitlkit/ocata.hpp>

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

using namespace mitlkit;

namespace {

ClockConstraint cc(Cmp op, std::uint64_t bound) { return ClockConstraint{op, bound}; }

Interval pt(const Rational& v) { return Interval::point(v); }

Configuration cfg(const std::vector<std::pair<std::string, Interval>>& states) {
    auto c = Configuration::from_states(states);
    REQUIRE(c.has_value());
    return *c;
}

// Single-letter automaton over {s} with three locations: l0 forks a reset
// copy to l1 on every letter, l1 keeps copies whose clock avoids 1 and
// moves copies hitting exactly 1 into the rejecting sink l2.
Ocata fork_automaton() {
    Ocata a({"s"}, {"l0", "l1", "l2"}, "l0", {"l0", "l1"});
    a.add_transition("l0", "s", tf_and(tf_loc("l0"), tf_reset(tf_loc("l1"))));
    a.add_transition(
        "l1", "s",
        tf_or(tf_and(tf_loc("l2"), tf_and(tf_constraint(cc(Cmp::Le, 1)), tf_constraint(cc(Cmp::Ge, 1)))),
              tf_and(tf_loc("l1"), tf_or(tf_constraint(cc(Cmp::Lt, 1)), tf_constraint(cc(Cmp::Gt, 1))))));
    a.add_transition("l2", "s", tf_loc("l2"));
    return a;
}

// Truth of a transition formula in a model: a location atom demands the
// state with the current interval (or [0,0] under a reset), a constraint
// must hold on the whole interval.
bool models(const TfPtr& g, const Configuration& m, const Interval& ivl, bool reset) {
    using K = TransFormula::Kind;
    switch (g->kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Loc: {
            const Interval want = reset ? pt(Rational(0)) : ivl;
            for (const auto& i : m.at(g->loc))
                if (i == want) return true;
            return false;
        }
        case K::Constr: return interval_sat(reset ? pt(Rational(0)) : ivl, g->cc);
        case K::Or: return models(g->lhs, m, ivl, reset) || models(g->rhs, m, ivl, reset);
        case K::And: return models(g->lhs, m, ivl, reset) && models(g->rhs, m, ivl, reset);
        case K::Reset: return models(g->lhs, m, ivl, true);
    }
    return false;
}

// Reference minimal-model computation: enumerate every configuration over
// the states a location atom could demand, keep the satisfying ones, filter
// to the inclusion-minimal ones.
std::vector<Configuration> minimal_models_bruteforce(const TfPtr& g,
                                                     const std::vector<std::string>& locs,
                                                     const Interval& ivl) {
    std::set<std::pair<std::string, Interval>> state_set;
    for (const auto& l : locs) {
        state_set.insert({l, ivl});
        state_set.insert({l, pt(Rational(0))});
    }
    const std::vector<std::pair<std::string, Interval>> universe(state_set.begin(), state_set.end());
    std::vector<Configuration> sat;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << universe.size()); ++mask) {
        std::vector<std::pair<std::string, Interval>> pick;
        for (std::size_t b = 0; b < universe.size(); ++b)
            if (mask & (std::uint64_t(1) << b)) pick.push_back(universe[b]);
        const auto c = Configuration::from_states(pick);
        if (!c) continue;
        if (models(g, *c, ivl, false) &&
            std::find(sat.begin(), sat.end(), *c) == sat.end())
            sat.push_back(*c);
    }
    std::vector<Configuration> out;
    for (const auto& m : sat) {
        bool minimal = true;
        for (const auto& o : sat)
            if (o != m && o.subset_of(m)) { minimal = false; break; }
        if (minimal) out.push_back(m);
    }
    return out;
}

std::vector<Configuration> sorted_configs(std::vector<Configuration> v) {
    std::sort(v.begin(), v.end());
    return v;
}

TfPtr random_gamma(std::mt19937_64& rng, int depth) {
    static const std::vector<std::string> locs = {"p", "q", "r"};
    if (depth <= 0) {
        switch (rng() % 4) {
            case 0: return tf_true();
            case 1: return tf_false();
            case 2: return tf_loc(locs[rng() % locs.size()]);
            default: return tf_constraint(cc(static_cast<Cmp>(rng() % 4), rng() % 4));
        }
    }
    switch (rng() % 7) {
        case 0: return tf_true();
        case 1: return tf_loc(locs[rng() % locs.size()]);
        case 2: return tf_constraint(cc(static_cast<Cmp>(rng() % 4), rng() % 4));
        case 3: return tf_or(random_gamma(rng, depth - 1), random_gamma(rng, depth - 1));
        case 4: return tf_and(random_gamma(rng, depth - 1), random_gamma(rng, depth - 1));
        case 5: return tf_reset(random_gamma(rng, depth - 1));
        default: return tf_and(random_gamma(rng, depth - 1), random_gamma(rng, depth - 1));
    }
}

Interval random_interval(std::mt19937_64& rng) {
    const Rational lo(static_cast<std::int64_t>(rng() % 7), 2);
    if (rng() % 8 == 0) return Interval::unbounded(lo, rng() % 2 == 0);
    const std::int64_t width = static_cast<std::int64_t>(rng() % 5);
    if (width == 0) return pt(lo);
    const Rational hi = lo + Rational(width, 2);
    switch (rng() % 4) {
        case 0: return Interval::closed(lo, hi);
        case 1: return Interval::open(lo, hi);
        case 2: return Interval::left_open(lo, hi);
        default: return Interval::right_open(lo, hi);
    }
}

Ocata random_automaton(std::mt19937_64& rng) {
    const std::vector<std::string> locs = {"a", "b", "c"};
    const std::vector<std::string> alphabet = {"s", "t"};
    std::set<std::string> accepting;
    for (const auto& l : locs)
        if (rng() % 2) accepting.insert(l);
    Ocata a(alphabet, locs, "a", accepting);
    for (const auto& src : locs)
        for (const auto& letter : alphabet) {
            const std::size_t narcs = rng() % 3;
            for (std::size_t j = 0; j < narcs; ++j) {
                ArcBody body;
                for (const auto& tloc : locs) {
                    switch (rng() % 5) {
                        case 0: body.targets.emplace_back(tloc, false); break;
                        case 1: body.targets.emplace_back(tloc, true); break;
                        case 2:
                            body.targets.emplace_back(tloc, false);
                            body.targets.emplace_back(tloc, true);
                            break;
                        default: break;
                    }
                }
                std::sort(body.targets.begin(), body.targets.end());
                const std::size_t nguards = rng() % 3;
                for (std::size_t g = 0; g < nguards; ++g)
                    body.guard.push_back(cc(static_cast<Cmp>(rng() % 4), rng() % 4));
                a.add_arc(src, letter, std::move(body));
            }
        }
    return a;
}

TimedWord random_word(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                      std::size_t max_len) {
    std::vector<TimedEvent> ev;
    Rational t(0);
    const std::size_t n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) {
        t += Rational(static_cast<std::int64_t>(rng() % 4), 2);
        ev.push_back({alphabet[rng() % alphabet.size()], t});
    }
    return TimedWord(std::move(ev));
}

bool lists_sorted_disjoint(const Configuration& c) {
    for (const auto& [loc, list] : c.locations()) {
        (void)loc;
        if (list.empty()) return false;
        for (std::size_t k = 0; k + 1 < list.size(); ++k)
            if (!interval_lt(list[k], list[k + 1])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("transition formulas normalize to arc bodies in disjunct order") {
    SECTION("conjunctive fork with a reset target") {
        const auto arcs = normalize_dnf(tf_and(tf_loc("l0"), tf_reset(tf_loc("l1"))));
        REQUIRE(arcs.size() == 1);
        CHECK(arcs[0].targets ==
              std::vector<std::pair<std::string, bool>>{{"l0", false}, {"l1", true}});
        CHECK(arcs[0].guard.empty());
        CHECK(arcs[0].to_string() == "l0 & x.l1");
    }
    SECTION("equality guard and split inequality guard") {
        const auto arcs = normalize_dnf(
            tf_or(tf_and(tf_loc("l2"), tf_and(tf_constraint(cc(Cmp::Le, 1)), tf_constraint(cc(Cmp::Ge, 1)))),
                  tf_and(tf_loc("l1"), tf_or(tf_constraint(cc(Cmp::Lt, 1)), tf_constraint(cc(Cmp::Gt, 1))))));
        REQUIRE(arcs.size() == 3);
        CHECK(arcs[0].targets == std::vector<std::pair<std::string, bool>>{{"l2", false}});
        CHECK(arcs[0].guard == std::vector<ClockConstraint>{cc(Cmp::Le, 1), cc(Cmp::Ge, 1)});
        CHECK(arcs[1].targets == std::vector<std::pair<std::string, bool>>{{"l1", false}});
        CHECK(arcs[1].guard == std::vector<ClockConstraint>{cc(Cmp::Lt, 1)});
        CHECK(arcs[2].targets == std::vector<std::pair<std::string, bool>>{{"l1", false}});
        CHECK(arcs[2].guard == std::vector<ClockConstraint>{cc(Cmp::Gt, 1)});
    }
    SECTION("reset rewrites constraints to a static test at zero") {
        const auto sat = normalize_dnf(tf_reset(tf_constraint(cc(Cmp::Le, 0))));
        REQUIRE(sat.size() == 1);
        CHECK(sat[0].targets.empty());
        CHECK(sat[0].guard.empty());
        CHECK(sat[0].to_string() == "true");
        CHECK(normalize_dnf(tf_reset(tf_constraint(cc(Cmp::Gt, 0)))).empty());
    }
    SECTION("reset distributes over disjunction") {
        const auto arcs = normalize_dnf(tf_reset(tf_or(tf_loc("l1"), tf_loc("l2"))));
        REQUIRE(arcs.size() == 2);
        CHECK(arcs[0].targets == std::vector<std::pair<std::string, bool>>{{"l1", true}});
        CHECK(arcs[1].targets == std::vector<std::pair<std::string, bool>>{{"l2", true}});
    }
    SECTION("constants") {
        CHECK(normalize_dnf(tf_false()).empty());
        const auto top = normalize_dnf(tf_true());
        REQUIRE(top.size() == 1);
        CHECK(top[0].targets.empty());
        CHECK(top[0].guard.empty());
    }
    SECTION("infinite bounds decide statically") {
        ClockConstraint lt_inf{Cmp::Lt, std::nullopt};
        ClockConstraint gt_inf{Cmp::Gt, std::nullopt};
        const auto lt = normalize_dnf(tf_and(tf_loc("l1"), tf_constraint(lt_inf)));
        REQUIRE(lt.size() == 1);
        CHECK(lt[0].guard.empty());
        CHECK(normalize_dnf(tf_and(tf_loc("l1"), tf_constraint(gt_inf))).empty());
    }
    SECTION("duplicate disjuncts collapse") {
        const auto arcs = normalize_dnf(tf_or(tf_loc("l1"), tf_loc("l1")));
        CHECK(arcs.size() == 1);
    }
}

TEST_CASE("automaton construction validates location references") {
    CHECK_THROWS_AS(Ocata({"s"}, {"l0"}, "bad", {}), std::invalid_argument);
    CHECK_THROWS_AS(Ocata({"s"}, {"l0"}, "l0", {"bad"}), std::invalid_argument);
    Ocata a({"s"}, {"l0"}, "l0", {"l0"});
    CHECK_THROWS_AS(a.add_arc("bad", "s", ArcBody{}), std::invalid_argument);
    ArcBody body;
    body.targets.emplace_back("bad", false);
    CHECK_THROWS_AS(a.add_arc("l0", "s", std::move(body)), std::invalid_argument);
}

TEST_CASE("minimal models of the fork automaton") {
    const Ocata a = fork_automaton();
    SECTION("an interval strictly above the guard constant keeps the copy") {
        const auto mm = minimal_models(a, "l1", "s", Interval::closed(Rational(3, 2), Rational(2)));
        REQUIRE(mm.size() == 1);
        CHECK(mm[0] == cfg({{"l1", Interval::closed(Rational(3, 2), Rational(2))}}));
    }
    SECTION("an interval straddling the guard constant blocks") {
        CHECK(minimal_models(a, "l1", "s", Interval::closed(Rational(3, 5), Rational(11, 10))).empty());
    }
    SECTION("the fork arc spawns a fresh copy") {
        const auto mm = minimal_models(a, "l0", "s", pt(Rational(0)));
        REQUIRE(mm.size() == 1);
        CHECK(mm[0] == cfg({{"l0", pt(Rational(0))}, {"l1", pt(Rational(0))}}));
    }
    SECTION("a singular interval at the constant takes the equality arc") {
        const auto mm = minimal_models(a, "l1", "s", pt(Rational(1)));
        REQUIRE(mm.size() == 1);
        CHECK(mm[0] == cfg({{"l2", pt(Rational(1))}}));
    }
    SECTION("no arcs for an unknown letter") {
        CHECK(minimal_models(a, "l1", "t", pt(Rational(0))).empty());
    }
}

TEST_CASE("minimal models drop candidates subsumed by smaller ones") {
    Ocata a({"s"}, {"a", "b"}, "a", {"a", "b"});
    a.add_transition("a", "s", tf_or(tf_loc("b"), tf_and(tf_loc("b"), tf_reset(tf_loc("b")))));
    const auto mm = minimal_models(a, "a", "s", pt(Rational(1, 2)));
    REQUIRE(mm.size() == 1);
    CHECK(mm[0] == cfg({{"b", pt(Rational(1, 2))}}));

    Ocata d({"s"}, {"a", "b"}, "a", {"a", "b"});
    d.add_transition("a", "s", tf_or(tf_true(), tf_loc("b")));
    const auto dm = minimal_models(d, "a", "s", pt(Rational(1, 2)));
    REQUIRE(dm.size() == 1);
    CHECK(dm[0].empty());
}

TEST_CASE("minimal models agree with exhaustive enumeration") {
    std::mt19937_64 rng(2024);
    const std::vector<std::string> locs = {"p", "q", "r"};
    for (int trial = 0; trial < 300; ++trial) {
        const TfPtr gamma = random_gamma(rng, 2);
        Ocata a({"s"}, locs, "p", {});
        a.add_transition("p", "s", gamma);
        const Interval ivl = random_interval(rng);
        const auto got = sorted_configs(minimal_models(a, "p", "s", ivl));
        const auto want = sorted_configs(minimal_models_bruteforce(gamma, locs, ivl));
        INFO("trial " << trial << " interval " << ivl.to_string());
        REQUIRE(got == want);
    }
}

TEST_CASE("time elapse shifts every interval") {
    const Configuration c = cfg({{"l0", pt(Rational(0))}, {"l1", pt(Rational(0))}});
    CHECK(time_elapse(c, Rational(1, 5)) ==
          cfg({{"l0", pt(Rational(1, 5))}, {"l1", pt(Rational(1, 5))}}));
    CHECK(time_elapse(c, Rational(0)) == c);
    const Configuration d =
        cfg({{"p", pt(Rational(3, 10))}, {"q", Interval::closed(Rational(0), Rational(1, 5))}});
    CHECK(time_elapse(d, Rational(17, 10)) ==
          cfg({{"p", pt(Rational(2))}, {"q", Interval::closed(Rational(17, 10), Rational(19, 10))}}));
    CHECK_THROWS_AS(time_elapse(c, Rational(-1)), std::invalid_argument);
}

TEST_CASE("discrete successors under the identity approximation") {
    const Ocata a = fork_automaton();
    const auto succ = discrete_successors(a, cfg({{"l0", pt(Rational(0))}}), "s", approx_id());
    REQUIRE(succ.size() == 1);
    CHECK(succ[0] == cfg({{"l0", pt(Rational(0))}, {"l1", pt(Rational(0))}}));

    Ocata dead({"s"}, {"a"}, "a", {"a"});
    dead.add_transition("a", "s", tf_false());
    CHECK(discrete_successors(dead, cfg({{"a", pt(Rational(0))}}), "s", approx_id()).empty());
    CHECK(!accepts(dead, TimedWord::parse("(s,1)"), approx_id()).accepted);
}

TEST_CASE("discrete successors under a per-location merge") {
    const Ocata a = fork_automaton();
    const auto succ = discrete_successors(a, cfg({{"l0", pt(Rational(1, 5))}, {"l1", pt(Rational(1, 5))}}),
                                          "s", approx_hull_on({"l1"}));
    REQUIRE(succ.size() == 1);
    CHECK(succ[0] ==
          cfg({{"l0", pt(Rational(1, 5))}, {"l1", Interval::closed(Rational(0), Rational(1, 5))}}));
}

TEST_CASE("firing records the arc choices and the pre-approximation union") {
    const Ocata a = fork_automaton();
    const Configuration c = cfg({{"l0", pt(Rational(1, 5))}, {"l1", pt(Rational(1, 5))}});
    const auto outcomes = fire_outcomes(a, c, "s", approx_hull_on({"l1"}));
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].arcs == std::vector<std::size_t>{0, 1});
    CHECK(outcomes[0].pre_approx ==
          cfg({{"l0", pt(Rational(1, 5))}, {"l1", pt(Rational(0))}, {"l1", pt(Rational(1, 5))}}));
    CHECK(outcomes[0].post ==
          cfg({{"l0", pt(Rational(1, 5))}, {"l1", Interval::closed(Rational(0), Rational(1, 5))}}));
}

TEST_CASE("unions that would overlap distinct intervals are dropped") {
    Ocata a({"s"}, {"a", "b"}, "a", {"a", "b"});
    a.add_transition("a", "s", tf_loc("a"));
    a.add_transition("b", "s", tf_reset(tf_loc("a")));
    const Configuration clash =
        cfg({{"a", Interval::closed(Rational(0), Rational(1))}, {"b", pt(Rational(1, 2))}});
    CHECK(fire_outcomes(a, clash, "s", approx_id()).empty());
    const Configuration clear =
        cfg({{"a", Interval::closed(Rational(2), Rational(3))}, {"b", pt(Rational(1, 2))}});
    const auto ok = fire_outcomes(a, clear, "s", approx_id());
    REQUIRE(ok.size() == 1);
    CHECK(ok[0].post ==
          cfg({{"a", pt(Rational(0))}, {"a", Interval::closed(Rational(2), Rational(3))}}));
}

TEST_CASE("identical spawned states collapse to one copy") {
    Ocata a({"s"}, {"a", "b"}, "a", {"a", "b"});
    a.add_transition("a", "s", tf_reset(tf_loc("a")));
    a.add_transition("b", "s", tf_reset(tf_loc("a")));
    const auto outcomes =
        fire_outcomes(a, cfg({{"a", pt(Rational(1))}, {"b", pt(Rational(1))}}), "s", approx_id());
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].post == cfg({{"a", pt(Rational(0))}}));
    CHECK(config_clock_copies(outcomes[0].post) == 1);
}

TEST_CASE("a configuration is accepting when every occupied location is accepting") {
    const Ocata a = fork_automaton();
    CHECK(a.is_accepting(Configuration{}));
    CHECK(!a.is_accepting(cfg({{"l2", pt(Rational(0))}})));
    CHECK(a.is_accepting(
        cfg({{"l0", pt(Rational(1, 2))}, {"l1", Interval::closed(Rational(0), Rational(1, 2))}})));
}

TEST_CASE("clock copy counts weigh singular intervals once and others twice") {
    CHECK(config_clock_copies(Configuration{}) == 0);
    CHECK(config_clock_copies(
              cfg({{"l0", pt(Rational(1, 5))}, {"l1", Interval::closed(Rational(0), Rational(1, 5))}})) == 3);
    CHECK(config_clock_copies(cfg({{"l0", pt(Rational(1, 2))},
                                   {"l1", pt(Rational(0))},
                                   {"l1", pt(Rational(3, 10))},
                                   {"l1", pt(Rational(1, 2))}})) == 4);
}

TEST_CASE("exact semantics accepts the probe word and replays its witness") {
    const Ocata a = fork_automaton();
    const TimedWord w = TimedWord::parse("(s,0)(s,0.2)(s,0.5)(s,1.1)");
    const auto res = accepts(a, w, approx_id());
    REQUIRE(res.accepted);
    REQUIRE(res.witness.has_value());
    const auto& steps = res.witness->steps;
    REQUIRE(steps.size() == 4);
    CHECK(steps[0].after_fire == cfg({{"l0", pt(Rational(0))}, {"l1", pt(Rational(0))}}));
    CHECK(steps[1].after_fire ==
          cfg({{"l0", pt(Rational(1, 5))}, {"l1", pt(Rational(0))}, {"l1", pt(Rational(1, 5))}}));
    CHECK(steps[2].after_fire == cfg({{"l0", pt(Rational(1, 2))},
                                      {"l1", pt(Rational(0))},
                                      {"l1", pt(Rational(3, 10))},
                                      {"l1", pt(Rational(1, 2))}}));
    CHECK(steps[3].after_fire == cfg({{"l0", pt(Rational(11, 10))},
                                      {"l1", pt(Rational(0))},
                                      {"l1", pt(Rational(3, 5))},
                                      {"l1", pt(Rational(9, 10))},
                                      {"l1", pt(Rational(11, 10))}}));
    CHECK(replay_witness(a, w, approx_id(), *res.witness));
}

TEST_CASE("merging on the guarded location loses the probe word") {
    const Ocata a = fork_automaton();
    const ApproxFn f = approx_hull_on({"l1"});
    SECTION("the shorter prefix is still accepted") {
        const auto res = accepts(a, TimedWord::parse("(s,0)(s,0.2)(s,0.5)"), f);
        REQUIRE(res.accepted);
        REQUIRE(res.witness.has_value());
        CHECK(res.witness->steps.back().after_fire ==
              cfg({{"l0", pt(Rational(1, 2))}, {"l1", Interval::closed(Rational(0), Rational(1, 2))}}));
        CHECK(replay_witness(a, TimedWord::parse("(s,0)(s,0.2)(s,0.5)"), f, *res.witness));
    }
    SECTION("the merged interval straddles the guard and blocks on the last letter") {
        const auto res = accepts(a, TimedWord::parse("(s,0)(s,0.2)(s,0.5)(s,1.1)"), f);
        CHECK(!res.accepted);
        CHECK(res.blocked_at == 4);
        REQUIRE(res.blocking.size() == 1);
        CHECK(res.blocking[0] == cfg({{"l0", pt(Rational(11, 10))},
                                      {"l1", Interval::closed(Rational(3, 5), Rational(11, 10))}}));
    }
}

TEST_CASE("the empty word is accepted exactly from accepting configurations") {
    const Ocata a = fork_automaton();
    CHECK(accepts_from(a, cfg({{"l0", pt(Rational(0))}}), TimedWord{}, approx_id()).accepted);
    const auto res = accepts_from(a, cfg({{"l2", pt(Rational(0))}}), TimedWord{}, approx_id());
    CHECK(!res.accepted);
    CHECK(res.blocked_at == 1);
    REQUIRE(res.blocking.size() == 1);
    CHECK(res.blocking[0] == cfg({{"l2", pt(Rational(0))}}));
}

TEST_CASE("witness replay rejects tampered runs") {
    const Ocata a = fork_automaton();
    const TimedWord w = TimedWord::parse("(s,0)(s,0.2)(s,0.5)");
    const auto res = accepts(a, w, approx_id());
    REQUIRE(res.accepted);
    WitnessRun bad_delay = *res.witness;
    bad_delay.steps[1].delay += Rational(1);
    CHECK(!replay_witness(a, w, approx_id(), bad_delay));
    WitnessRun bad_letter = *res.witness;
    bad_letter.steps[0].letter = "t";
    CHECK(!replay_witness(a, w, approx_id(), bad_letter));
    WitnessRun truncated = *res.witness;
    truncated.steps.pop_back();
    CHECK(!replay_witness(a, w, approx_id(), truncated));
    WitnessRun bad_config = *res.witness;
    bad_config.steps[2].after_fire = Configuration{};
    CHECK(!replay_witness(a, w, approx_id(), bad_config));
}

TEST_CASE("approximated acceptance never exceeds exact acceptance") {
    std::mt19937_64 rng(77);
    int approx_accepts = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Ocata a = random_automaton(rng);
        const TimedWord w = random_word(rng, a.alphabet(), 4);
        ApproxFn f = approx_id();
        switch (rng() % 5) {
            case 0: f = approx_fk(1); break;
            case 1: f = approx_fk(2); break;
            case 2: f = approx_fk(3); break;
            case 3: f = approx_hull_all(); break;
            default: f = approx_hull_on({"a", "b"}); break;
        }
        const auto with_f = accepts(a, w, f);
        if (!with_f.accepted) continue;
        ++approx_accepts;
        REQUIRE(replay_witness(a, w, f, *with_f.witness));
        for (const auto& step : with_f.witness->steps) {
            CHECK(lists_sorted_disjoint(step.after_elapse));
            CHECK(lists_sorted_disjoint(step.after_fire));
        }
        INFO("trial " << trial << " word " << w.to_string());
        REQUIRE(accepts(a, w, approx_id()).accepted);
    }
    CHECK(approx_accepts > 30);
}

TEST_CASE("bounded approximations cap the copy count along their runs") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const Ocata a = random_automaton(rng);
        const TimedWord w = random_word(rng, a.alphabet(), 4);
        const std::size_t k = 1 + rng() % 3;
        const auto res = accepts(a, w, approx_fk(k));
        if (!res.accepted) continue;
        for (const auto& step : res.witness->steps) {
            // Within budget, or the total fallback fired and left one hull
            // interval per location.
            bool all_hulled = true;
            for (const auto& [loc, list] : step.after_fire.locations()) {
                (void)loc;
                if (list.size() != 1) all_hulled = false;
            }
            CHECK((config_clock_copies(step.after_fire) <= k || all_hulled));
        }
    }
}

TEST_CASE("run enumeration finds every exact run of the probe word") {
    const Ocata a = fork_automaton();
    const TimedWord w = TimedWord::parse("(s,0)(s,0.2)(s,0.5)(s,1.1)");
    const auto runs = accepting_runs(a, a.initial_config(), w, approx_id(), 16);
    REQUIRE(runs.size() == 1);
    CHECK(replay_witness(a, w, approx_id(), runs[0]));
    CHECK(accepting_runs(a, a.initial_config(), w, approx_id(), 0).empty());
}

TEST_CASE("automaton serialization round-trips through its own output") {
    const Ocata a = fork_automaton();
    const auto j = a.to_json();
    CHECK(j.at("alphabet") == nlohmann::ordered_json::array({"s"}));
    CHECK(j.at("initial") == "l0");
    CHECK(j.at("arcs").size() == 5);
    const Ocata b = Ocata::from_json(j);
    CHECK(b.to_json() == j);
    CHECK(accepts(b, TimedWord::parse("(s,0)(s,0.2)(s,0.5)(s,1.1)"), approx_id()).accepted);
    CHECK(!accepts(b, TimedWord::parse("(s,0)(s,0.2)(s,0.5)(s,1.1)"), approx_hull_on({"l1"})).accepted);

    auto bad = j;
    bad["arcs"][0]["guard"] = nlohmann::json::array({{{"op", "<="}, {"const", "nonsense"}}});
    CHECK_THROWS_AS(Ocata::from_json(bad), std::invalid_argument);
}

TEST_CASE("graphviz export marks accepting, reset and forked arcs") {
    const Ocata a = fork_automaton();
    const std::string dot = a.to_dot();
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"l0\" [shape=doublecircle]") != std::string::npos);
    CHECK(dot.find("\"l1\" [shape=doublecircle]") != std::string::npos);
    CHECK(dot.find("\"l2\";") != std::string::npos);
    CHECK(dot.find("x:=0") != std::string::npos);
    CHECK(dot.find("__j") != std::string::npos);
    CHECK(dot.find("x<1") != std::string::npos);
    CHECK(dot.find("x>1") != std::string::npos);
}
