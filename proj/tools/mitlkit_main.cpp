#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "mitlkit/approx.hpp"
#include "mitlkit/difftest.hpp"
#include "mitlkit/mitl.hpp"
#include "mitlkit/ocata.hpp"
#include "mitlkit/ta.hpp"
#include "mitlkit/timed_word.hpp"
#include "mitlkit/translate.hpp"

using namespace mitlkit;

namespace {

bool use_color() {
    const char* env = std::getenv("MITLKIT_COLOR");
    if (env && std::string(env) == "0") return false;
    return isatty(fileno(stdout)) != 0;
}

std::string verdict_text(bool v) {
    if (!use_color()) return v ? "true" : "false";
    return v ? "\033[32mtrue\033[0m" : "\033[31mfalse\033[0m";
}

std::vector<std::string> split_letters(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    if (out.empty()) throw std::invalid_argument("alphabet: no letters given");
    return out;
}

// Formula atoms plus any word letters, unless overridden by --alphabet.
std::vector<std::string> effective_alphabet(const FormulaPtr& phi, const TimedWord* th,
                                            const std::string& flag) {
    if (!flag.empty()) return split_letters(flag);
    std::set<std::string> letters;
    for (const auto& l : default_alphabet(phi)) letters.insert(l);
    if (th)
        for (const auto& l : th->letters()) letters.insert(l);
    return {letters.begin(), letters.end()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MITL evaluation, one-clock alternating automata, and timed-automata toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    std::string formula_text, word_text, alphabet_flag, out_format, ta_out, sem_name, jsonl_path;
    bool witness_flag = false, ta_dot = false;
    std::size_t cap = 256;

    auto* cmd_parse = app.add_subcommand("parse", "Parse a formula and print its syntax tree");
    cmd_parse->add_option("formula", formula_text, "Formula text")->required();
    cmd_parse->callback([&] { std::cout << dump_ast(parse(formula_text)) << "\n"; });

    auto* cmd_nnf = app.add_subcommand("nnf", "Print the negation normal form of a formula");
    cmd_nnf->add_option("formula", formula_text, "Formula text")->required();
    cmd_nnf->callback([&] { std::cout << print(to_nnf(parse(formula_text))) << "\n"; });

    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a formula on a timed word directly");
    cmd_eval->add_option("formula", formula_text, "Formula text")->required();
    cmd_eval->add_option("word", word_text, "Timed word, e.g. \"(a,0.5)(b,2)\"")->required();
    cmd_eval->callback([&] {
        const TimedWord th = TimedWord::parse(word_text);
        if (th.empty()) throw std::invalid_argument("eval: the empty word has no first position");
        const bool v = eval(th, 1, parse(formula_text));
        std::cout << verdict_text(v) << "\n";
        rc = v ? 0 : 1;
    });

    auto* cmd_member = app.add_subcommand("member", "Decide word membership via an automaton");
    cmd_member->add_option("formula", formula_text, "Formula text")->required();
    cmd_member->add_option("word", word_text, "Timed word")->required();
    cmd_member->add_option("--sem", sem_name, "Semantics: id, fstar, or ta")
        ->default_val("fstar")
        ->check(CLI::IsMember({"id", "fstar", "ta"}));
    cmd_member->add_flag("--witness", witness_flag, "Print the elapse/fire trace");
    cmd_member->add_option("--alphabet", alphabet_flag, "Comma-separated alphabet override");
    cmd_member->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const TimedWord th = TimedWord::parse(word_text);
        const auto alphabet = effective_alphabet(phi, &th, alphabet_flag);
        const Ocata a = mitl_to_ocata(phi, alphabet);
        bool v = false;
        if (sem_name == "ta") {
            TimedAutomaton b(a, static_cast<int>(m_bound(phi).m));
            v = ta_accepts(b, th);
            std::cout << verdict_text(v) << "\n";
            if (witness_flag) std::cout << "witness traces are not recorded for --sem ta\n";
        } else {
            const ApproxFn f = sem_name == "id" ? approx_id() : f_star(phi);
            const AcceptResult res = accepts(a, th, f);
            v = res.accepted;
            std::cout << verdict_text(v) << "\n";
            if (witness_flag) std::cout << detail::witness_summary(res) << "\n";
        }
        rc = v ? 0 : 1;
    });

    auto* cmd_compile = app.add_subcommand("compile", "Translate a formula to its automaton");
    cmd_compile->add_option("formula", formula_text, "Formula text")->required();
    cmd_compile->add_option("--out", out_format, "Output format: json or dot")
        ->default_val("json")
        ->check(CLI::IsMember({"json", "dot"}));
    cmd_compile->add_option("--alphabet", alphabet_flag, "Comma-separated alphabet override");
    cmd_compile->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const Ocata a = mitl_to_ocata(phi, effective_alphabet(phi, nullptr, alphabet_flag));
        if (out_format == "dot")
            std::cout << a.to_dot();
        else
            std::cout << a.to_json().dump(2) << "\n";
    });

    auto* cmd_bound = app.add_subcommand("bound", "Print the clock-copy bounds of a formula");
    cmd_bound->add_option("formula", formula_text, "Formula text")->required();
    cmd_bound->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const BoundTriple b = m_bound(phi);
        std::cout << "M=" << b.m << " M_inf=" << b.m_inf << " M_1=" << b.m_one
                  << " K=" << k_star(phi) << "\n";
    });

    auto* cmd_ta = app.add_subcommand("ta", "Build the finite-clock automaton and explore it");
    cmd_ta->add_option("formula", formula_text, "Formula text")->required();
    cmd_ta->add_option("--cap", cap, "Exploration cap on discovered locations")->default_val(256);
    cmd_ta->add_option("--out", ta_out, "Also print the fragment: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));
    cmd_ta->add_option("--alphabet", alphabet_flag, "Comma-separated alphabet override");
    cmd_ta->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const Ocata a = mitl_to_ocata(phi, effective_alphabet(phi, nullptr, alphabet_flag));
        TimedAutomaton b(a, static_cast<int>(m_bound(phi).m));
        const TaStats st = ta_stats(b, cap);
        std::cout << "clocks=" << st.clock_count
                  << " locations_discovered=" << st.locations_discovered
                  << " capped=" << (st.capped ? "true" : "false") << "\n";
        if (ta_out == "json")
            std::cout << ta_to_json(b, cap).dump(2) << "\n";
        else if (ta_out == "dot")
            std::cout << ta_to_dot(b, cap);
    });

    auto* cmd_dot = app.add_subcommand("dot", "Print a Graphviz view of an automaton");
    cmd_dot->add_option("formula", formula_text, "Formula text")->required();
    cmd_dot->add_flag("--ta", ta_dot, "Export the finite-clock automaton fragment instead");
    cmd_dot->add_option("--cap", cap, "Exploration cap for --ta")->default_val(256);
    cmd_dot->add_option("--alphabet", alphabet_flag, "Comma-separated alphabet override");
    cmd_dot->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const Ocata a = mitl_to_ocata(phi, effective_alphabet(phi, nullptr, alphabet_flag));
        if (ta_dot) {
            TimedAutomaton b(a, static_cast<int>(m_bound(phi).m));
            std::cout << ta_to_dot(b, cap);
        } else {
            std::cout << a.to_dot();
        }
    });

    auto* cmd_stats = app.add_subcommand("stats", "Clock-copy statistics of one membership check");
    cmd_stats->add_option("formula", formula_text, "Formula text")->required();
    cmd_stats->add_option("word", word_text, "Timed word")->required();
    cmd_stats->add_option("--sem", sem_name, "Semantics: id or fstar")
        ->default_val("fstar")
        ->check(CLI::IsMember({"id", "fstar"}));
    cmd_stats->callback([&] {
        const FormulaPtr phi = to_nnf(parse(formula_text));
        const TimedWord th = TimedWord::parse(word_text);
        const Ocata a = mitl_to_ocata(phi, effective_alphabet(phi, &th, ""));
        const ApproxFn f = sem_name == "id" ? approx_id() : f_star(phi);
        const AcceptResult res = accepts(a, th, f);
        std::size_t max_copies = 0;
        if (res.accepted) max_copies = detail::witness_max_copies(*res.witness);
        const BoundTriple b = m_bound(phi);
        std::cout << "accepted=" << (res.accepted ? "true" : "false")
                  << " max_copies=" << max_copies << " K=" << k_star(phi) << " M=" << b.m << "\n";
        rc = res.accepted ? 0 : 1;
    });

    DifftestOptions opt;
    std::string alphabet_dt;
    auto* cmd_difftest = app.add_subcommand("difftest", "Cross-check all oracles on random inputs");
    cmd_difftest->add_option("--trials", opt.trials, "Number of trials")->default_val(500);
    cmd_difftest->add_option("--seed", opt.seed, "Base seed")->default_val(7);
    cmd_difftest->add_option("--max-modalities", opt.max_modalities, "Modality budget per formula")
        ->default_val(3);
    cmd_difftest->add_option("--max-const", opt.max_const, "Largest interval endpoint")
        ->default_val(3);
    cmd_difftest->add_option("--max-len", opt.max_len, "Longest word")->default_val(5);
    cmd_difftest->add_option("--grid", opt.grid_denominator, "Timestamp grid denominator")
        ->default_val(4);
    cmd_difftest->add_option("--horizon", opt.horizon, "Largest timestamp")->default_val(6);
    cmd_difftest->add_option("--ta-period", opt.ta_period,
                             "Run the finite-clock oracle every Nth trial (0 disables)")
        ->default_val(5);
    cmd_difftest->add_option("--alphabet", alphabet_dt, "Comma-separated alphabet");
    cmd_difftest->add_option("--jsonl", jsonl_path, "Write one JSON report per trial to a file");
    cmd_difftest->callback([&] {
        if (!alphabet_dt.empty()) opt.alphabet = split_letters(alphabet_dt);
        std::ofstream out;
        std::ostream* sink = nullptr;
        if (!jsonl_path.empty()) {
            out.open(jsonl_path);
            if (!out) throw std::invalid_argument("difftest: cannot open " + jsonl_path);
            sink = &out;
        }
        std::cout << "seed=" << opt.seed << "\n";
        const DifftestResult res = run_difftest(opt, sink);
        std::cout << res.summary.to_string() << "\n";
        rc = res.summary.clean() ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
