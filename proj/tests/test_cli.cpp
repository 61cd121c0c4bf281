#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CmdResult {
    std::string out;
    int rc = -1;
};

// Runs the tool through the shell with color disabled; stderr is folded into
// the captured stream so error lines are observable.
CmdResult run_cli(const std::string& args) {
    const std::string cmd =
        "MITLKIT_COLOR=0 '" + std::string(MITLKIT_CLI_PATH) + "' " + args + " 2>&1";
    CmdResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("parse prints the syntax tree") {
    const CmdResult r = run_cli("parse 'F[1,2] (a & b)'");
    CHECK(r.rc == 0);
    CHECK(r.out == "Until([1,2], True, And(Atom(a), Atom(b)))\n");
}

TEST_CASE("parse rejects singular modality windows with a located error") {
    const CmdResult r = run_cli("parse 'F[1,1] a'");
    CHECK(r.rc == 2);
    CHECK(r.out ==
          "error: syntax error at position 6: singular interval [1,1] not allowed in MITL\n");
}

TEST_CASE("nnf pushes negations to the atoms") {
    const CmdResult a = run_cli("nnf '!(a U[0,3] b)'");
    CHECK(a.rc == 0);
    CHECK(a.out == "!a R[0,3] !b\n");
    const CmdResult b = run_cli("nnf '!(G(p -> F[2,3] q))'");
    CHECK(b.rc == 0);
    CHECK(b.out == "T U[0,inf) (p & (F R[2,3] !q))\n");
}

TEST_CASE("eval reports the verdict through the exit code") {
    const CmdResult t = run_cli("eval 'true' '(a,0)'");
    CHECK(t.rc == 0);
    CHECK(t.out == "true\n");
    const CmdResult f = run_cli("eval 'b' '(a,0)'");
    CHECK(f.rc == 1);
    CHECK(f.out == "false\n");
    const CmdResult e = run_cli("eval 'a' ''");
    CHECK(e.rc == 2);
    CHECK(e.out == "error: eval: the empty word has no first position\n");
}

TEST_CASE("member agrees across semantics on a response property") {
    const std::string inst = "'G(a -> F[1,2] b)' '(a,0.1)(a,0.2)(a,1.9)(b,2)(b,3)'";
    for (const std::string sem : {"id", "fstar", "ta"}) {
        const CmdResult r = run_cli("member " + inst + " --sem " + sem);
        INFO("sem " << sem);
        CHECK(r.rc == 0);
        CHECK(r.out == "true\n");
    }
    const CmdResult miss = run_cli("member 'G(a -> F[1,2] b)' '(a,0.1)' --sem fstar");
    CHECK(miss.rc == 1);
    CHECK(miss.out == "false\n");
}

TEST_CASE("member can print the elapse and fire trace") {
    const CmdResult r = run_cli("member 'F[0,2] b' '(a,0.5)(b,1.5)' --sem id --witness");
    CHECK(r.rc == 0);
    CHECK(r.out == "true\n{(init,[0,0])} -(0.5,a)-> {(U0,[0,0])} -(1,b)-> {}\n");
    const CmdResult ta = run_cli("member 'a' '(a,0.5)' --sem ta --witness");
    CHECK(ta.rc == 0);
    CHECK(ta.out == "true\nwitness traces are not recorded for --sem ta\n");
}

TEST_CASE("member validates the semantics name") {
    const CmdResult r = run_cli("member 'a' '(a,0)' --sem exact");
    CHECK(r.rc == 2);
}

TEST_CASE("bound prints the copy bounds") {
    const CmdResult u = run_cli("bound 'T U[2,3] b'");
    CHECK(u.rc == 0);
    CHECK(u.out == "M=2 M_inf=10 M_1=1 K=4\n");
    const CmdResult a = run_cli("bound 'a'");
    CHECK(a.rc == 0);
    CHECK(a.out == "M=2 M_inf=0 M_1=0 K=2\n");
}

TEST_CASE("compile emits the automaton as json or graphviz") {
    const CmdResult j = run_cli("compile 'a' --out json");
    CHECK(j.rc == 0);
    const auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed.at("initial") == "init");
    CHECK(parsed.at("locations") == nlohmann::json::array({"init"}));
    const CmdResult d = run_cli("compile 'F[0,2] b' --out dot");
    CHECK(d.rc == 0);
    CHECK(d.out.find("digraph") != std::string::npos);
}

TEST_CASE("ta summarizes the explored fragment") {
    const CmdResult r = run_cli("ta 'F[0,2] b'");
    CHECK(r.rc == 0);
    CHECK(r.out == "clocks=2 locations_discovered=3 capped=false\n");
    const CmdResult j = run_cli("ta 'F[0,2] b' --out json");
    CHECK(j.rc == 0);
    const auto nl = j.out.find('\n');
    REQUIRE(nl != std::string::npos);
    const auto parsed = nlohmann::json::parse(j.out.substr(nl + 1));
    CHECK(parsed.at("clocks") == 2);
    CHECK(parsed.at("locations").size() == 3);
}

TEST_CASE("dot renders either automaton form") {
    const CmdResult a = run_cli("dot 'a'");
    CHECK(a.rc == 0);
    CHECK(a.out.find("digraph") != std::string::npos);
    const CmdResult b = run_cli("dot 'F[0,2] b' --ta");
    CHECK(b.rc == 0);
    CHECK(b.out.find("digraph ta") != std::string::npos);
}

TEST_CASE("stats reports witness copy usage against the bounds") {
    const CmdResult r = run_cli("stats 'F[0,2] b' '(a,0.5)(b,1.5)'");
    CHECK(r.rc == 0);
    CHECK(r.out == "accepted=true max_copies=1 K=4 M=2\n");
    const CmdResult miss = run_cli("stats 'F[0,2] b' '(a,3)'");
    CHECK(miss.rc == 1);
    CHECK(miss.out == "accepted=false max_copies=0 K=4 M=2\n");
}

TEST_CASE("difftest runs a clean seeded campaign and writes reports") {
    const std::string jsonl = "/tmp/mitlkit_cli_test.jsonl";
    std::remove(jsonl.c_str());
    const CmdResult r =
        run_cli("difftest --trials 20 --seed 11 --ta-period 5 --jsonl " + jsonl);
    CHECK(r.rc == 0);
    CHECK(r.out ==
          "seed=11\n"
          "trials=20 ta_trials=4 disagreements=0 prop1_violations=0 k_violations=0 "
          "loc_bound_failures=0\n");
    std::ifstream in(jsonl);
    REQUIRE(in.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        const auto rep = nlohmann::json::parse(line);
        CHECK(rep.at("trial") == lines);
        CHECK(rep.at("agree") == true);
        ++lines;
    }
    CHECK(lines == 20);
    std::remove(jsonl.c_str());
}

TEST_CASE("usage errors exit with the parse error code") {
    CHECK(run_cli("").rc == 2);
    CHECK(run_cli("frobnicate").rc == 2);
    CHECK(run_cli("parse").rc == 2);
}
