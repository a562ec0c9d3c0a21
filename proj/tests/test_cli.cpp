#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fibra/serialize.hpp"
#include "fibra/session.hpp"

using namespace fibra;

namespace {

Session::Options quiet_opts(std::ostream& out) {
    Session::Options o;
    o.quiet = true;
    o.out = &out;
    return o;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("eval stores results and prints summaries") {
    std::ostringstream out;
    Session s(quiet_opts(out));
    s.command("eval sq \"n > 0 & Ei At t < n => F[i + t] = F[i + t + n]\"");
    REQUIRE(s.results().count("sq"));
    CHECK(s.results().at("sq").num_states() == 3);
    CHECK(out.str().find("language matches: 10*") != std::string::npos);

    out.str("");
    s.command("eval anti \"n > 0 & Ei Ak k < n => F[i + k] != F[i + k + n]\"");
    CHECK(out.str().find("language: 1 2 4") != std::string::npos);

    out.str("");
    s.command("eval taut \"Ax x = x\"");
    CHECK(out.str().find("result: true") != std::string::npos);

    out.str("");
    s.command("eval nothing \"En n < 0\"");
    CHECK(out.str().find("result: false") != std::string::npos);
}

TEST_CASE("count, value, monoid, and range") {
    std::ostringstream out;
    Session s(quiet_opts(out));
    s.command("count cx n \"Aj j < i => Et t < n & F[j + t] != F[i + t]\"");
    CHECK(out.str().find("rank 10") != std::string::npos);
    out.str("");
    s.command("value cx 12");
    CHECK(out.str().find("cx(12) = 13") != std::string::npos);
    out.str("");
    s.command("value cx 199");
    CHECK(out.str().find("cx(199) = 200") != std::string::npos);
    CHECK_THROWS_AS(s.command("count bad q \"n > 0\""), SemanticError);
    CHECK_THROWS_AS(s.command("value missing 3"), SemanticError);
}

TEST_CASE("save, load-relation, and export-dot round trip") {
    std::ostringstream out;
    Session s(quiet_opts(out));
    s.command("eval evens \"Ei n = 2 * i\"");
    s.command("save evens cli_evens.txt");
    s.command("load-relation double cli_evens.txt");
    out.str("");
    s.command("eval check \"An double(n) <=> Ei n = 2 * i\"");
    CHECK(out.str().find("result: true") != std::string::npos);
    s.command("export-dot evens cli_evens.dot");
    std::string dot = slurp("cli_evens.dot");
    CHECK(dot.find("__init ->") != std::string::npos);
    CHECK_THROWS_AS(s.command("load-relation double cli_evens.txt"), SemanticError);
    std::remove("cli_evens.txt");
    std::remove("cli_evens.dot");
}

TEST_CASE("words round trip through the session") {
    std::ostringstream out;
    Session s(quiet_opts(out));
    s.command("save V cli_word_v.txt");
    s.command("load-word W cli_word_v.txt");
    out.str("");
    s.command("eval same \"An V[n] = W[n]\"");
    CHECK(out.str().find("result: true") != std::string::npos);
    CHECK_THROWS_AS(s.command("load-word W cli_word_v.txt"), SemanticError);
    std::remove("cli_word_v.txt");
}

TEST_CASE("scripts run line by line") {
    {
        std::ofstream f("cli_script.fib");
        f << "# comment line\n";
        f << "eval sq \"n > 0 & Ei At t < n => F[i + t] = F[i + t + n]\"\n";
        f << "save sq cli_sq.txt\n";
    }
    std::ostringstream out;
    Session s(quiet_opts(out));
    CHECK(s.run_script("cli_script.fib"));
    CHECK(slurp("cli_sq.txt").find("tracks 1 n") != std::string::npos);
    {
        std::ofstream f("cli_script.fib");
        f << "eval ok \"x = x\"\n";
        f << "value nope 3\n";
    }
    CHECK_THROWS_AS(s.run_script("cli_script.fib"), SemanticError);
    std::remove("cli_script.fib");
    std::remove("cli_sq.txt");
}

TEST_CASE("numeration systems load after passing their checks") {
    // write out the built-in bundle and a manifest
    NumerationBundle fib = fib_bundle();
    write_file(fib.add, "cli_ns_add.txt");
    write_file(fib.less, "cli_ns_less.txt");
    write_file(fib.canonical, "cli_ns_canon.txt");
    {
        std::ofstream f("cli_ns.ns");
        f << "name fib2\nadd cli_ns_add.txt\nless cli_ns_less.txt\ncanonical cli_ns_canon.txt\n";
    }
    std::ostringstream out;
    Session s(quiet_opts(out));
    s.command("load-numsys cli_ns.ns");
    CHECK(out.str().find("all checks passed") != std::string::npos);
    out.str("");
    s.command("eval sq \"n > 0 & Ei At t < n => F[i + t] = F[i + t + n]\"");
    CHECK(out.str().find("language matches: 10*") != std::string::npos);

    SECTION("a corrupted adder is rejected") {
        Dfa bad = fib.add;
        bad.next(1, 0b001) = 3;
        write_file(bad, "cli_ns_add.txt");
        std::ostringstream out2;
        Session s2(quiet_opts(out2));
        CHECK_THROWS_AS(s2.command("load-numsys cli_ns.ns"), VerificationError);
    }
    std::remove("cli_ns_add.txt");
    std::remove("cli_ns_less.txt");
    std::remove("cli_ns_canon.txt");
    std::remove("cli_ns.ns");
}

TEST_CASE("the binary reports exit codes by failure class") {
    std::string cli = FIBRA_CLI_PATH;
    auto run = [&](const std::string& script) {
        {
            std::ofstream f("cli_batch.fib");
            f << script;
        }
        int rc = std::system((cli + " --quiet --batch cli_batch.fib > cli_batch.out 2>&1").c_str());
        std::remove("cli_batch.fib");
        return WEXITSTATUS(rc);
    };
    CHECK(run("eval t \"x = x\"\n") == 0);
    CHECK(run("eval t \"x $ y\"\n") == 1);
    CHECK(run("run no_such_file.fib\n") == 3);
    {
        std::ofstream f("cli_batch.fib");
        f << "eval sq \"n > 0 & Ei At t < n => F[i + t] = F[i + t + n]\"\n";
    }
    int rc = std::system((cli + " --quiet --max-states 10 --batch cli_batch.fib > cli_batch.out 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    std::remove("cli_batch.fib");
    std::remove("cli_batch.out");
}
