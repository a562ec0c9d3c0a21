#include <catch2/catch.hpp>

#include "fibra/compiler.hpp"
#include "fibra/serialize.hpp"
#include "fibra/words.hpp"
#include "support/oracles.hpp"
#include "support/patterns.hpp"

using namespace fibra;

namespace {

CompileEnv& test_env() {
    static CompileEnv env = [] {
        CompileEnv e;
        e.dfaos["F"] = fibonacci_dfao();
        e.dfaos["R"] = rote_dfao();
        e.dfaos["V"] = tmf_dfao();
        return e;
    }();
    return env;
}

std::vector<int> state_counts(const std::string& pred) {
    CompileResult r = compile(pred, test_env());
    std::vector<int> out;
    for (const auto& s : r.log.steps) out.push_back(s.states);
    return out;
}

} // namespace

TEST_CASE("pinned state counts for the repetition battery") {
    // ultimate periodicity
    CHECK(state_counts("En p >= 1 & Ai i >= n => F[i] = F[i + p]") ==
          std::vector<int>({4, 7, 12, 51, 3, 2, 2}));
    // square orders
    CHECK(state_counts("n > 0 & Ei At t < n => F[i + t] = F[i + t + n]") ==
          std::vector<int>({4, 7, 62, 92, 7, 3, 3}));
    // cube orders
    CHECK(state_counts("n > 0 & Ei At t < 2 * n => F[i + t] = F[i + t + n]") ==
          std::vector<int>({4, 16, 62, 198, 7, 5, 5}));
    // fourth powers
    CHECK(state_counts("n > 0 & Ei At t < 3 * n => F[i + t] = F[i + t + n]") ==
          std::vector<int>({4, 30, 62, 352, 3, 2, 2}));
    // mirror invariance
    CHECK(state_counts("Ai Ej At t < n => F[i + t] = F[j + n - 1 - t]") ==
          std::vector<int>({7, 264, 185, 35, 5, 3}));
    // unbordered factors
    CHECK(state_counts("Ei Aj (j >= 1 & 2 * j <= n) => (Et t < j & F[i + t] != F[i + n - j + t])") ==
          std::vector<int>({4, 16, 21, 7, 321, 411, 85, 137, 7, 3}));
}

TEST_CASE("pinned state counts for the finite-word battery") {
    // prefix concatenation with the last two letters swapped
    CHECK(state_counts("i > j & j >= 2 & (At j <= t & t < i => F[t] = F[t - j]) & "
                       "(As s <= j - 3 => F[s] = F[s + i - j]) & F[j - 2] = F[i - 1] & F[j - 1] = F[i - 2]") ==
          std::vector<int>({7, 5, 12, 7, 7, 19, 16, 62, 14, 12, 14, 60, 119, 17, 6, 20, 5, 20, 5}));
}

TEST_CASE("deeply alternating quantifiers decide") {
    CompileEnv& env = test_env();
    // every window of the right size holds every length-n factor exactly once
    CHECK(decide("An n >= 1 => (Em Es Ai Ej (m <= j & j <= m + s) & (At t < n => F[i + t] = F[j + t]) & "
                 "(Ak (m <= k & k <= m + s & ~(k = j)) => (Eu u < n & F[i + u] != F[k + u])))",
                 env));
    // the unique right-special factor of each length is the reversed prefix
    CHECK(decide("An Ai ((Ej Ek (At t < n => F[j + t] = F[i + t]) & (Au u < n => F[k + u] = F[i + u]) & "
                 "F[j + n] != F[k + n])) => (As s < n => F[i + s] = F[n - 1 - s])",
                 env));
}

TEST_CASE("term automata relate values") {
    CompileEnv& env = test_env();
    SECTION("sums go through the adder") {
        Dfa d = compile("i + n = r", env).dfa;
        for (uint64_t i = 0; i < 30; ++i)
            for (uint64_t n = 0; n < 30; ++n)
                for (uint64_t r = 0; r < 60; ++r)
                    REQUIRE(d.accepts(encode_tuple({i, n, r})) == (i + n == r));
    }
    SECTION("constants fix a track") {
        Dfa d = compile("r = 0", env).dfa;
        for (uint64_t r = 0; r < 50; ++r) REQUIRE(d.accepts(encode_tuple({r})) == (r == 0));
    }
    SECTION("constant multiples unfold into repeated addition") {
        Dfa d = compile("r = 3 * n", env).dfa;
        for (uint64_t n = 0; n < 200; ++n)
            REQUIRE(d.accepts(encode_tuple({n, 3 * n})));
        for (uint64_t n = 0; n < 60; ++n)
            for (uint64_t r = 0; r < 60; ++r)
                REQUIRE(d.accepts(encode_tuple({n, r})) == (r == 3 * n));
        CHECK(d.accepts(encode_tuple({4, 12})));
    }
    SECTION("natural subtraction rejects underflow inside the atom") {
        Dfa d = compile("n - 3 = r", env).dfa;
        for (uint64_t n = 0; n < 40; ++n)
            for (uint64_t r = 0; r < 40; ++r)
                REQUIRE(d.accepts(encode_tuple({n, r})) == (n >= 3 && n - 3 == r));
    }
}

TEST_CASE("letter atoms index words") {
    CompileEnv& env = test_env();
    CHECK(compile("F[i] = F[i + p]", env).dfa.num_states() == 12);
    CHECK(decide("F[0] = 0", env));
    CHECK(decide("R[2] = 1", env));
    CHECK_FALSE(decide("F[0] = 1", env));
    SECTION("ordering on output letters") {
        Dfa d = compile("F[i] < F[j]", env).dfa;
        Dfao f = fibonacci_dfao();
        for (uint64_t i = 0; i < 40; ++i)
            for (uint64_t j = 0; j < 40; ++j)
                REQUIRE(d.accepts(encode_tuple({i, j})) == (word_at(f, i) < word_at(f, j)));
    }
    SECTION("words can be mixed") {
        Dfa d = compile("F[n] = V[n]", env).dfa;
        Dfao f = fibonacci_dfao(), v = tmf_dfao();
        for (uint64_t n = 0; n < 200; ++n)
            REQUIRE(d.accepts(encode_tuple({n})) == (word_at(f, n) == word_at(v, n)));
    }
    SECTION("unknown names and arity mismatches") {
        CHECK_THROWS_AS(compile("W[i] = 0", env), SemanticError);
        CHECK_THROWS_AS(compile("F[i][j] = 0", env), SemanticError);
        CHECK_THROWS_AS(compile("frob(i, j)", env), SemanticError);
    }
}

TEST_CASE("compiled automata match brute-force semantics") {
    CompileEnv& env = test_env();
    oracles::BruteEnv brute;
    brute.bound = 150;
    brute.words["F"] = [] {
        std::vector<int> v;
        for (char c : oracles::fib_word(800)) v.push_back(c - '0');
        return v;
    }();
    brute.words["V"] = [] {
        std::vector<int> v;
        for (uint64_t n = 0; n < 800; ++n) v.push_back(oracles::tmf_letter(n));
        return v;
    }();
    const char* formulas[] = {
        "F[i] = F[i + p]",
        "Ei i + i = n",
        "At t < n => F[t] = F[t + p]",
        "Ei At t < n => F[i + t] = F[i + t + n]",
        "F[n - 1] = 0",
        "V[i] != V[p]",
        "n > 0 & (Ei F[i + n] = 1 & F[i] = 0)",
        "Ai i < n => F[i] = F[n - 1 - i]",
    };
    for (const char* text : formulas) {
        INFO(text);
        FormulaPtr f = parse_formula(text);
        CompileResult r = compile(f, env);
        auto vars = free_variables(*f);
        REQUIRE(r.dfa.tracks == vars);
        std::map<std::string, uint64_t> assignment;
        std::function<void(size_t)> sweep = [&](size_t vi) {
            if (vi == vars.size()) {
                std::vector<uint64_t> values;
                for (const auto& v : vars) values.push_back(assignment[v]);
                bool expect = oracles::brute_eval(*f, brute, assignment);
                bool got = values.empty() ? r.dfa.accepting[r.dfa.initial] != 0 : r.dfa.accepts(encode_tuple(values));
                REQUIRE(got == expect);
                return;
            }
            for (uint64_t v = 0; v < 45; ++v) {
                assignment[vars[vi]] = v;
                sweep(vi + 1);
            }
            assignment.erase(vars[vi]);
        };
        sweep(0);
    }
}

TEST_CASE("membership in compiled theorem automata") {
    CompileEnv& env = test_env();
    Dfa sq = compile("n > 0 & Ei At t < n => F[i + t] = F[i + t + n]", env).dfa;
    TupleWord w;
    w.track_count = 1;
    w.columns = {1, 0, 0};
    CHECK(sq.accepts(w)); // 100
    w.columns = {1, 0, 1};
    CHECK_FALSE(sq.accepts(w)); // 101
    Dfa anti = compile("n > 0 & Ei Ak k < n => F[i + k] != F[i + k + n]", env).dfa;
    std::vector<uint64_t> orders;
    for (const TupleWord& word : enumerate(anti, 4)) orders.push_back(from_digits(word.track(0)));
    CHECK(orders == std::vector<uint64_t>({1, 2, 4}));
}

TEST_CASE("universal quantification is the dual of existential") {
    CompileEnv& env = test_env();
    Dfa forall = compile("At t < n => F[t] = F[t + p]", env).dfa;
    Dfa dual = compile("~Et ~(t < n => F[t] = F[t + p])", env).dfa;
    CHECK(equivalent(forall, dual));
}

TEST_CASE("decide") {
    CompileEnv& env = test_env();
    CHECK(decide("Ax x = x", env));
    CHECK_FALSE(decide("En n < 0", env));
    CHECK_FALSE(decide("En n > 0 & Ei At t < 3 * n => F[i + t] = F[i + t + n]", env));
    CHECK(decide("An Ai Ej At t < n => F[i + t] = F[j + n - 1 - t]", env));
    CHECK_THROWS_AS(decide("n > 0", env), SemanticError);
}

TEST_CASE("empty-language answers stay distinguishable from resource errors") {
    CompileEnv& env = test_env();
    CompileOptions opts;
    opts.state_cap = 10;
    CHECK_THROWS_AS(compile("n > 0 & Ei At t < n => F[i + t] = F[i + t + n]", env, opts), ResourceError);
    opts.state_cap = 2'000'000;
    opts.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_THROWS_AS(compile("n > 0 & Ei At t < n => F[i + t] = F[i + t + n]", env, opts), ResourceError);
}

TEST_CASE("compilation is deterministic") {
    CompileEnv& env = test_env();
    const char* text = "n > 0 & Ei At t < n => F[i + t] = F[i + t + n]";
    CompileResult a = compile(text, env);
    CompileResult b = compile(text, env);
    CHECK(serialize(a.dfa) == serialize(b.dfa));
    REQUIRE(a.log.steps.size() == b.log.steps.size());
    for (size_t i = 0; i < a.log.steps.size(); ++i) {
        CHECK(a.log.steps[i].text == b.log.steps[i].text);
        CHECK(a.log.steps[i].states == b.log.steps[i].states);
    }
    CHECK(a.log.peak_states == b.log.peak_states);
}

TEST_CASE("log format") {
    CompileEnv& env = test_env();
    CompileResult r = compile("p >= 1", env);
    REQUIRE(r.log.steps.size() == 1);
    std::string line = format_step(r.log.steps[0], 0);
    CHECK(line.rfind("p >= 1 with 4 states, in ", 0) == 0);
    CHECK(line.find("ms") != std::string::npos);
    std::string full = format_log(r.log);
    CHECK(full.find("overall time: ") != std::string::npos);
}

TEST_CASE("numeration self-checks pass for the built-in system") {
    auto checks = numeration_checks(fib_bundle());
    REQUIRE(checks.size() == 5);
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.predicate);
        CHECK(c.ok);
    }
}

TEST_CASE("numeration self-checks catch a corrupted adder") {
    NumerationBundle bad = fib_bundle();
    // reroute one transition of the addition table
    bad.add.next(1, 0b001) = 3; // was state 2
    auto checks = numeration_checks(bad);
    bool any_failed = false;
    for (const auto& c : checks) any_failed |= !c.ok;
    CHECK(any_failed);

    NumerationBundle bad2 = fib_bundle();
    bad2.add.accepting[7] = 0;
    bool any2 = false;
    for (const auto& c : numeration_checks(bad2)) any2 |= !c.ok;
    CHECK(any2);
}

TEST_CASE("constants synthesized from order alone") {
    CompileEnv env;
    env.numsys = fib_bundle();
    env.numsys.encode = nullptr; // force the order-based construction
    env.dfaos["F"] = fibonacci_dfao();
    Dfa d = compile("n = 3", env).dfa;
    for (uint64_t n = 0; n < 30; ++n) REQUIRE(d.accepts(encode_tuple({n})) == (n == 3));
    CHECK(decide("F[0] = 0", env));
}

TEST_CASE("results are clamped to canonical representations") {
    CompileEnv& env = test_env();
    Dfa all = compile("n = n", env).dfa;
    CHECK(equivalent(all, pad_universe({"n"})));
    TupleWord bad;
    bad.track_count = 1;
    bad.columns = {1, 1};
    CHECK_FALSE(all.accepts(bad));
}
