#include <catch2/catch.hpp>

#include <sstream>

#include "fibra/compiler.hpp"
#include "fibra/linrep.hpp"
#include "fibra/words.hpp"
#include "support/oracles.hpp"

using namespace fibra;

namespace fixtures {

// The rank-6 reference block composes digit matrices from the least
// significant digit, so the verbatim data is transposed into the
// most-significant-first orientation evaluate() expects.
inline LinearRepresentation reversed(const LinearRepresentation& r) {
    LinearRepresentation out;
    out.rank = r.rank;
    out.u = r.v;
    out.v = r.u;
    out.m0.assign(r.rank, std::vector<long long>(r.rank));
    out.m1 = out.m0;
    for (int i = 0; i < r.rank; ++i)
        for (int j = 0; j < r.rank; ++j) {
            out.m0[i][j] = r.m0[j][i];
            out.m1[i][j] = r.m1[j][i];
        }
    return out;
}

// reference rank-6 representation of a(n) = n + 1
inline LinearRepresentation succ_rank6_printed() {
    LinearRepresentation r;
    r.rank = 6;
    r.u = {1, 2, 2, 3, 3, 2};
    r.m0 = {
        {1, 1, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
        {0, 1, 0, 1, 1, 0},
        {0, 0, 1, 1, 1, 1},
        {0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
    };
    r.m1 = {
        {0, 0, 0, 0, 0, 0},
        {1, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
        {0, 0, 1, 1, 0, 0},
        {0, 0, 0, 1, 0, 0},
    };
    r.v = {1, 0, 0, 0, 0, 0};
    return r;
}

inline LinearRepresentation succ_rank6() { return reversed(succ_rank6_printed()); }

// reference rank-10 representation of the subword complexity of f
inline LinearRepresentation complexity_rank10() {
    LinearRepresentation r;
    r.rank = 10;
    r.u = {0, 0, 0, 1, 0, 0, 0, 0, 0, 0};
    r.m0 = {
        {0, 1, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 1, 0, 0, 0, 0, 0, 0},
        {1, 0, 0, 0, 0, 1, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 0, 1, 0, 1, 0, 0},
        {0, 0, 0, 0, 0, 1, 0, 1, 0, 0},
        {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 1, 0, 0},
    };
    r.m1 = {
        {0, 0, 0, 0, 1, 0, 0, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
        {0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1, 0, 1, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    };
    r.v = {1, 0, 1, 1, 1, 1, 1, 1, 1, 1};
    return r;
}

// reference rank-12 representation of mr(n+1) - mr(n)
inline LinearRepresentation mr_diff_rank12() {
    LinearRepresentation r;
    r.rank = 12;
    r.u = {0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0};
    r.m0 = {
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
        {0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
        {0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0},
    };
    r.m1 = {
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
        {0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
    };
    r.v = {0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1};
    return r;
}

} // namespace fixtures

TEST_CASE("reference fixtures compute n + 1") {
    LinearRepresentation r6 = fixtures::succ_rank6();
    LinearRepresentation r10 = fixtures::complexity_rank10();
    for (uint64_t n = 0; n <= 200; ++n) {
        REQUIRE(evaluate(r6, n) == BigInt(static_cast<long long>(n + 1)));
        REQUIRE(evaluate(r10, n) == BigInt(static_cast<long long>(n + 1)));
    }
    // the empty digit string gives u . v
    CHECK(evaluate(r6, 0) == BigInt(1));
    CHECK(evaluate(r10, 12) == BigInt(13));
}

TEST_CASE("bounded-string equivalence") {
    LinearRepresentation r6 = fixtures::succ_rank6();
    LinearRepresentation r10 = fixtures::complexity_rank10();
    CHECK(equal_on_strings(r6, r10, 16));
    CHECK(equal_on_strings(r6, r6, 12));
    SECTION("a perturbed copy differs") {
        LinearRepresentation bad = r6;
        bad.m0[2][3] = 0; // was 1
        CHECK_FALSE(equal_on_strings(r6, bad, 16));
    }
    SECTION("short-bound enumeration agrees with the row-space route") {
        CHECK(equal_on_strings(r6, r10, 10)); // below rank sum: plain enumeration
        LinearRepresentation bad = r6;
        bad.u[1] = 3;
        CHECK_FALSE(equal_on_strings(r6, bad, 6));
    }
}

TEST_CASE("monoid closure") {
    SECTION("identity generators close immediately") {
        LinearRepresentation r;
        r.rank = 2;
        r.u = {1, 0};
        r.m0 = {{1, 0}, {0, 1}};
        r.m1 = {{1, 0}, {0, 1}};
        r.v = {1, 1};
        MonoidClosure c = monoid_closure(r);
        REQUIRE(c.closed);
        CHECK(c.size() == 1);
        auto range = value_range(r, c);
        REQUIRE(range.size() == 1);
        CHECK(*range.begin() == BigInt(1)); // u . v
    }
    SECTION("the reference difference representation has 61 elements") {
        LinearRepresentation r = fixtures::mr_diff_rank12();
        MonoidClosure c = monoid_closure(r);
        REQUIRE(c.closed);
        CHECK(c.size() == 61);
        auto range = value_range(r, c);
        std::set<BigInt> expect{BigInt(0), BigInt(1)};
        CHECK(range == expect);
    }
    SECTION("growing generators hit the cap") {
        LinearRepresentation r;
        r.rank = 1;
        r.u = {1};
        r.m0 = {{2}};
        r.m1 = {{1}};
        r.v = {1};
        MonoidClosure c = monoid_closure(r, 50);
        CHECK_FALSE(c.closed);
    }
}

TEST_CASE("extraction counts accepted assignments") {
    CompileEnv env;
    env.dfaos["F"] = fibonacci_dfao();
    SECTION("an indicator relation counts one witness per accepted value") {
        Dfa eq = compile("x = y", env).dfa;
        LinearRepresentation r = linrep_from_dfa(eq, "x");
        for (uint64_t n = 0; n < 60; ++n) REQUIRE(evaluate(r, n) == BigInt(1));
    }
    SECTION("square occurrence counts match brute force") {
        Dfa d = compile("j >= 1 & i + 2 * j <= n & (At t < j => F[i + t] = F[i + j + t])", env).dfa;
        LinearRepresentation r = linrep_from_dfa(d, "n");
        CHECK(r.rank == 27); // the trimmed DFA for this predicate has 27 states
        std::string f = oracles::fib_word(200);
        for (uint64_t n = 0; n < 60; ++n) {
            long long count = 0;
            for (uint64_t i = 0; i < n; ++i)
                for (uint64_t j = 1; i + 2 * j <= n; ++j)
                    if (f.compare(i, j, f, i + j, j) == 0) ++count;
            REQUIRE(evaluate(r, n) == BigInt(count));
        }
        SECTION("evaluation is invariant under leading zeros") {
            for (uint64_t n = 0; n < 40; ++n) {
                DigitString d0 = to_zeckendorf(n);
                DigitString padded = d0;
                padded.insert(padded.begin(), 3, 0);
                REQUIRE(evaluate_digits(r, d0) == evaluate_digits(r, padded));
            }
        }
    }
    SECTION("unknown parameter track") {
        Dfa eq = compile("x = y", env).dfa;
        CHECK_THROWS_AS(linrep_from_dfa(eq, "zz"), SemanticError);
    }
}

TEST_CASE("linear representations serialize round trip") {
    LinearRepresentation r = fixtures::succ_rank6();
    std::string text = serialize(r);
    std::istringstream in(text);
    LinearRepresentation s = parse_linrep(in);
    CHECK(s.rank == r.rank);
    CHECK(s.u == r.u);
    CHECK(s.m0 == r.m0);
    CHECK(s.m1 == r.m1);
    CHECK(s.v == r.v);
    CHECK(equal_on_strings(r, s, 12));
}
