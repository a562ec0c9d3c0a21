#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fibra/compiler.hpp"
#include "fibra/numeration.hpp"
#include "fibra/ops.hpp"
#include "fibra/words.hpp"

namespace fibra {

// A function n -> g(n) whose graph of padded pairs (n, g(n)) is regular.
struct SyncRelation {
    Dfa dfa; // 2 tracks, first the argument, second the value
};

// ------------------------------------------------------------- learning --

// Infer the automaton of the graph { (n, oracle(n)) } from samples: classes
// of prefixes are separated by bounded-depth residual signatures computed
// against the sample oracle, which bakes in closure under leading zeros.
// The hypothesis must survive `growth_checks` doublings of the sample bound
// unchanged; the oracle must be total on [0, sample_bound << growth_checks).
inline Dfa learn_from_samples(const std::function<uint64_t(uint64_t)>& oracle, uint64_t sample_bound,
                              int growth_checks = 2) {
    auto hypothesis = [&](uint64_t bound) {
        int max_query = 2;
        while (fibonacci(max_query + 3) <= bound) ++max_query;
        const int depth = 6;
        int explore = max_query - depth - 1;
        if (explore < 3) throw VerificationError("learn_from_samples: sample bound too small");

        // membership of an arbitrary padded pair
        auto member = [&](const std::vector<uint32_t>& w) {
            uint64_t n = 0, y = 0;
            uint8_t last = 0;
            for (uint32_t c : w) {
                if (last & c) return false; // consecutive ones on some track
                last = static_cast<uint8_t>(c);
            }
            int len = static_cast<int>(w.size());
            for (int i = 0; i < len; ++i) {
                uint64_t f = fibonacci(len + 1 - i);
                if (w[i] & 2) n += f;
                if (w[i] & 1) y += f;
            }
            return oracle(n) == y;
        };

        // suffixes of length <= depth, as flat words
        std::vector<std::vector<uint32_t>> suffixes;
        suffixes.push_back({});
        for (size_t q = 0; q < suffixes.size(); ++q) {
            if (static_cast<int>(suffixes[q].size()) == depth) continue;
            for (uint32_t c = 0; c < 4; ++c) {
                auto s = suffixes[q];
                s.push_back(c);
                suffixes.push_back(std::move(s));
            }
        }

        auto signature = [&](const std::vector<uint32_t>& u) {
            std::string sig(suffixes.size(), '0');
            std::vector<uint32_t> w = u;
            for (size_t i = 0; i < suffixes.size(); ++i) {
                w.resize(u.size());
                w.insert(w.end(), suffixes[i].begin(), suffixes[i].end());
                if (member(w)) sig[i] = '1';
            }
            return sig;
        };

        std::unordered_map<std::string, int32_t> classes;
        std::vector<std::vector<uint32_t>> reps;
        auto intern = [&](const std::vector<uint32_t>& u) {
            auto [it, fresh] = classes.emplace(signature(u), static_cast<int32_t>(reps.size()));
            if (fresh) reps.push_back(u);
            return it->second;
        };
        intern({});
        std::vector<int32_t> delta;
        std::vector<uint8_t> accepting;
        for (size_t q = 0; q < reps.size(); ++q) {
            std::vector<uint32_t> u = reps[q];
            if (static_cast<int>(u.size()) + 1 + depth > max_query)
                throw VerificationError("learn_from_samples: hypothesis did not close within the sample bound");
            accepting.push_back(member(u) ? 1 : 0);
            for (uint32_t c = 0; c < 4; ++c) {
                u.push_back(c);
                delta.push_back(intern(u));
                u.pop_back();
            }
        }
        Dfa h;
        h.tracks = {"x", "y"};
        h.initial = 0;
        h.accepting = std::move(accepting);
        h.delta = std::move(delta);
        return minimize(h);
    };

    Dfa h = hypothesis(sample_bound);
    uint64_t bound = sample_bound;
    for (int i = 0; i < growth_checks; ++i) {
        bound *= 2;
        Dfa h2 = hypothesis(bound);
        if (!equivalent(h, h2))
            throw VerificationError("learn_from_samples: hypothesis changed when samples doubled");
    }
    return h;
}

// ------------------------------------------------------------------- zc --

// Number of zeros in the length-n prefix of the Fibonacci word.
inline std::vector<uint64_t> zero_count_table(uint64_t limit) {
    Dfao f = fibonacci_dfao();
    std::vector<uint64_t> acc(limit + 1, 0);
    for (uint64_t n = 0; n < limit; ++n) acc[n + 1] = acc[n] + (word_at(f, n) == 0 ? 1 : 0);
    return acc;
}

// The four correctness predicates for a candidate zc: total, single valued,
// and stepping by one exactly when position x holds a zero.
inline bool verify_zc(const SyncRelation& candidate, const CompileOptions& opts = {}) {
    CompileEnv env;
    env.dfaos["F"] = fibonacci_dfao();
    env.relations["zc"] = candidate.dfa;
    static const char* checks[] = {
        "Ax Ey zc(x, y)",
        "Ax Ay Az (zc(x, y) & zc(x, z)) => y = z",
        "Ax Ay (zc(x, y) & F[x] = 0) => zc(x + 1, y + 1)",
        "Ax Ay (zc(x, y) & F[x] = 1) => zc(x + 1, y)",
    };
    for (const char* c : checks)
        if (!decide(c, env, opts)) return false;
    return true;
}

// The synchronized automaton for n -> |f[0..n-1]|_0, guessed from samples
// and then proved correct through the compiler.
inline SyncRelation zc_automaton(uint64_t sample_bound = 1500, int growth_checks = 2) {
    auto table = zero_count_table(sample_bound << growth_checks);
    SyncRelation zc{learn_from_samples([&](uint64_t n) { return table[n]; }, sample_bound, growth_checks)};
    if (!verify_zc(zc)) throw VerificationError("zc candidate failed verification");
    return zc;
}

// ------------------------------------------------------------------ fab --

// fab(n, i, j) = |f[i..i+n-1]|_0 - |f[j..j+n-1]|_0, as a 30-state DFAO over
// input columns [n, i, j]. The table uses 1-based state numbers with
// initial state 1; verify_fab proves it correct by induction and the tests
// cross-check it against direct window counting.
inline Dfao fab_table_dfao() {
    static const int8_t table[30][9] = {
        // [000],[001],[010],[011],[100],[101],[110],[111], output
        {1, 2, 3, 4, 4, 5, 6, 7, 0},
        {8, 1, 9, 3, 3, 4, 10, 6, 0},
        {11, 12, 1, 2, 2, 13, 4, 5, 0},
        {14, 11, 8, 1, 1, 2, 3, 4, 0},
        {15, 11, 16, 1, 1, 2, 3, 4, 1},
        {17, 18, 8, 1, 1, 2, 3, 4, -1},
        {19, 18, 16, 1, 1, 2, 3, 4, 0},
        {1, 2, 3, 4, 4, 20, 6, 21, 0},
        {11, 12, 1, 2, 2, 22, 4, 20, 0},
        {18, 23, 1, 2, 2, 13, 4, 5, -1},
        {1, 2, 3, 4, 4, 5, 24, 25, 0},
        {8, 1, 9, 3, 3, 4, 26, 24, 0},
        {16, 1, 27, 3, 3, 4, 10, 6, 1},
        {1, 2, 3, 4, 4, 20, 24, 28, 0},
        {2, 13, 4, 5, 5, 20, 25, 28, -1},
        {2, 13, 4, 5, 5, 20, 7, 21, -1},
        {3, 4, 10, 6, 6, 21, 24, 28, 1},
        {3, 4, 10, 6, 6, 7, 24, 25, 1},
        {4, 5, 6, 7, 7, 21, 25, 28, 0},
        {15, 14, 16, 8, 8, 1, 9, 3, 1},
        {19, 17, 16, 8, 8, 1, 9, 3, 0},
        {16, 8, 27, 9, 9, 3, 29, 10, 1},
        {9, 3, 29, 10, 10, 6, 26, 24, 1},
        {17, 18, 14, 11, 11, 12, 1, 2, -1},
        {19, 18, 15, 11, 11, 12, 1, 2, 0},
        {18, 23, 11, 12, 12, 30, 2, 13, -1},
        {12, 30, 2, 13, 13, 22, 5, 20, -1},
        {19, 17, 15, 14, 14, 11, 8, 1, 0},
        {18, 23, 1, 2, 2, 22, 4, 20, -1},
        {16, 1, 27, 3, 3, 4, 26, 24, 1},
    };
    Dfao a;
    a.tracks = {"i", "j", "n"}; // placeholder names; indices bind positionally
    a.initial = 0;
    a.outputs.resize(30);
    a.delta.resize(30 * 8);
    for (int s = 0; s < 30; ++s) {
        a.outputs[s] = table[s][8];
        for (int c = 0; c < 8; ++c) a.delta[static_cast<size_t>(s) * 8 + c] = table[s][c] - 1;
    }
    return a;
}

// Base case plus the three induction steps over the last position of the two
// windows. All four must hold universally.
inline bool verify_fab(const Dfao& fab, const CompileOptions& opts = {}) {
    CompileEnv env;
    env.dfaos["F"] = fibonacci_dfao();
    env.dfaos["fab"] = fab;
    static const char* checks[] = {
        "Ai Aj fab[0][i][j] = 0",
        "Ai Aj An F[i + n] = F[j + n] => fab[n][i][j] = fab[n + 1][i][j]",
        "Ai Aj An (F[i + n] = 0 & F[j + n] = 1) => "
        "((fab[n][i][j] = -1 & fab[n + 1][i][j] = 0) | (fab[n][i][j] = 0 & fab[n + 1][i][j] = 1))",
        "Ai Aj An (F[i + n] = 1 & F[j + n] = 0) => "
        "((fab[n][i][j] = 1 & fab[n + 1][i][j] = 0) | (fab[n][i][j] = 0 & fab[n + 1][i][j] = -1))",
    };
    for (const char* c : checks)
        if (!decide(c, env, opts)) return false;
    return true;
}

inline const Dfao& fab_dfao() {
    static const Dfao verified = [] {
        Dfao fab = fab_table_dfao();
        if (!verify_fab(fab)) throw VerificationError("fab table failed verification");
        return fab;
    }();
    return verified;
}

// Direct evaluation of fab on concrete arguments.
inline int fab_value(const Dfao& fab, uint64_t n, uint64_t i, uint64_t j) {
    return fab.value(encode_tuple({n, i, j}));
}

// Orders n admitting an abelian square: compiled from E i, fab(n,i,i+n) = 0.
inline Dfa abelian_square_orders(const CompileOptions& opts = {}) {
    CompileEnv env;
    env.dfaos["F"] = fibonacci_dfao();
    env.dfaos["fab"] = fab_dfao();
    return compile("Ei fab[n][i][i + n] = 0", env, opts).dfa;
}

} // namespace fibra
