#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibra/automaton.hpp"
#include "fibra/ops.hpp"

namespace fibra {

// Fibonacci numbers with F(0) = 0, F(1) = 1. Representations use F(2) as the
// least significant position.
inline uint64_t fibonacci(int i) {
    uint64_t a = 0, b = 1;
    for (int j = 0; j < i; ++j) {
        uint64_t c = a + b;
        a = b;
        b = c;
    }
    return a;
}

// Lucas numbers, L(n) = F(n-1) + F(n+1) with F(-1) = 1.
inline uint64_t lucas(int i) {
    return (i == 0 ? 1 : fibonacci(i - 1)) + fibonacci(i + 1);
}

// Canonical (Zeckendorf) digit string of n, most significant digit first.
// Greedy: take the largest Fibonacci number that still fits. The result has
// no leading zero and no two consecutive ones; 0 encodes as the empty string.
inline DigitString to_zeckendorf(uint64_t n) {
    DigitString d;
    if (n == 0) return d;
    int i = 2;
    while (fibonacci(i + 1) <= n) ++i;
    for (; i >= 2; --i) {
        uint64_t f = fibonacci(i);
        if (f <= n) { d.push_back(1); n -= f; }
        else d.push_back(0);
    }
    return d;
}

// Value of an arbitrary digit string (leading zeros and consecutive ones
// allowed): digit i of an n-digit string weighs F(n+1-i).
inline uint64_t from_digits(const DigitString& w) {
    uint64_t v = 0;
    int n = static_cast<int>(w.size());
    for (int i = 0; i < n; ++i)
        if (w[i]) v += fibonacci(n + 1 - i);
    return v;
}

// Membership in the canonical language eps + 1(0+01)*.
inline bool is_canonical(const DigitString& w) {
    if (w.empty()) return true;
    if (w[0] != 1) return false;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 1) return false;
        if (i + 1 < w.size() && w[i] == 1 && w[i + 1] == 1) return false;
    }
    return true;
}

// Lockstep encoding of a tuple: each value canonical, left-padded with zeros
// to the longest track. The all-zero tuple encodes as the empty word.
inline TupleWord encode_tuple(const std::vector<uint64_t>& values) {
    if (values.empty()) throw SemanticError("encode_tuple: empty tuple");
    std::vector<DigitString> reps;
    size_t len = 0;
    for (uint64_t v : values) {
        reps.push_back(to_zeckendorf(v));
        len = std::max(len, reps.back().size());
    }
    TupleWord w;
    w.track_count = static_cast<int>(values.size());
    w.columns.assign(len, 0);
    for (size_t t = 0; t < reps.size(); ++t) {
        size_t pad = len - reps[t].size();
        for (size_t i = 0; i < reps[t].size(); ++i)
            if (reps[t][i]) w.columns[pad + i] |= 1u << (values.size() - 1 - t);
    }
    return w;
}

inline std::vector<uint64_t> decode_tuple(const TupleWord& w) {
    std::vector<uint64_t> values;
    for (int t = 0; t < w.track_count; ++t) values.push_back(from_digits(w.track(t)));
    return values;
}

// The 17-state Fibonacci addition automaton. States 0..16 with 0 the dead
// state, initial state 1, accepting {1, 7, 11}; input columns [x, y, z]
// ordered as binary xyz. Accepts [0,0,0]* (x,y,z)_F iff x + y = z, and
// works on non-canonical expansions as well; the test suite re-derives the
// whole transition table from brute-force addition.
inline Dfa adder_dfa() {
    static const int8_t table[17][8] = {
        {0, 0, 0, 0, 0, 0, 0, 0},
        {1, 2, 3, 1, 3, 1, 0, 3},
        {4, 5, 6, 4, 6, 4, 7, 6},
        {0, 8, 0, 0, 0, 0, 0, 0},
        {5, 0, 4, 5, 4, 5, 6, 4},
        {0, 0, 0, 0, 0, 0, 9, 0},
        {2, 10, 1, 2, 1, 2, 3, 1},
        {8, 11, 0, 8, 0, 8, 0, 0},
        {3, 1, 0, 3, 0, 3, 0, 0},
        {0, 0, 5, 0, 5, 0, 4, 5},
        {0, 0, 9, 0, 9, 0, 12, 9},
        {6, 4, 7, 6, 7, 6, 13, 7},
        {10, 14, 2, 10, 2, 10, 1, 2},
        {0, 15, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 16, 0},
        {0, 3, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 5, 0},
    };
    Dfa a;
    a.tracks = {"x", "y", "z"};
    a.initial = 1;
    a.accepting.assign(17, 0);
    a.accepting[1] = a.accepting[7] = a.accepting[11] = 1;
    a.delta.resize(17 * 8);
    for (int s = 0; s < 17; ++s)
        for (int c = 0; c < 8; ++c) a.delta[static_cast<size_t>(s) * 8 + c] = table[s][c];
    return a;
}

// Universe of zero-padded canonical representations over k tracks.
inline Dfa canonical_dfa(int k) {
    if (k < 1) throw SemanticError("canonical_dfa: need at least one track");
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back("x" + std::to_string(i));
    return pad_universe(std::move(names));
}

namespace detail {

// Radix comparison of equal-length padded canonical representations agrees
// with the numeric order, so a three-state scan decides it.
inline Dfa radix_compare(bool accept_lt, bool accept_eq, bool accept_gt) {
    Dfa a;
    a.tracks = {"x", "y"};
    a.initial = 0; // 0 = equal so far, 1 = x < y, 2 = x > y
    a.accepting = {accept_eq ? uint8_t(1) : uint8_t(0), accept_lt ? uint8_t(1) : uint8_t(0),
                   accept_gt ? uint8_t(1) : uint8_t(0)};
    a.delta = {
        0, 1, 2, 0, // from eq on [0,0] [0,1] [1,0] [1,1]
        1, 1, 1, 1,
        2, 2, 2, 2,
    };
    return a;
}

inline Dfa order_dfa(bool lt, bool eq, bool gt) {
    return product(radix_compare(lt, eq, gt), pad_universe({"x", "y"}), BoolOp::And);
}

} // namespace detail

inline Dfa less_than_dfa() { return detail::order_dfa(true, false, false); }
inline Dfa leq_dfa() { return detail::order_dfa(true, true, false); }
inline Dfa eq_dfa() { return detail::order_dfa(false, true, false); }
inline Dfa neq_dfa() { return detail::order_dfa(true, false, true); }
inline Dfa gt_dfa() { return detail::order_dfa(false, false, true); }
inline Dfa geq_dfa() { return detail::order_dfa(false, true, true); }

} // namespace fibra
