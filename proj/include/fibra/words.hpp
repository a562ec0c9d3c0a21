#pragma once

#include <string>
#include <vector>

#include "fibra/automaton.hpp"
#include "fibra/numeration.hpp"
#include "fibra/serialize.hpp"

namespace fibra {

// A named one-track DFAO usable in predicates.
struct WordDef {
    std::string name;
    Dfao dfao;
};

// The infinite Fibonacci word: fixed point of 0 -> 01, 1 -> 0. Two visible
// states q0/0 and q1/1; reading 1 in q1 cannot happen on canonical input and
// goes to a sink kept only for totality.
inline Dfao fibonacci_dfao() {
    Dfao a;
    a.tracks = {"n"};
    a.initial = 0;
    a.outputs = {0, 1, 0};
    a.delta = {
        0, 1, // q0
        0, 2, // q1
        2, 2, // sink
    };
    a.sink = 2;
    return a;
}

// The Rote-Fibonacci word's eight-state DFAO. State order:
// a, b1, a1, b0, b, a0, a2, b2, then the totality sink. The b state reads 0
// back to the initial state; every transition is pinned against the word's
// recurrence and transducer definitions by the test suite.
inline Dfao rote_dfao() {
    Dfao a;
    a.tracks = {"n"};
    a.initial = 0;
    a.outputs = {0, 0, 1, 0, 1, 0, 1, 1, 0};
    a.delta = {
        0, 1, // a:  0 -> a,  1 -> b1
        2, 8, // b1: 0 -> a1
        5, 3, // a1: 0 -> a0, 1 -> b0
        5, 8, // b0: 0 -> a0
        0, 8, // b:  0 -> a
        6, 4, // a0: 0 -> a2, 1 -> b
        2, 7, // a2: 0 -> a1, 1 -> b2
        6, 8, // b2: 0 -> a2
        8, 8, // sink
    };
    a.sink = 8;
    return a;
}

// Fibonacci analogue of the Thue-Morse word: the digit-sum parity of the
// Zeckendorf representation.
inline Dfao tmf_dfao() {
    Dfao a;
    a.tracks = {"n"};
    a.initial = 0;
    a.outputs = {0, 1};
    a.delta = {
        0, 1,
        1, 0,
    };
    return a;
}

inline int32_t word_at(const Dfao& w, uint64_t n) {
    if (w.k() != 1) throw SemanticError("word_at: not a one-track DFAO");
    DigitString d = to_zeckendorf(n);
    int32_t s = w.initial;
    for (uint8_t b : d) s = w.next(s, b);
    return w.outputs[s];
}

inline int32_t word_at(const WordDef& w, uint64_t n) { return word_at(w.dfao, n); }

inline std::vector<int32_t> prefix(const Dfao& w, uint64_t count) {
    std::vector<int32_t> out;
    out.reserve(count);
    for (uint64_t n = 0; n < count; ++n) out.push_back(word_at(w, n));
    return out;
}

inline std::vector<int32_t> prefix(const WordDef& w, uint64_t count) { return prefix(w.dfao, count); }

// Load a one-track DFAO from a file in the standard automaton format. For
// predicate use the initial state must be stable under padding zeros.
inline WordDef load_word(const std::string& name, const std::string& path) {
    AutomatonFile f = read_file(path);
    if (!f.is_dfao()) throw SemanticError(path + ": words need output lines (a DFAO), found a plain DFA");
    const Dfao& a = f.dfao();
    if (a.k() != 1) throw SemanticError(path + ": a word automaton must have exactly one track");
    if (a.next(a.initial, 0) != a.initial)
        throw SemanticError(path + ": initial state must loop on digit 0 (leading-zero padding)");
    return WordDef{name, a};
}

} // namespace fibra
