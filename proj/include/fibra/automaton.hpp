#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "fibra/errors.hpp"

namespace fibra {

// A digit string, most significant digit first. Analogue of a binary numeral.
using DigitString = std::vector<uint8_t>;

// One column of a k-track word packs the k digits of that position into the
// low k bits of an integer: the digit of track i sits at bit (k-1-i), so the
// integer value of a column read as binary equals the tuple read left to
// right. Column 0 is always the all-zero column.
inline int digit_of(int column, int track, int k) { return (column >> (k - 1 - track)) & 1; }

// A word over columns: the lockstep encoding of a k-tuple of naturals.
struct TupleWord {
    int track_count = 1;
    std::vector<uint32_t> columns;

    size_t size() const { return columns.size(); }
    DigitString track(int i) const {
        DigitString d;
        d.reserve(columns.size());
        for (uint32_t c : columns) d.push_back(static_cast<uint8_t>(digit_of(static_cast<int>(c), i, track_count)));
        return d;
    }
    bool operator==(const TupleWord& o) const { return track_count == o.track_count && columns == o.columns; }
};

// Total deterministic automaton over named tracks. Invariants:
//  - tracks are sorted and pairwise distinct,
//  - delta has an entry for every (state, column) pair,
//  - results of minimize() are in canonical form: states numbered by BFS from
//    the initial state over columns in increasing order.
struct Dfa {
    std::vector<std::string> tracks;
    int32_t initial = 0;
    std::vector<uint8_t> accepting;
    std::vector<int32_t> delta; // state * ncols + column

    int k() const { return static_cast<int>(tracks.size()); }
    int ncols() const { return 1 << k(); }
    int num_states() const { return static_cast<int>(accepting.size()); }
    int32_t next(int s, int c) const { return delta[static_cast<size_t>(s) * ncols() + c]; }
    int32_t& next(int s, int c) { return delta[static_cast<size_t>(s) * ncols() + c]; }

    int32_t run(const TupleWord& w) const {
        assert(w.track_count == k());
        int32_t s = initial;
        for (uint32_t c : w.columns) s = next(s, static_cast<int>(c));
        return s;
    }
    bool accepts(const TupleWord& w) const { return accepting[run(w)] != 0; }
};

// Nondeterministic variant: a set of initial states and set-valued moves.
// Intermediate form produced by projection, consumed by determinize().
struct Nfa {
    std::vector<std::string> tracks;
    std::vector<int32_t> initials;              // sorted
    std::vector<uint8_t> accepting;
    std::vector<std::vector<int32_t>> delta;    // state * ncols + column, targets sorted

    int k() const { return static_cast<int>(tracks.size()); }
    int ncols() const { return 1 << k(); }
    int num_states() const { return static_cast<int>(accepting.size()); }
    const std::vector<int32_t>& moves(int s, int c) const { return delta[static_cast<size_t>(s) * ncols() + c]; }
};

// Deterministic automaton with one output letter per state instead of an
// accepting set. Outputs are small integers and may be negative. `sink`, if
// set, names a state added only for totality: a run ending there has no
// letter, and letter comparisons reject it.
struct Dfao {
    std::vector<std::string> tracks;
    int32_t initial = 0;
    std::vector<int32_t> outputs;
    std::vector<int32_t> delta;
    int32_t sink = -1;

    int k() const { return static_cast<int>(tracks.size()); }
    int ncols() const { return 1 << k(); }
    int num_states() const { return static_cast<int>(outputs.size()); }
    int32_t next(int s, int c) const { return delta[static_cast<size_t>(s) * ncols() + c]; }
    int32_t& next(int s, int c) { return delta[static_cast<size_t>(s) * ncols() + c]; }

    int32_t value(const TupleWord& w) const {
        assert(w.track_count == k());
        int32_t s = initial;
        for (uint32_t c : w.columns) s = next(s, static_cast<int>(c));
        return outputs[s];
    }
};

inline void check_tracks_sorted(const std::vector<std::string>& tracks) {
    for (size_t i = 1; i < tracks.size(); ++i)
        if (!(tracks[i - 1] < tracks[i]))
            throw SemanticError("track names must be sorted and distinct");
}

} // namespace fibra
