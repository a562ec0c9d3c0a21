#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "fibra/automaton.hpp"

namespace fibra {

// Resource limits shared by all state-set constructions. Exceeding a limit
// raises ResourceError, which callers must treat as "out of resources",
// never as a logical answer.
struct Budget {
    int64_t state_cap = 2'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;

    void check(size_t states) const {
        if (static_cast<int64_t>(states) > state_cap)
            throw ResourceError("state cap of " + std::to_string(state_cap) + " states exceeded");
        if (deadline && std::chrono::steady_clock::now() > *deadline)
            throw ResourceError("timeout exceeded");
    }
};

enum class BoolOp { And, Or, Implies, Iff, Xor };

inline bool apply_op(BoolOp op, bool a, bool b) {
    switch (op) {
        case BoolOp::And: return a && b;
        case BoolOp::Or: return a || b;
        case BoolOp::Implies: return !a || b;
        case BoolOp::Iff: return a == b;
        case BoolOp::Xor: return a != b;
    }
    return false;
}

namespace detail {

// BFS renumbering plus the state-count convention: the minimal automaton for
// the empty language is materialized as two states (initial plus sink) so
// that reported counts line up with automata whose dead state is explicit.
inline Dfa canonical_renumber(std::vector<std::string> tracks, int32_t initial,
                              const std::vector<uint8_t>& acc, const std::vector<int32_t>& delta) {
    int n = static_cast<int>(acc.size());
    int nc = 1 << static_cast<int>(tracks.size());
    bool any_acc = false;
    for (uint8_t a : acc) any_acc |= a != 0;
    if (!any_acc) {
        Dfa e;
        e.tracks = std::move(tracks);
        e.initial = 0;
        e.accepting = {0, 0};
        e.delta.assign(static_cast<size_t>(2) * e.ncols(), 1);
        return e;
    }
    std::vector<int32_t> id(n, -1), order;
    order.reserve(n);
    id[initial] = 0;
    order.push_back(initial);
    for (size_t q = 0; q < order.size(); ++q)
        for (int c = 0; c < nc; ++c) {
            int32_t t = delta[static_cast<size_t>(order[q]) * nc + c];
            if (id[t] < 0) { id[t] = static_cast<int32_t>(order.size()); order.push_back(t); }
        }
    Dfa r;
    r.tracks = std::move(tracks);
    r.initial = 0;
    int m = static_cast<int>(order.size());
    r.accepting.resize(m);
    r.delta.resize(static_cast<size_t>(m) * nc);
    for (int s = 0; s < m; ++s) {
        r.accepting[s] = acc[order[s]];
        for (int c = 0; c < nc; ++c) r.delta[static_cast<size_t>(s) * nc + c] = id[delta[static_cast<size_t>(order[s]) * nc + c]];
    }
    return r;
}

} // namespace detail

// Hopcroft minimization. The result is in canonical form: unreachable states
// dropped, equivalent states merged, states numbered by BFS over columns in
// increasing order. See canonical_renumber for the empty-language convention.
inline Dfa minimize(const Dfa& a) {
    int nc = a.ncols();
    // reachable restriction
    std::vector<int32_t> id(a.num_states(), -1), order;
    order.reserve(a.num_states());
    id[a.initial] = 0;
    order.push_back(a.initial);
    for (size_t q = 0; q < order.size(); ++q)
        for (int c = 0; c < nc; ++c) {
            int32_t t = a.next(order[q], c);
            if (id[t] < 0) { id[t] = static_cast<int32_t>(order.size()); order.push_back(t); }
        }
    int n = static_cast<int>(order.size());
    std::vector<int32_t> delta(static_cast<size_t>(n) * nc);
    std::vector<uint8_t> acc(n);
    for (int s = 0; s < n; ++s) {
        acc[s] = a.accepting[order[s]];
        for (int c = 0; c < nc; ++c) delta[static_cast<size_t>(s) * nc + c] = id[a.next(order[s], c)];
    }

    // inverse edges, one CSR per column
    std::vector<int32_t> inv_data(static_cast<size_t>(n) * nc);
    std::vector<int32_t> inv_start(static_cast<size_t>(nc) * (n + 1));
    {
        std::vector<int32_t> cnt(n);
        for (int c = 0; c < nc; ++c) {
            std::fill(cnt.begin(), cnt.end(), 0);
            for (int s = 0; s < n; ++s) cnt[delta[static_cast<size_t>(s) * nc + c]]++;
            int32_t* start = &inv_start[static_cast<size_t>(c) * (n + 1)];
            start[0] = static_cast<int32_t>(static_cast<size_t>(c) * n);
            for (int t = 0; t < n; ++t) start[t + 1] = start[t] + cnt[t];
            std::vector<int32_t> fill(start, start + n);
            for (int s = 0; s < n; ++s) inv_data[fill[delta[static_cast<size_t>(s) * nc + c]]++] = s;
        }
    }

    // partition refinement
    std::vector<int32_t> elems(n), loc(n), block_of(n), bstart, bend;
    {
        int na = 0;
        for (int s = 0; s < n; ++s) na += acc[s] ? 1 : 0;
        int ia = 0, ir = na; // accepting first
        for (int s = 0; s < n; ++s) {
            int pos = acc[s] ? ia++ : ir++;
            elems[pos] = s;
            loc[s] = pos;
        }
        if (na == 0 || na == n) {
            bstart = {0};
            bend = {n};
            std::fill(block_of.begin(), block_of.end(), 0);
        } else {
            bstart = {0, na};
            bend = {na, n};
            for (int s = 0; s < n; ++s) block_of[s] = acc[s] ? 0 : 1;
        }
    }
    std::deque<int32_t> work;
    std::vector<uint8_t> inw(bstart.size(), 1);
    for (size_t b = 0; b < bstart.size(); ++b) work.push_back(static_cast<int32_t>(b));

    std::vector<int32_t> marks(bstart.size(), 0);
    std::vector<int32_t> touched, splitter;
    touched.reserve(16);
    while (!work.empty()) {
        int32_t b = work.front();
        work.pop_front();
        inw[b] = 0;
        // the popped splitter set is fixed across all columns, even if the
        // block it came from is itself split along the way
        splitter.assign(elems.begin() + bstart[b], elems.begin() + bend[b]);
        for (int c = 0; c < nc; ++c) {
            touched.clear();
            const int32_t* start = &inv_start[static_cast<size_t>(c) * (n + 1)];
            for (int32_t t : splitter) {
                for (int32_t i = start[t]; i < start[t + 1]; ++i) {
                    int32_t s = inv_data[i];
                    int32_t yb = block_of[s];
                    if (marks[yb] == 0) touched.push_back(yb);
                    // swap s into the marked prefix of its block
                    int32_t dest = bstart[yb] + marks[yb];
                    int32_t other = elems[dest];
                    std::swap(elems[loc[s]], elems[dest]);
                    loc[other] = loc[s];
                    loc[s] = dest;
                    marks[yb]++;
                }
            }
            for (int32_t yb : touched) {
                int32_t m = marks[yb];
                marks[yb] = 0;
                int32_t sz = bend[yb] - bstart[yb];
                if (m == sz) continue;
                // new block takes the marked prefix
                int32_t nb = static_cast<int32_t>(bstart.size());
                bstart.push_back(bstart[yb]);
                bend.push_back(bstart[yb] + m);
                bstart[yb] += m;
                for (int32_t i = bstart[nb]; i < bend[nb]; ++i) block_of[elems[i]] = nb;
                marks.push_back(0);
                if (inw[yb] || bend[nb] - bstart[nb] <= bend[yb] - bstart[yb]) {
                    inw.push_back(1);
                    work.push_back(nb);
                } else {
                    inw.push_back(0);
                    inw[yb] = 1;
                    work.push_back(yb);
                }
            }
        }
    }

    int nb = static_cast<int>(bstart.size());
    std::vector<uint8_t> qacc(nb);
    std::vector<int32_t> qdelta(static_cast<size_t>(nb) * nc);
    for (int bi = 0; bi < nb; ++bi) {
        int32_t rep = elems[bstart[bi]];
        qacc[bi] = acc[rep];
        for (int c = 0; c < nc; ++c) qdelta[static_cast<size_t>(bi) * nc + c] = block_of[delta[static_cast<size_t>(rep) * nc + c]];
    }
    return detail::canonical_renumber(a.tracks, block_of[0], qacc, qdelta);
}

// Lift a relation automaton onto concrete track names, one name per original
// track position. Names may repeat (the corresponding tracks then read the
// same digits) and come in any order; result tracks are sorted and distinct.
inline Dfa instantiate(const Dfa& rel, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != rel.k())
        throw SemanticError("instantiate: expected " + std::to_string(rel.k()) + " names");
    std::vector<std::string> tracks(names);
    std::sort(tracks.begin(), tracks.end());
    tracks.erase(std::unique(tracks.begin(), tracks.end()), tracks.end());
    int k = static_cast<int>(tracks.size());
    int nc = 1 << k;
    std::vector<int> pos(names.size());
    for (size_t i = 0; i < names.size(); ++i)
        pos[i] = static_cast<int>(std::lower_bound(tracks.begin(), tracks.end(), names[i]) - tracks.begin());
    Dfa r;
    r.tracks = std::move(tracks);
    r.initial = rel.initial;
    r.accepting = rel.accepting;
    r.delta.resize(static_cast<size_t>(rel.num_states()) * nc);
    for (int c = 0; c < nc; ++c) {
        int rc = 0;
        for (int i = 0; i < rel.k(); ++i) rc = (rc << 1) | digit_of(c, pos[i], k);
        for (int s = 0; s < rel.num_states(); ++s)
            r.delta[static_cast<size_t>(s) * nc + c] = rel.next(s, rc);
    }
    return r;
}

// Boolean product over the union of the operands' tracks, aligned by name.
// The result is minimized.
inline Dfa product(const Dfa& a, const Dfa& b, BoolOp op, const Budget& budget = {}) {
    std::vector<std::string> tracks(a.tracks);
    tracks.insert(tracks.end(), b.tracks.begin(), b.tracks.end());
    std::sort(tracks.begin(), tracks.end());
    tracks.erase(std::unique(tracks.begin(), tracks.end()), tracks.end());
    int k = static_cast<int>(tracks.size());
    int nc = 1 << k;
    auto colmap = [&](const Dfa& d) {
        std::vector<int> pos(d.k());
        for (int i = 0; i < d.k(); ++i)
            pos[i] = static_cast<int>(std::lower_bound(tracks.begin(), tracks.end(), d.tracks[i]) - tracks.begin());
        std::vector<int> m(nc);
        for (int c = 0; c < nc; ++c) {
            int dc = 0;
            for (int i = 0; i < d.k(); ++i) dc = (dc << 1) | digit_of(c, pos[i], k);
            m[c] = dc;
        }
        return m;
    };
    std::vector<int> ma = colmap(a), mb = colmap(b);

    std::unordered_map<uint64_t, int32_t> ids;
    std::vector<std::pair<int32_t, int32_t>> pairs;
    auto intern = [&](int32_t sa, int32_t sb) {
        uint64_t key = (static_cast<uint64_t>(sa) << 32) | static_cast<uint32_t>(sb);
        auto [it, fresh] = ids.emplace(key, static_cast<int32_t>(pairs.size()));
        if (fresh) pairs.emplace_back(sa, sb);
        return it->second;
    };
    intern(a.initial, b.initial);
    std::vector<int32_t> delta;
    std::vector<uint8_t> acc;
    for (size_t q = 0; q < pairs.size(); ++q) {
        auto [sa, sb] = pairs[q];
        acc.push_back(apply_op(op, a.accepting[sa] != 0, b.accepting[sb] != 0) ? 1 : 0);
        for (int c = 0; c < nc; ++c) delta.push_back(intern(a.next(sa, ma[c]), b.next(sb, mb[c])));
        if ((q & 1023) == 0) budget.check(pairs.size());
    }
    budget.check(pairs.size());
    Dfa r;
    r.tracks = std::move(tracks);
    r.initial = 0;
    r.accepting = std::move(acc);
    r.delta = std::move(delta);
    return minimize(r);
}

// Complement relative to a universe automaton (same track set expected from
// callers compiling predicates; the plain overload below builds the
// Zeckendorf padding universe).
inline Dfa complement(const Dfa& a, const Dfa& universe, const Budget& budget = {}) {
    Dfa flipped = a;
    for (auto& f : flipped.accepting) f = f ? 0 : 1;
    return product(flipped, universe, BoolOp::And, budget);
}

// Universe of padded representations: every track avoids consecutive ones.
inline Dfa pad_universe(std::vector<std::string> tracks) {
    check_tracks_sorted(tracks);
    int k = static_cast<int>(tracks.size());
    int nc = 1 << k;
    // state = bitmask of tracks whose previous digit was 1, plus a sink
    int sink = 1 << k;
    Dfa u;
    u.tracks = std::move(tracks);
    u.initial = 0;
    u.accepting.assign(sink + 1, 1);
    u.accepting[sink] = 0;
    u.delta.assign(static_cast<size_t>(sink + 1) * nc, sink);
    for (int m = 0; m < sink; ++m)
        for (int c = 0; c < nc; ++c)
            u.delta[static_cast<size_t>(m) * nc + c] = (m & c) ? sink : c;
    for (int c = 0; c < nc; ++c) u.delta[static_cast<size_t>(sink) * nc + c] = sink;
    return minimize(u);
}

inline Dfa complement(const Dfa& a, const Budget& budget = {}) {
    return complement(a, pad_universe(a.tracks), budget);
}

// Erase one track; the result guesses the erased digits.
inline Nfa project(const Dfa& a, const std::string& track) {
    auto it = std::find(a.tracks.begin(), a.tracks.end(), track);
    if (it == a.tracks.end()) throw SemanticError("project: unknown track '" + track + "'");
    int drop = static_cast<int>(it - a.tracks.begin());
    int k = a.k();
    Nfa r;
    r.tracks = a.tracks;
    r.tracks.erase(r.tracks.begin() + drop);
    int nc = 1 << (k - 1);
    r.initials = {a.initial};
    r.accepting = a.accepting;
    r.delta.resize(static_cast<size_t>(a.num_states()) * nc);
    int hi_mask = ((1 << drop) - 1) << (k - drop); // bits of tracks before `drop`
    int lo_mask = (1 << (k - 1 - drop)) - 1;
    for (int s = 0; s < a.num_states(); ++s)
        for (int c = 0; c < nc; ++c) {
            int hi = (c << 1) & hi_mask;
            int lo = c & lo_mask;
            int c0 = hi | lo;
            int c1 = c0 | (1 << (k - 1 - drop));
            auto& tg = r.delta[static_cast<size_t>(s) * nc + c];
            int32_t t0 = a.next(s, c0), t1 = a.next(s, c1);
            if (t0 == t1) tg = {t0};
            else if (t0 < t1) tg = {t0, t1};
            else tg = {t1, t0};
        }
    return r;
}

// Close acceptance under leading all-zero columns in both directions:
// states reachable from an initial state via all-zero columns become
// initial (strip), and a fresh state consuming zero columns before handing
// over to the initial states allows arbitrary re-padding (prepend).
inline Nfa pad_closure(Nfa a) {
    std::vector<uint8_t> seen(a.num_states(), 0);
    std::vector<int32_t> stack(a.initials.begin(), a.initials.end());
    for (int32_t s : stack) seen[s] = 1;
    while (!stack.empty()) {
        int32_t s = stack.back();
        stack.pop_back();
        for (int32_t t : a.moves(s, 0))
            if (!seen[t]) { seen[t] = 1; stack.push_back(t); }
    }
    a.initials.clear();
    for (int32_t s = 0; s < a.num_states(); ++s)
        if (seen[s]) a.initials.push_back(s);
    int32_t fresh = a.num_states();
    a.accepting.push_back(0);
    a.delta.resize(a.delta.size() + a.ncols());
    std::vector<int32_t> zero_targets = a.initials;
    zero_targets.push_back(fresh);
    a.delta[static_cast<size_t>(fresh) * a.ncols() + 0] = std::move(zero_targets);
    a.initials.push_back(fresh);
    return a;
}

inline Nfa as_nfa(const Dfa& a) {
    Nfa r;
    r.tracks = a.tracks;
    r.initials = {a.initial};
    r.accepting = a.accepting;
    r.delta.resize(a.delta.size());
    for (size_t i = 0; i < a.delta.size(); ++i) r.delta[i] = {a.delta[i]};
    return r;
}

// Subset construction. Adds the empty subset as an explicit dead state when
// needed, so the result is total. Raw output; minimize separately.
inline Dfa determinize(const Nfa& a, const Budget& budget = {}) {
    int nc = a.ncols();
    struct VecHash {
        size_t operator()(const std::vector<int32_t>& v) const {
            size_t h = 1469598103934665603ull;
            for (int32_t x : v) { h ^= static_cast<size_t>(x) + 0x9e3779b9; h *= 1099511628211ull; }
            return h;
        }
    };
    std::unordered_map<std::vector<int32_t>, int32_t, VecHash> ids;
    std::vector<std::vector<int32_t>> subsets;
    auto intern = [&](std::vector<int32_t> v) {
        auto [it, fresh] = ids.emplace(std::move(v), static_cast<int32_t>(subsets.size()));
        if (fresh) subsets.push_back(it->first);
        return it->second;
    };
    intern(a.initials);
    std::vector<int32_t> delta;
    std::vector<uint8_t> acc;
    std::vector<int32_t> stamp(a.num_states(), -1);
    int stamp_id = 0;
    for (size_t q = 0; q < subsets.size(); ++q) {
        std::vector<int32_t> cur = subsets[q]; // copy: `subsets` may reallocate
        bool any = false;
        for (int32_t s : cur) any |= a.accepting[s] != 0;
        acc.push_back(any ? 1 : 0);
        for (int c = 0; c < nc; ++c) {
            std::vector<int32_t> nxt;
            ++stamp_id;
            for (int32_t s : cur)
                for (int32_t t : a.moves(s, c))
                    if (stamp[t] != stamp_id) { stamp[t] = stamp_id; nxt.push_back(t); }
            std::sort(nxt.begin(), nxt.end());
            delta.push_back(intern(std::move(nxt)));
        }
        if ((q & 255) == 0) budget.check(subsets.size());
    }
    budget.check(subsets.size());
    Dfa r;
    r.tracks = a.tracks;
    r.initial = 0;
    r.accepting = std::move(acc);
    r.delta = std::move(delta);
    return r;
}

inline Dfa pad_closure(const Dfa& a, const Budget& budget = {}) {
    return minimize(determinize(pad_closure(as_nfa(a)), budget));
}

// Full padding normalization for relations loaded from files: the language
// becomes { 0^i w : some 0^j w was accepted }.
inline Dfa pad_normalize(const Dfa& a, const Budget& budget = {}) {
    Nfa n = pad_closure(as_nfa(a));
    // prepend 0^*: a fresh state that consumes zero columns, then hands over
    // to every initial state
    int fresh = n.num_states();
    n.accepting.push_back(0);
    n.delta.resize(n.delta.size() + n.ncols());
    std::vector<int32_t> zero_targets = n.initials;
    zero_targets.push_back(fresh);
    std::sort(zero_targets.begin(), zero_targets.end());
    n.delta[static_cast<size_t>(fresh) * n.ncols() + 0] = zero_targets;
    n.initials.push_back(fresh);
    return minimize(determinize(n, budget));
}

inline std::vector<uint8_t> reachable_states(const Dfa& a) {
    std::vector<uint8_t> seen(a.num_states(), 0);
    std::vector<int32_t> stack = {a.initial};
    seen[a.initial] = 1;
    while (!stack.empty()) {
        int32_t s = stack.back();
        stack.pop_back();
        for (int c = 0; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (!seen[t]) { seen[t] = 1; stack.push_back(t); }
        }
    }
    return seen;
}

inline std::vector<uint8_t> coaccessible_states(const Dfa& a) {
    std::vector<std::vector<int32_t>> rev(a.num_states());
    for (int s = 0; s < a.num_states(); ++s)
        for (int c = 0; c < a.ncols(); ++c) rev[a.next(s, c)].push_back(s);
    std::vector<uint8_t> seen(a.num_states(), 0);
    std::vector<int32_t> stack;
    for (int s = 0; s < a.num_states(); ++s)
        if (a.accepting[s]) { seen[s] = 1; stack.push_back(s); }
    while (!stack.empty()) {
        int32_t s = stack.back();
        stack.pop_back();
        for (int32_t p : rev[s])
            if (!seen[p]) { seen[p] = 1; stack.push_back(p); }
    }
    return seen;
}

inline bool is_empty(const Dfa& a) {
    auto reach = reachable_states(a);
    for (int s = 0; s < a.num_states(); ++s)
        if (reach[s] && a.accepting[s]) return false;
    return true;
}

inline bool accepts(const Dfa& a, const TupleWord& w) { return a.accepts(w); }

// Exact language equality; tracks are aligned by name and must coincide.
inline bool equivalent(const Dfa& a, const Dfa& b, const Budget& budget = {}) {
    if (a.tracks != b.tracks) throw SemanticError("equivalent: track sets differ");
    return is_empty(product(a, b, BoolOp::Xor, budget));
}

// All accepted words of length <= max_len that do not start with the
// all-zero column (plus the empty word if accepted). One witness per tuple.
inline std::vector<TupleWord> enumerate(const Dfa& a, int max_len) {
    auto coacc = coaccessible_states(a);
    std::vector<TupleWord> out;
    TupleWord w;
    w.track_count = a.k();
    if (a.accepting[a.initial]) out.push_back(w);
    std::function<void(int32_t)> dfs = [&](int32_t s) {
        if (static_cast<int>(w.columns.size()) >= max_len) return;
        int first = w.columns.empty() ? 1 : 0; // skip leading all-zero column
        for (int c = first; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (!coacc[t]) continue;
            w.columns.push_back(c);
            if (a.accepting[t]) out.push_back(w);
            dfs(t);
            w.columns.pop_back();
        }
    };
    dfs(a.initial);
    return out;
}

// Is the set of represented tuples finite? Leading zero padding is ignored:
// we look for cycles usable by words that do not start with a zero column.
inline bool language_finite(const Dfa& a) {
    auto reach = reachable_states(a);
    auto coacc = coaccessible_states(a);
    // states reachable by a stripped word (no leading zero column)
    std::vector<uint8_t> live(a.num_states(), 0);
    std::vector<int32_t> stack;
    for (int c = 1; c < a.ncols(); ++c) {
        int32_t t = a.next(a.initial, c);
        if (!live[t]) { live[t] = 1; stack.push_back(t); }
    }
    while (!stack.empty()) {
        int32_t s = stack.back();
        stack.pop_back();
        for (int c = 0; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (!live[t]) { live[t] = 1; stack.push_back(t); }
        }
    }
    // cycle search among useful live states
    std::vector<int> color(a.num_states(), 0);
    std::function<bool(int32_t)> has_cycle = [&](int32_t s) -> bool {
        color[s] = 1;
        for (int c = 0; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (!live[t] || !coacc[t] || !reach[t]) continue;
            if (color[t] == 1) return true;
            if (color[t] == 0 && has_cycle(t)) return true;
        }
        color[s] = 2;
        return false;
    };
    for (int s = 0; s < a.num_states(); ++s)
        if (live[s] && coacc[s] && reach[s] && color[s] == 0 && has_cycle(s)) return false;
    return true;
}

// Stripped witnesses of a finite language, one per tuple, sorted by length
// then columns. Throws if the language is infinite.
inline std::vector<TupleWord> list_language(const Dfa& a) {
    if (!language_finite(a)) throw SemanticError("list_language: language is infinite");
    auto out = enumerate(a, std::max(1, a.num_states()));
    std::sort(out.begin(), out.end(), [](const TupleWord& x, const TupleWord& y) {
        if (x.columns.size() != y.columns.size()) return x.columns.size() < y.columns.size();
        return x.columns < y.columns;
    });
    return out;
}

} // namespace fibra
