#pragma once

#include <deque>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "fibra/bigint.hpp"
#include "fibra/numeration.hpp"
#include "fibra/ops.hpp"

namespace fibra {

// Integer matrix data (u, M0, M1, v) computing a counting function as
// u * M_{a_1} * ... * M_{a_t} * v over the digits a_1..a_t of the parameter.
struct LinearRepresentation {
    int rank = 0;
    std::vector<long long> u;
    std::vector<std::vector<long long>> m0, m1; // row-major
    std::vector<long long> v;

    const std::vector<std::vector<long long>>& matrix(int digit) const { return digit ? m1 : m0; }
};

// Extract a linear representation counting, for each value of `param`, the
// assignments of the remaining tracks the automaton accepts. The dead and
// unreachable states are dropped first so they contribute no paths.
inline LinearRepresentation linrep_from_dfa(const Dfa& dfa, const std::string& param) {
    auto it = std::find(dfa.tracks.begin(), dfa.tracks.end(), param);
    if (it == dfa.tracks.end()) throw SemanticError("linrep_from_dfa: unknown track '" + param + "'");
    int p = static_cast<int>(it - dfa.tracks.begin());
    auto reach = reachable_states(dfa);
    auto coacc = coaccessible_states(dfa);
    std::vector<int32_t> keep, index(dfa.num_states(), -1);
    for (int s = 0; s < dfa.num_states(); ++s)
        if (reach[s] && coacc[s]) {
            index[s] = static_cast<int32_t>(keep.size());
            keep.push_back(s);
        }
    LinearRepresentation r;
    if (keep.empty()) {
        r.rank = 1;
        r.u = {1};
        r.m0 = {{0}};
        r.m1 = {{0}};
        r.v = {0};
        return r;
    }
    int d = static_cast<int>(keep.size());
    r.rank = d;
    r.u.assign(d, 0);
    r.v.assign(d, 0);
    r.u[index[dfa.initial]] = 1;
    for (int i = 0; i < d; ++i) r.v[i] = dfa.accepting[keep[i]] ? 1 : 0;
    r.m0.assign(d, std::vector<long long>(d, 0));
    r.m1.assign(d, std::vector<long long>(d, 0));
    for (int i = 0; i < d; ++i)
        for (int c = 0; c < dfa.ncols(); ++c) {
            int32_t t = index[dfa.next(keep[i], c)];
            if (t < 0) continue;
            (digit_of(c, p, dfa.k()) ? r.m1 : r.m0)[i][t] += 1;
        }
    return r;
}

namespace detail {

inline std::vector<BigInt> times_matrix(const std::vector<BigInt>& row, const std::vector<std::vector<long long>>& m) {
    int d = static_cast<int>(m.size());
    std::vector<BigInt> out(d);
    for (int i = 0; i < d; ++i) {
        if (row[i].is_zero()) continue;
        for (int j = 0; j < d; ++j)
            if (m[i][j]) out[j] += row[i] * BigInt(m[i][j]);
    }
    return out;
}

} // namespace detail

// Raw matrix product over an explicit digit string.
inline BigInt evaluate_digits(const LinearRepresentation& r, const DigitString& digits) {
    std::vector<BigInt> row(r.u.begin(), r.u.end());
    for (uint8_t d : digits) row = detail::times_matrix(row, r.matrix(d));
    BigInt out;
    for (int i = 0; i < r.rank; ++i)
        if (r.v[i]) out += row[i] * BigInt(r.v[i]);
    return out;
}

// Count at parameter n. Witnesses may need more leading digits than (n)_F,
// so the digit string is padded with zeros until the count stops growing.
// The successive differences obey M0's characteristic recurrence, so rank
// consecutive zero differences prove the limit was reached.
inline BigInt evaluate(const LinearRepresentation& r, uint64_t n) {
    DigitString digits = to_zeckendorf(n);
    std::vector<BigInt> tail(r.v.begin(), r.v.end());
    // tail = mu(digits) * v, built from the right
    for (size_t i = digits.size(); i-- > 0;) {
        const auto& m = r.matrix(digits[i]);
        std::vector<BigInt> nxt(r.rank);
        for (int k = 0; k < r.rank; ++k) {
            if (tail[k].is_zero()) continue;
            for (int j = 0; j < r.rank; ++j)
                if (m[j][k]) nxt[j] += BigInt(m[j][k]) * tail[k];
        }
        tail = std::move(nxt);
    }
    std::vector<BigInt> row(r.u.begin(), r.u.end());
    auto value = [&] {
        BigInt out;
        for (int i = 0; i < r.rank; ++i)
            if (!row[i].is_zero() && !tail[i].is_zero()) out += row[i] * tail[i];
        return out;
    };
    BigInt cur = value();
    int flat = 0;
    for (int pad = 0; flat < r.rank; ++pad) {
        if (pad > 8 * r.rank + 64)
            throw SemanticError("evaluate: count does not stabilize; the predicate has unbounded witnesses");
        row = detail::times_matrix(row, r.m0);
        BigInt next = value();
        flat = next == cur ? flat + 1 : 0;
        cur = std::move(next);
    }
    return cur;
}

// ------------------------------------------------------- monoid closure --

using BigMatrix = std::vector<std::vector<BigInt>>;

inline BigMatrix big_identity(int d) {
    BigMatrix m(d, std::vector<BigInt>(d));
    for (int i = 0; i < d; ++i) m[i][i] = BigInt(1);
    return m;
}

inline BigMatrix big_mul(const BigMatrix& a, const BigMatrix& b) {
    int d = static_cast<int>(a.size());
    BigMatrix r(d, std::vector<BigInt>(d));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < d; ++j)
                if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

inline std::string matrix_key(const BigMatrix& m) {
    std::string k;
    for (const auto& row : m)
        for (const auto& x : row) {
            k += x.to_string();
            k += ',';
        }
    return k;
}

struct MonoidClosure {
    bool closed = false;          // false: hit the cap before stabilizing
    std::vector<BigMatrix> elements;
    size_t size() const { return elements.size(); }
};

// Queue-based closure of {identity} under right multiplication by M0, M1.
inline MonoidClosure monoid_closure(const LinearRepresentation& r, size_t cap = 100000) {
    BigMatrix g0(r.rank, std::vector<BigInt>(r.rank)), g1 = g0;
    for (int i = 0; i < r.rank; ++i)
        for (int j = 0; j < r.rank; ++j) {
            g0[i][j] = BigInt(r.m0[i][j]);
            g1[i][j] = BigInt(r.m1[i][j]);
        }
    MonoidClosure out;
    std::unordered_set<std::string> seen;
    std::deque<size_t> queue;
    auto add = [&](BigMatrix m) {
        if (seen.insert(matrix_key(m)).second) {
            out.elements.push_back(std::move(m));
            queue.push_back(out.elements.size() - 1);
        }
    };
    add(big_identity(r.rank));
    while (!queue.empty()) {
        if (out.elements.size() > cap) return out; // not closed within cap
        size_t i = queue.front();
        queue.pop_front();
        add(big_mul(out.elements[i], g0));
        add(big_mul(out.elements[i], g1));
    }
    out.closed = true;
    return out;
}

// { u * M * v : M in the closure }.
inline std::set<BigInt> value_range(const LinearRepresentation& r, const MonoidClosure& closure) {
    std::set<BigInt> out;
    for (const auto& m : closure.elements) {
        BigInt val;
        for (int i = 0; i < r.rank; ++i) {
            if (!r.u[i]) continue;
            for (int j = 0; j < r.rank; ++j)
                if (r.v[j] && !m[i][j].is_zero()) val += BigInt(r.u[i]) * m[i][j] * BigInt(r.v[j]);
        }
        out.insert(val);
    }
    return out;
}

// ------------------------------------------- equality on bounded strings --

namespace detail {

// Division-free membership of w in the row space of the echelon basis;
// when independent, the reduced remainder joins the basis.
class IntRowSpace {
public:
    // returns true if w was independent (and absorbs its remainder)
    bool insert(std::vector<BigInt> w) {
        for (auto& [pivot_col, row] : basis_) {
            if (w[pivot_col].is_zero()) continue;
            BigInt c = w[pivot_col];
            BigInt p = row[pivot_col];
            for (size_t j = 0; j < w.size(); ++j) w[j] = w[j] * p - row[j] * c;
        }
        int pivot = -1;
        for (size_t j = 0; j < w.size(); ++j)
            if (!w[j].is_zero()) { pivot = static_cast<int>(j); break; }
        if (pivot < 0) return false;
        basis_.emplace_back(pivot, std::move(w));
        return true;
    }

private:
    std::vector<std::pair<int, std::vector<BigInt>>> basis_;
};

inline std::vector<BigInt> row_times(const std::vector<BigInt>& row, const std::vector<std::vector<long long>>& m) {
    int d = static_cast<int>(m.size());
    std::vector<BigInt> out(d);
    for (int i = 0; i < d; ++i) {
        if (row[i].is_zero()) continue;
        for (int j = 0; j < d; ++j)
            if (m[i][j]) out[j] += row[i] * BigInt(m[i][j]);
    }
    return out;
}

} // namespace detail

// Do u1*mu1(x)*v1 and u2*mu2(x)*v2 agree on every digit string with
// |x| <= bound, non-canonical strings included? When bound covers
// rank(r1) + rank(r2) this equals equality on all strings, decided through
// the reachable row space of the difference representation; shorter bounds
// are checked by direct enumeration.
inline bool equal_on_strings(const LinearRepresentation& r1, const LinearRepresentation& r2, int bound) {
    if (bound >= r1.rank + r2.rank) {
        std::deque<std::pair<std::vector<BigInt>, std::vector<BigInt>>> queue;
        detail::IntRowSpace space;
        auto value_ok = [&](const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
            BigInt x, y;
            for (int i = 0; i < r1.rank; ++i)
                if (r1.v[i]) x += a[i] * BigInt(r1.v[i]);
            for (int i = 0; i < r2.rank; ++i)
                if (r2.v[i]) y += b[i] * BigInt(r2.v[i]);
            return x == y;
        };
        std::vector<BigInt> u1(r1.u.begin(), r1.u.end()), u2(r2.u.begin(), r2.u.end());
        queue.emplace_back(std::move(u1), std::move(u2));
        while (!queue.empty()) {
            auto [a, b] = std::move(queue.front());
            queue.pop_front();
            if (!value_ok(a, b)) return false;
            std::vector<BigInt> stacked(a);
            stacked.insert(stacked.end(), b.begin(), b.end());
            if (!space.insert(std::move(stacked))) continue;
            for (int d = 0; d < 2; ++d)
                queue.emplace_back(detail::row_times(a, r1.matrix(d)), detail::row_times(b, r2.matrix(d)));
        }
        return true;
    }
    std::function<bool(const std::vector<BigInt>&, const std::vector<BigInt>&, int)> dfs =
        [&](const std::vector<BigInt>& a, const std::vector<BigInt>& b, int depth) {
            BigInt x, y;
            for (int i = 0; i < r1.rank; ++i)
                if (r1.v[i]) x += a[i] * BigInt(r1.v[i]);
            for (int i = 0; i < r2.rank; ++i)
                if (r2.v[i]) y += b[i] * BigInt(r2.v[i]);
            if (x != y) return false;
            if (depth == bound) return true;
            for (int d = 0; d < 2; ++d)
                if (!dfs(detail::row_times(a, r1.matrix(d)), detail::row_times(b, r2.matrix(d)), depth + 1))
                    return false;
            return true;
        };
    std::vector<BigInt> u1(r1.u.begin(), r1.u.end()), u2(r2.u.begin(), r2.u.end());
    return dfs(u1, u2, 0);
}

inline bool equal_on_strings(const LinearRepresentation& r1, const LinearRepresentation& r2) {
    return equal_on_strings(r1, r2, r1.rank + r2.rank);
}

// ----------------------------------------------------------- text format --

inline std::string serialize(const LinearRepresentation& r) {
    std::ostringstream os;
    os << "rank " << r.rank << "\nu";
    for (long long x : r.u) os << ' ' << x;
    os << "\nM0\n";
    for (const auto& row : r.m0) {
        for (size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
        os << '\n';
    }
    os << "M1\n";
    for (const auto& row : r.m1) {
        for (size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
        os << '\n';
    }
    os << 'v';
    for (long long x : r.v) os << ' ' << x;
    os << '\n';
    return os.str();
}

inline LinearRepresentation parse_linrep(std::istream& in) {
    LinearRepresentation r;
    std::string word;
    if (!(in >> word) || word != "rank") throw SyntaxError("linear representation: expected 'rank'");
    if (!(in >> r.rank) || r.rank <= 0) throw SyntaxError("linear representation: bad rank");
    auto read_row = [&](std::vector<long long>& row) {
        row.resize(r.rank);
        for (auto& x : row)
            if (!(in >> x)) throw SyntaxError("linear representation: truncated row");
    };
    if (!(in >> word) || word != "u") throw SyntaxError("linear representation: expected 'u'");
    read_row(r.u);
    if (!(in >> word) || word != "M0") throw SyntaxError("linear representation: expected 'M0'");
    r.m0.resize(r.rank);
    for (auto& row : r.m0) read_row(row);
    if (!(in >> word) || word != "M1") throw SyntaxError("linear representation: expected 'M1'");
    r.m1.resize(r.rank);
    for (auto& row : r.m1) read_row(row);
    if (!(in >> word) || word != "v") throw SyntaxError("linear representation: expected 'v'");
    read_row(r.v);
    return r;
}

} // namespace fibra
