#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fibra/ops.hpp"
#include "fibra/serialize.hpp"

namespace fibra {

namespace detail {

inline bool needs_parens_for_star(const std::string& r) {
    if (r.size() <= 1) return false;
    // a single bracketed column is atomic
    if (r.front() == '[' && r.find(']') == r.size() - 1) return false;
    return true;
}

inline std::string star_of(const std::string& r) {
    if (r.empty()) return "";
    return needs_parens_for_star(r) ? "(" + r + ")*" : r + "*";
}

inline std::optional<std::string> union_of(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a) return b;
    if (!b) return a;
    if (*a == *b) return a;
    auto show = [](const std::string& s) { return s.empty() ? std::string("eps") : s; };
    return show(*a) + " + " + show(*b);
}

inline std::optional<std::string> concat_of(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return std::nullopt;
    auto wrap = [](const std::string& s) {
        return s.find(" + ") != std::string::npos ? "(" + s + ")" : s;
    };
    return wrap(*a) + wrap(*b);
}

} // namespace detail

// A regular expression for the stripped language (leading all-zero padding
// removed), by state elimination. Display helper; unions print as +, the
// empty word as eps.
inline std::string regex_summary(const Dfa& dfa) {
    // reroute the initial state's zero column to a sink: strips 0^* padding
    Dfa a = dfa;
    int fresh = a.num_states();
    int dead = fresh + 1;
    a.accepting.push_back(a.accepting[a.initial]);
    a.accepting.push_back(0);
    size_t nc = a.ncols();
    a.delta.resize(static_cast<size_t>(dead + 1) * nc);
    for (size_t c = 0; c < nc; ++c) {
        a.next(fresh, static_cast<int>(c)) = c == 0 ? dead : a.next(a.initial, static_cast<int>(c));
        a.next(dead, static_cast<int>(c)) = dead;
    }
    a.initial = fresh;
    a = minimize(a);

    auto coacc = coaccessible_states(a);
    int n = a.num_states();
    // generalized transition table, entries nullopt when absent
    std::vector<std::optional<std::string>> r(static_cast<size_t>(n + 2) * (n + 2));
    auto at = [&](int i, int j) -> std::optional<std::string>& { return r[static_cast<size_t>(i) * (n + 2) + j]; };
    int start = n, accept = n + 1;
    at(start, a.initial) = "";
    for (int s = 0; s < n; ++s) {
        if (!coacc[s]) continue;
        if (a.accepting[s]) at(s, accept) = "";
        for (int t = 0; t < n; ++t) {
            if (!coacc[t]) continue;
            std::optional<std::string> lbl;
            for (int c = 0; c < a.ncols(); ++c) {
                if (a.next(s, c) != t) continue;
                std::string col = detail::column_text(c, a.k());
                lbl = detail::union_of(lbl, a.k() > 1 ? "[" + col + "]" : col);
            }
            if (lbl) {
                if (lbl->find(" + ") != std::string::npos) lbl = "(" + *lbl + ")";
                at(s, t) = lbl;
            }
        }
    }
    for (int kill = 0; kill < n; ++kill) {
        std::optional<std::string> loop = at(kill, kill);
        at(kill, kill) = std::nullopt;
        std::string loop_star = loop ? detail::star_of(*loop) : "";
        for (int i = 0; i < n + 2; ++i) {
            if (i == kill || !at(i, kill)) continue;
            for (int j = 0; j < n + 2; ++j) {
                if (j == kill || !at(kill, j)) continue;
                auto path = detail::concat_of(detail::concat_of(at(i, kill), loop_star), at(kill, j));
                at(i, j) = detail::union_of(at(i, j), path);
            }
        }
        for (int i = 0; i < n + 2; ++i) {
            at(i, kill) = std::nullopt;
            at(kill, i) = std::nullopt;
        }
    }
    auto res = at(start, accept);
    if (!res) return "(empty)";
    return res->empty() ? "eps" : *res;
}

} // namespace fibra
