#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fibra/automaton.hpp"
#include "fibra/ops.hpp"

namespace fibra {

struct AutomatonFile {
    std::string numsys = "fib";
    std::variant<Dfa, Dfao> automaton;

    bool is_dfao() const { return std::holds_alternative<Dfao>(automaton); }
    const Dfa& dfa() const { return std::get<Dfa>(automaton); }
    const Dfao& dfao() const { return std::get<Dfao>(automaton); }
};

namespace detail {

inline std::string column_text(int c, int k) {
    if (k == 0) return "-";
    std::string s;
    for (int i = 0; i < k; ++i) {
        if (i) s.push_back(',');
        s.push_back(static_cast<char>('0' + digit_of(c, i, k)));
    }
    return s;
}

inline int parse_column(const std::string& text, int k, int line) {
    if (k == 0) {
        if (text != "-") throw SyntaxError("expected '-' column for a zero-track automaton", line, 0);
        return 0;
    }
    int c = 0, digits = 0;
    for (char ch : text) {
        if (ch == ',') continue;
        if (ch != '0' && ch != '1') throw SyntaxError("bad digit '" + std::string(1, ch) + "' in column", line, 0);
        c = (c << 1) | (ch - '0');
        ++digits;
    }
    if (digits != k) throw SyntaxError("column has " + std::to_string(digits) + " digits, expected " + std::to_string(k), line, 0);
    return c;
}

template <typename A>
inline void serialize_header(std::ostream& os, const A& a, const std::string& numsys) {
    os << "tracks " << a.k();
    for (const auto& t : a.tracks) os << ' ' << t;
    os << "\nnumsys " << numsys << "\nstates " << a.num_states() << "\ninitial " << a.initial << '\n';
}

} // namespace detail

// Line-oriented text format. Transitions into states that cannot reach
// acceptance are left out; readers route unlisted transitions to a dead
// state.
inline std::string serialize(const Dfa& a, const std::string& numsys = "fib") {
    std::ostringstream os;
    detail::serialize_header(os, a, numsys);
    os << "accepting";
    for (int s = 0; s < a.num_states(); ++s)
        if (a.accepting[s]) os << ' ' << s;
    os << '\n';
    auto coacc = coaccessible_states(a);
    for (int s = 0; s < a.num_states(); ++s) {
        if (!coacc[s]) continue;
        for (int c = 0; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (!coacc[t]) continue;
            os << "t " << s << ' ' << detail::column_text(c, a.k()) << ' ' << t << '\n';
        }
    }
    return os.str();
}

// The totality sink, when present as the last state, stays implicit in the
// file: its transitions are the unlisted ones.
inline std::string serialize(const Dfao& a, const std::string& numsys = "fib") {
    bool skip_sink = a.sink >= 0 && a.sink == a.num_states() - 1;
    int count = skip_sink ? a.num_states() - 1 : a.num_states();
    std::ostringstream os;
    os << "tracks " << a.k();
    for (const auto& t : a.tracks) os << ' ' << t;
    os << "\nnumsys " << numsys << "\nstates " << count << "\ninitial " << a.initial << '\n';
    for (int s = 0; s < count; ++s) os << "output " << s << ' ' << a.outputs[s] << '\n';
    for (int s = 0; s < count; ++s)
        for (int c = 0; c < a.ncols(); ++c) {
            int32_t t = a.next(s, c);
            if (skip_sink && t == a.sink) continue;
            os << "t " << s << ' ' << detail::column_text(c, a.k()) << ' ' << t << '\n';
        }
    return os.str();
}

inline AutomatonFile parse_automaton(std::istream& in) {
    std::string line;
    int lineno = 0;
    int nstates = -1, initial = -1, k = -1;
    std::vector<std::string> tracks;
    std::string numsys = "fib";
    std::vector<int32_t> accepting;
    bool has_accepting_line = false;
    std::vector<std::pair<int32_t, int32_t>> outputs;
    struct Tr { int32_t from; int col; int32_t to; int line; };
    std::vector<Tr> transitions;

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        auto want_int = [&](const char* what) {
            long long v;
            if (!(ls >> v)) throw SyntaxError(std::string("expected ") + what, lineno, 0);
            return v;
        };
        if (word == "tracks") {
            k = static_cast<int>(want_int("track count"));
            if (k < 0 || k > 16) throw SyntaxError("unsupported track count", lineno, 0);
            tracks.clear();
            std::string name;
            for (int i = 0; i < k; ++i) {
                if (!(ls >> name)) throw SyntaxError("expected track name", lineno, 0);
                tracks.push_back(name);
            }
        } else if (word == "numsys") {
            if (!(ls >> numsys)) throw SyntaxError("expected numeration system name", lineno, 0);
        } else if (word == "states") {
            nstates = static_cast<int>(want_int("state count"));
            if (nstates <= 0) throw SyntaxError("state count must be positive", lineno, 0);
        } else if (word == "initial") {
            initial = static_cast<int>(want_int("initial state"));
        } else if (word == "accepting") {
            has_accepting_line = true;
            long long v;
            while (ls >> v) accepting.push_back(static_cast<int32_t>(v));
        } else if (word == "output") {
            long long s = want_int("state id");
            long long o = want_int("output letter");
            outputs.emplace_back(static_cast<int32_t>(s), static_cast<int32_t>(o));
        } else if (word == "t") {
            long long from = want_int("source state");
            std::string coltext;
            if (!(ls >> coltext)) throw SyntaxError("expected column", lineno, 0);
            long long to;
            if (!(ls >> to)) throw SyntaxError("expected target state", lineno, 0);
            if (k < 0) throw SyntaxError("transition before tracks line", lineno, 0);
            transitions.push_back({static_cast<int32_t>(from), detail::parse_column(coltext, k, lineno),
                                   static_cast<int32_t>(to), lineno});
        } else {
            throw SyntaxError("unknown directive '" + word + "'", lineno, 0);
        }
    }
    if (k < 0) throw SyntaxError("missing tracks line");
    if (nstates < 0) throw SyntaxError("missing states line");
    if (initial < 0 || initial >= nstates) throw SyntaxError("initial state out of range");
    if (has_accepting_line && !outputs.empty())
        throw SyntaxError("file mixes accepting and output lines");
    for (auto& t : transitions) {
        if (t.from < 0 || t.from >= nstates) throw SyntaxError("transition from undeclared state", t.line, 0);
        if (t.to < 0 || t.to >= nstates) throw SyntaxError("transition to undeclared state", t.line, 0);
    }

    int nc = 1 << k;
    AutomatonFile out;
    out.numsys = numsys;
    if (!outputs.empty()) {
        Dfao a;
        a.tracks = tracks;
        a.initial = initial;
        a.outputs.assign(nstates, INT32_MIN);
        for (auto [s, o] : outputs) {
            if (s < 0 || s >= nstates) throw SyntaxError("output for undeclared state " + std::to_string(s));
            a.outputs[s] = o;
        }
        for (int s = 0; s < nstates; ++s)
            if (a.outputs[s] == INT32_MIN)
                throw SyntaxError("state " + std::to_string(s) + " has no output line");
        // DFAOs must be total: a missing transition gets a sink with output 0
        a.delta.assign(static_cast<size_t>(nstates) * nc, -1);
        for (auto& t : transitions) {
            auto& slot = a.delta[static_cast<size_t>(t.from) * nc + t.col];
            if (slot != -1) throw SyntaxError("duplicate transition", t.line, 0);
            slot = t.to;
        }
        bool need_sink = false;
        for (auto d : a.delta) need_sink |= d == -1;
        if (need_sink) {
            int sink = nstates;
            a.outputs.push_back(0);
            for (auto& d : a.delta)
                if (d == -1) d = sink;
            a.delta.resize(a.delta.size() + nc, sink);
            a.sink = sink;
        }
        out.automaton = std::move(a);
    } else {
        if (!has_accepting_line) throw SyntaxError("missing accepting line (or output lines for a DFAO)");
        Dfa a;
        a.tracks = tracks;
        a.initial = initial;
        a.accepting.assign(nstates, 0);
        for (int32_t s : accepting) {
            if (s < 0 || s >= nstates) throw SyntaxError("accepting state " + std::to_string(s) + " undeclared");
            a.accepting[s] = 1;
        }
        a.delta.assign(static_cast<size_t>(nstates) * nc, -1);
        for (auto& t : transitions) {
            auto& slot = a.delta[static_cast<size_t>(t.from) * nc + t.col];
            if (slot != -1) throw SyntaxError("duplicate transition", t.line, 0);
            slot = t.to;
        }
        bool need_sink = false;
        for (auto d : a.delta) need_sink |= d == -1;
        if (need_sink) {
            int sink = nstates;
            a.accepting.push_back(0);
            for (auto& d : a.delta)
                if (d == -1) d = sink;
            a.delta.resize(a.delta.size() + nc, sink);
        }
        out.automaton = std::move(a);
    }
    return out;
}

inline AutomatonFile read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return parse_automaton(in);
    } catch (SyntaxError& e) {
        throw SyntaxError(path + ": " + e.what());
    }
}

template <typename A>
inline void write_file(const A& a, const std::string& path, const std::string& numsys = "fib") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << serialize(a, numsys);
    if (!out) throw IoError("write to '" + path + "' failed");
}

namespace detail {

template <typename A>
inline std::string dot_body(const A& a, bool dfao) {
    std::ostringstream os;
    os << "digraph automaton {\n  rankdir = LR;\n  __init [shape = point];\n";
    std::vector<uint8_t> coacc;
    if constexpr (std::is_same_v<A, Dfa>) coacc = coaccessible_states(a);
    auto keep = [&](int s) { return dfao || coacc[s] != 0; };
    for (int s = 0; s < a.num_states(); ++s) {
        os << "  q" << s << " [shape = ";
        if constexpr (std::is_same_v<A, Dfa>) os << (a.accepting[s] ? "doublecircle" : "circle") << ", label = \"q" << s << "\"";
        else os << "circle, label = \"q" << s << "/" << a.outputs[s] << "\"";
        os << "];\n";
    }
    os << "  __init -> q" << a.initial << ";\n";
    for (int s = 0; s < a.num_states(); ++s) {
        if (!keep(s)) continue;
        for (int t = 0; t < a.num_states(); ++t) {
            if (!keep(t)) continue;
            std::string labels;
            for (int c = 0; c < a.ncols(); ++c) {
                if (a.next(s, c) != t) continue;
                if (!labels.empty()) labels += ", ";
                std::string col = column_text(c, a.k());
                labels += a.k() > 1 ? "[" + col + "]" : col;
            }
            if (!labels.empty()) os << "  q" << s << " -> q" << t << " [label = \"" << labels << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace detail

inline std::string to_dot(const Dfa& a) { return detail::dot_body(a, false); }
inline std::string to_dot(const Dfao& a) { return detail::dot_body(a, true); }

} // namespace fibra
