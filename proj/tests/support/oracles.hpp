#pragma once

// Independent reference implementations used as test oracles. These must not
// share code paths with the library machinery they check.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibra/logic.hpp"

namespace oracles {

// Fibonacci word by iterating the morphism 0 -> 01, 1 -> 0.
inline std::string fib_word(size_t len) {
    std::string w = "0";
    while (w.size() < len) {
        std::string next;
        next.reserve(w.size() * 2);
        for (char c : w) next += (c == '0') ? "01" : "0";
        w = std::move(next);
    }
    return w.substr(0, len);
}

// Rote-Fibonacci word from the recurrence R0 = 0, R1 = 00,
// Rn = R(n-1) R(n-2) if n = 0 mod 3 else R(n-1) complement(R(n-2)).
inline std::string rote_word_recurrence(size_t len) {
    std::vector<std::string> r = {"0", "00"};
    auto comp = [](const std::string& s) {
        std::string out = s;
        for (char& c : out) c = c == '0' ? '1' : '0';
        return out;
    };
    for (int n = 2; r.back().size() < len; ++n)
        r.push_back(n % 3 == 0 ? r[n - 1] + r[n - 2] : r[n - 1] + comp(r[n - 2]));
    return r.back().substr(0, len);
}

// Rote-Fibonacci word by transducing the Fibonacci word:
// q0 reads 0/1 emitting 00/0, q1 reads 0/1 emitting 11/1.
inline std::string rote_word_transducer(size_t len) {
    std::string f = fib_word(2 * len + 4);
    std::string out;
    int state = 0;
    for (char c : f) {
        if (out.size() >= len) break;
        if (state == 0) out += (c == '0') ? "00" : "0";
        else out += (c == '0') ? "11" : "1";
        state = 1 - state;
    }
    return out.substr(0, len);
}

// Greedy Zeckendorf digits, written independently of the library.
inline std::vector<int> zeck_digits(uint64_t n) {
    std::vector<uint64_t> fib = {1, 2};
    while (fib.back() <= n) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
    std::vector<int> digits;
    bool started = false;
    for (size_t i = fib.size(); i-- > 0;) {
        if (fib[i] <= n) {
            digits.push_back(1);
            n -= fib[i];
            started = true;
        } else if (started) {
            digits.push_back(0);
        }
    }
    return digits;
}

inline int tmf_letter(uint64_t n) {
    int parity = 0;
    for (int d : zeck_digits(n)) parity ^= d;
    return parity;
}

// ---------------------------------------------------------- brute forcing --

// Evaluate a formula over natural numbers with quantifiers restricted to
// [0, bound). Words are letter tables; relations are arbitrary predicates.
struct BruteEnv {
    uint64_t bound = 40;
    std::map<std::string, std::vector<int>> words;
    std::map<std::string, std::function<bool(const std::vector<uint64_t>&)>> relations;
};

inline std::optional<uint64_t> brute_term(const fibra::TermAst& t, const std::map<std::string, uint64_t>& vars) {
    using fibra::TermAst;
    switch (t.kind) {
        case TermAst::Variable: {
            auto it = vars.find(t.name);
            if (it == vars.end()) throw std::runtime_error("unbound variable " + t.name);
            return it->second;
        }
        case TermAst::Constant: return t.value;
        case TermAst::Sum: {
            auto a = brute_term(*t.lhs, vars), b = brute_term(*t.rhs, vars);
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case TermAst::Difference: {
            auto a = brute_term(*t.lhs, vars), b = brute_term(*t.rhs, vars);
            if (!a || !b || *a < *b) return std::nullopt;
            return *a - *b;
        }
        case TermAst::ConstMultiple: {
            auto a = brute_term(*t.rhs, vars);
            if (!a) return std::nullopt;
            return t.value * *a;
        }
    }
    return std::nullopt;
}

inline bool brute_cmp(fibra::CompareOp op, long long a, long long b) {
    using fibra::CompareOp;
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Neq: return a != b;
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Gt: return a > b;
        case CompareOp::Ge: return a >= b;
    }
    return false;
}

inline bool brute_eval(const fibra::FormulaAst& f, const BruteEnv& env, std::map<std::string, uint64_t>& vars) {
    using fibra::FormulaAst;
    switch (f.kind) {
        case FormulaAst::Compare: {
            auto a = brute_term(*f.t1, vars), b = brute_term(*f.t2, vars);
            if (!a || !b) return false;
            return brute_cmp(f.op, static_cast<long long>(*a), static_cast<long long>(*b));
        }
        case FormulaAst::LetterCmp: {
            auto side = [&](const fibra::LetterExpr& e) -> std::optional<long long> {
                if (e.is_literal) return e.literal;
                auto it = env.words.find(e.word);
                if (it == env.words.end()) throw std::runtime_error("unknown word " + e.word);
                if (e.indices.size() != 1) throw std::runtime_error("brute words take one index");
                auto ix = brute_term(*e.indices[0], vars);
                if (!ix) return std::nullopt;
                if (*ix >= it->second.size()) throw std::runtime_error("brute word table too short");
                return it->second[*ix];
            };
            auto a = side(f.l1), b = side(f.l2);
            if (!a || !b) return false;
            return brute_cmp(f.op, *a, *b);
        }
        case FormulaAst::Custom: {
            auto it = env.relations.find(f.name);
            if (it == env.relations.end()) throw std::runtime_error("unknown relation " + f.name);
            std::vector<uint64_t> args;
            for (const auto& t : f.args) {
                auto v = brute_term(*t, vars);
                if (!v) return false;
                args.push_back(*v);
            }
            return it->second(args);
        }
        case FormulaAst::Not: return !brute_eval(*f.f1, env, vars);
        case FormulaAst::And: return brute_eval(*f.f1, env, vars) && brute_eval(*f.f2, env, vars);
        case FormulaAst::Or: return brute_eval(*f.f1, env, vars) || brute_eval(*f.f2, env, vars);
        case FormulaAst::Implies: return !brute_eval(*f.f1, env, vars) || brute_eval(*f.f2, env, vars);
        case FormulaAst::Iff: return brute_eval(*f.f1, env, vars) == brute_eval(*f.f2, env, vars);
        case FormulaAst::Exists:
        case FormulaAst::ForAll: {
            bool exists = f.kind == FormulaAst::Exists;
            std::function<bool(size_t)> loop = [&](size_t vi) -> bool {
                if (vi == f.vars.size()) return brute_eval(*f.f1, env, vars);
                for (uint64_t v = 0; v < env.bound; ++v) {
                    vars[f.vars[vi]] = v;
                    bool r = loop(vi + 1);
                    if (exists == r) {
                        vars.erase(f.vars[vi]);
                        return exists;
                    }
                }
                vars.erase(f.vars[vi]);
                return !exists;
            };
            return loop(0);
        }
    }
    return false;
}

inline bool brute_eval(const std::string& text, const BruteEnv& env, std::map<std::string, uint64_t> vars = {}) {
    return brute_eval(*fibra::parse_formula(text), env, vars);
}

} // namespace oracles
