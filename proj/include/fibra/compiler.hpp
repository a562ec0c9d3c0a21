#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fibra/logic.hpp"
#include "fibra/numeration.hpp"
#include "fibra/ops.hpp"
#include "fibra/words.hpp"

namespace fibra {

// A numeration system as pluggable automata: addition as a 3-track relation
// x + y = z, order as x < y, and the 1-track language of padded canonical
// representations. encode/decode are optional shortcuts; without them
// constants are synthesized from the order automaton alone.
struct NumerationBundle {
    std::string name = "fib";
    Dfa add;
    Dfa less;
    Dfa canonical;
    std::function<DigitString(uint64_t)> encode;
    std::function<uint64_t(const DigitString&)> decode;
};

inline NumerationBundle fib_bundle() {
    NumerationBundle b;
    b.name = "fib";
    b.add = adder_dfa();
    b.less = less_than_dfa();
    b.canonical = pad_universe({"x"});
    b.encode = [](uint64_t n) { return to_zeckendorf(n); };
    b.decode = [](const DigitString& d) { return from_digits(d); };
    return b;
}

struct CompileStep {
    std::string text;
    int states = 0;
    int64_t ms = 0;
};

struct CompileLog {
    std::vector<CompileStep> steps;
    int64_t peak_states = 0; // largest minimized intermediate automaton
    int64_t total_ms = 0;
};

struct CompileOptions {
    int64_t state_cap = 2'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::function<void(const CompileStep&, int index)> on_step;
};

struct CompileResult {
    Dfa dfa;
    CompileLog log;
};

inline std::string format_step(const CompileStep& s, int indent) {
    return std::string(indent, ' ') + s.text + " with " + std::to_string(s.states) + " states, in " +
           std::to_string(s.ms) + "ms";
}

inline std::string format_log(const CompileLog& log) {
    std::string out;
    for (size_t i = 0; i < log.steps.size(); ++i) {
        out += format_step(log.steps[i], static_cast<int>(i));
        out += '\n';
    }
    out += "overall time: " + std::to_string(log.total_ms) + "ms\n";
    return out;
}

// Name registries plus the numeration system a compilation runs against.
struct CompileEnv {
    NumerationBundle numsys = fib_bundle();
    std::map<std::string, Dfao> dfaos;     // words and output-valued relations
    std::map<std::string, Dfa> relations;  // boolean relations

    CompileEnv() = default;

    // The addition relation restricted to padded canonical representations.
    const Dfa& adder() const {
        if (!adder_) {
            Dfa raw = instantiate(numsys.add, {"x", "y", "z"});
            adder_ = product(raw, universe({"x", "y", "z"}), BoolOp::And);
        }
        return *adder_;
    }

    Dfa universe(std::vector<std::string> tracks) const {
        check_tracks_sorted(tracks);
        int k = static_cast<int>(tracks.size());
        auto it = universe_cache_.find(k);
        if (it == universe_cache_.end()) {
            Dfa u;
            if (k == 0) {
                u.tracks = {};
                u.initial = 0;
                u.accepting = {1};
                u.delta = {0};
            } else {
                u = instantiate(numsys.canonical, {generic_name(0)});
                for (int i = 1; i < k; ++i)
                    u = product(u, instantiate(numsys.canonical, {generic_name(i)}), BoolOp::And);
            }
            it = universe_cache_.emplace(k, std::move(u)).first;
        }
        Dfa u = it->second; // the universe is symmetric in its tracks
        u.tracks = std::move(tracks);
        return u;
    }

    // Binary comparison relation over generic tracks (x, y) = (lhs, rhs).
    const Dfa& comparator(CompareOp op) const {
        auto it = cmp_cache_.find(op);
        if (it != cmp_cache_.end()) return it->second;
        Dfa r;
        switch (op) {
            case CompareOp::Lt: r = minimize(instantiate(numsys.less, {"x", "y"})); break;
            case CompareOp::Gt: r = minimize(instantiate(numsys.less, {"y", "x"})); break;
            case CompareOp::Eq: r = product(diagonal(), universe({"x", "y"}), BoolOp::And); break;
            case CompareOp::Neq: r = product(comparator(CompareOp::Lt), comparator(CompareOp::Gt), BoolOp::Or); break;
            case CompareOp::Le: r = product(comparator(CompareOp::Lt), comparator(CompareOp::Eq), BoolOp::Or); break;
            case CompareOp::Ge: r = product(comparator(CompareOp::Gt), comparator(CompareOp::Eq), BoolOp::Or); break;
        }
        return cmp_cache_.emplace(op, std::move(r)).first->second;
    }

    // 1-track automaton of padded representations of a fixed value.
    const Dfa& constant(uint64_t value) const {
        auto it = const_cache_.find(value);
        if (it != const_cache_.end()) return it->second;
        Dfa r = numsys.encode ? constant_from_digits(numsys.encode(value)) : constant_from_order(value);
        return const_cache_.emplace(value, std::move(r)).first->second;
    }

    const Dfao& dfao(const std::string& name) const {
        auto it = dfaos.find(name);
        if (it == dfaos.end()) throw SemanticError("unknown word or output relation '" + name + "'");
        return it->second;
    }
    const Dfa& relation(const std::string& name) const {
        auto it = relations.find(name);
        if (it == relations.end()) throw SemanticError("unknown relation '" + name + "'");
        return it->second;
    }

private:
    static std::string generic_name(int i) {
        return std::string(1, static_cast<char>('a' + i));
    }

    static Dfa diagonal() {
        Dfa d;
        d.tracks = {"x", "y"};
        d.initial = 0;
        d.accepting = {1, 0};
        d.delta = {
            0, 1, 1, 0, // equal digits stay, unequal digits die
            1, 1, 1, 1,
        };
        return d;
    }

    Dfa constant_from_digits(const DigitString& d) const {
        // 0^* then the exact digit string
        int n = static_cast<int>(d.size());
        Dfa r;
        r.tracks = {"x"};
        r.initial = 0;
        int dead = n + 1;
        r.accepting.assign(n + 2, 0);
        r.accepting[n] = 1;
        r.delta.assign(static_cast<size_t>(n + 2) * 2, dead);
        r.next(0, 0) = 0;
        for (int i = 0; i < n; ++i) r.next(i, d[i]) = i + 1;
        if (n > 0 && d[0] == 1) r.next(0, 0) = 0; // keep the pad loop
        return minimize(r);
    }

    // With no encoder, walk up from zero with the successor relation
    // definable from order alone.
    Dfa constant_from_order(uint64_t value) const {
        Budget budget;
        auto exists_away = [&](const Dfa& a, const std::string& track) {
            return minimize(determinize(pad_closure(project(a, track)), budget));
        };
        Dfa zero = [&] {
            Dfa some_smaller = exists_away(instantiate(numsys.less, {"y", "x"}), "y"); // exists y < x
            return complement(some_smaller, universe({"x"}), budget);
        }();
        if (value == 0) return zero;
        Dfa succ = [&] { // y = x + 1, tracks (x, y)
            Dfa between = product(instantiate(numsys.less, {"x", "z"}), instantiate(numsys.less, {"z", "y"}), BoolOp::And, budget);
            Dfa gap = complement(exists_away(between, "z"), universe({"x", "y"}), budget);
            return product(instantiate(numsys.less, {"x", "y"}), gap, BoolOp::And, budget);
        }();
        Dfa cur = zero; // over track "x"
        for (uint64_t i = 0; i < value; ++i) {
            Dfa step = product(instantiate(cur, {"w"}), instantiate(succ, {"w", "x"}), BoolOp::And, budget);
            cur = exists_away(step, "w");
        }
        return cur;
    }

    mutable std::optional<Dfa> adder_;
    mutable std::map<int, Dfa> universe_cache_;
    mutable std::map<CompareOp, Dfa> cmp_cache_;
    mutable std::map<uint64_t, Dfa> const_cache_;
};

namespace detail {

class Compiler {
public:
    Compiler(const CompileEnv& env, const CompileOptions& opts) : env_(env), opts_(opts) {
        budget_.state_cap = opts.state_cap;
        budget_.deadline = opts.deadline;
    }

    CompileResult run(const FormulaAst& f) {
        auto t0 = std::chrono::steady_clock::now();
        free_variables(f); // validates variable binding
        Dfa result = formula(f, true);
        log_.total_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        return {std::move(result), std::move(log_)};
    }

private:
    using Clock = std::chrono::steady_clock;

    Dfa note(Dfa d) {
        log_.peak_states = std::max<int64_t>(log_.peak_states, d.num_states());
        return d;
    }
    Dfa conj(const Dfa& a, const Dfa& b) { return note(product(a, b, BoolOp::And, budget_)); }
    // Quantified variables range over values: the witness track is clamped
    // to canonical representations before it is erased.
    Dfa exists_one(const Dfa& a, const std::string& track) {
        Dfa clamped = conj(a, env_.universe({track}));
        return note(minimize(determinize(pad_closure(project(clamped, track)), budget_)));
    }
    Dfa negate(const Dfa& a) { return note(complement(a, env_.universe(a.tracks), budget_)); }

    void log_step(const FormulaAst& f, const Dfa& result, Clock::time_point t0) {
        CompileStep s;
        s.text = format(f);
        s.states = result.num_states();
        s.ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
        log_.steps.push_back(s);
        if (opts_.on_step) opts_.on_step(log_.steps.back(), static_cast<int>(log_.steps.size()) - 1);
    }

    // ------------------------------------------------------------- terms --

    struct TermCtx {
        std::vector<Dfa> constraints;
        std::vector<std::string> fresh;
    };

    std::string fresh_track(TermCtx& ctx) {
        std::string name = "~" + std::to_string(fresh_counter_++);
        ctx.fresh.push_back(name);
        return name;
    }

    std::string term(const TermAst& t, TermCtx& ctx) {
        switch (t.kind) {
            case TermAst::Variable:
                return t.name;
            case TermAst::Constant: {
                std::string f = fresh_track(ctx);
                ctx.constraints.push_back(instantiate(env_.constant(t.value), {f}));
                return f;
            }
            case TermAst::Sum: {
                std::string a = term(*t.lhs, ctx), b = term(*t.rhs, ctx);
                std::string f = fresh_track(ctx);
                ctx.constraints.push_back(instantiate(env_.adder(), {a, b, f}));
                return f;
            }
            case TermAst::Difference: {
                // f = a - b encoded as b + f = a; assignments with a < b
                // leave no f and the atom rejects them
                std::string a = term(*t.lhs, ctx), b = term(*t.rhs, ctx);
                std::string f = fresh_track(ctx);
                ctx.constraints.push_back(instantiate(env_.adder(), {b, f, a}));
                return f;
            }
            case TermAst::ConstMultiple: {
                if (t.value == 0) {
                    std::string f = fresh_track(ctx);
                    ctx.constraints.push_back(instantiate(env_.constant(0), {f}));
                    return f;
                }
                std::string x = term(*t.rhs, ctx);
                std::string acc = x;
                for (uint64_t i = 1; i < t.value; ++i) {
                    std::string f = fresh_track(ctx);
                    ctx.constraints.push_back(instantiate(env_.adder(), {acc, x, f}));
                    acc = f;
                }
                return acc;
            }
        }
        throw SemanticError("bad term");
    }

    static bool mentions(const Dfa& d, const std::string& track) {
        return std::find(d.tracks.begin(), d.tracks.end(), track) != d.tracks.end();
    }

    // Conjoin the accumulated constraints in creation order, eliminating
    // each fresh track right after its last use to keep arity low.
    Dfa assemble(TermCtx& ctx, Dfa comparator) {
        ctx.constraints.push_back(std::move(comparator));
        std::map<std::string, size_t> last_use;
        for (const auto& f : ctx.fresh)
            for (size_t i = 0; i < ctx.constraints.size(); ++i)
                if (mentions(ctx.constraints[i], f)) last_use[f] = i;
        Dfa acc;
        for (size_t i = 0; i < ctx.constraints.size(); ++i) {
            acc = i == 0 ? note(minimize(ctx.constraints[0])) : conj(acc, ctx.constraints[i]);
            for (const auto& f : ctx.fresh)
                if (last_use[f] == i && mentions(acc, f)) acc = exists_one(acc, f);
        }
        return acc;
    }

    Dfa empty_language(std::vector<std::string> tracks) const {
        Dfa e;
        e.tracks = std::move(tracks);
        e.initial = 0;
        e.accepting = {0, 0};
        e.delta.assign(static_cast<size_t>(2) * e.ncols(), 1);
        return e;
    }

    static bool reflexive(CompareOp op) { return op == CompareOp::Eq || op == CompareOp::Le || op == CompareOp::Ge; }

    // ------------------------------------------------------------- atoms --

    Dfa atom_compare(const FormulaAst& f) {
        TermCtx ctx;
        std::string a = term(*f.t1, ctx);
        std::string b = term(*f.t2, ctx);
        Dfa cmp = a == b ? (reflexive(f.op) ? env_.universe({a}) : empty_language({a}))
                         : instantiate(env_.comparator(f.op), {a, b});
        return assemble(ctx, std::move(cmp));
    }

    static bool letter_cmp(CompareOp op, long long a, long long b) {
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

    // DFA over the index tracks accepting when the run ends on a real state
    // whose output satisfies the comparison with a literal. A run into the
    // totality sink has no letter and rejects under every operator.
    static Dfa dfao_select(const Dfao& d, CompareOp op, long long literal) {
        Dfa r;
        r.tracks = d.tracks;
        r.initial = d.initial;
        r.delta = d.delta;
        r.accepting.resize(d.num_states());
        for (int s = 0; s < d.num_states(); ++s)
            r.accepting[s] = s != d.sink && letter_cmp(op, d.outputs[s], literal) ? 1 : 0;
        return r;
    }

    Dfa dfao_compare(const Dfao& d1, const std::vector<std::string>& n1, const Dfao& d2,
                     const std::vector<std::string>& n2, CompareOp op) {
        std::vector<std::string> tracks(n1);
        tracks.insert(tracks.end(), n2.begin(), n2.end());
        std::sort(tracks.begin(), tracks.end());
        tracks.erase(std::unique(tracks.begin(), tracks.end()), tracks.end());
        int k = static_cast<int>(tracks.size());
        int nc = 1 << k;
        auto colmap = [&](const Dfao& d, const std::vector<std::string>& names) {
            std::vector<int> pos(names.size());
            for (size_t i = 0; i < names.size(); ++i)
                pos[i] = static_cast<int>(std::lower_bound(tracks.begin(), tracks.end(), names[i]) - tracks.begin());
            std::vector<int> m(nc);
            for (int c = 0; c < nc; ++c) {
                int dc = 0;
                for (int i = 0; i < d.k(); ++i) dc = (dc << 1) | digit_of(c, pos[i], k);
                m[c] = dc;
            }
            return m;
        };
        std::vector<int> m1 = colmap(d1, n1), m2 = colmap(d2, n2);
        std::unordered_map<uint64_t, int32_t> ids;
        std::vector<std::pair<int32_t, int32_t>> pairs;
        auto intern = [&](int32_t a, int32_t b) {
            uint64_t key = (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
            auto [it, fresh] = ids.emplace(key, static_cast<int32_t>(pairs.size()));
            if (fresh) pairs.emplace_back(a, b);
            return it->second;
        };
        intern(d1.initial, d2.initial);
        Dfa r;
        r.tracks = tracks;
        r.initial = 0;
        for (size_t q = 0; q < pairs.size(); ++q) {
            auto [s1, s2] = pairs[q];
            bool live = s1 != d1.sink && s2 != d2.sink;
            r.accepting.push_back(live && letter_cmp(op, d1.outputs[s1], d2.outputs[s2]) ? 1 : 0);
            for (int c = 0; c < nc; ++c) r.delta.push_back(intern(d1.next(s1, m1[c]), d2.next(s2, m2[c])));
            if ((q & 1023) == 0) budget_.check(pairs.size());
        }
        return r;
    }

    Dfa atom_letter(const FormulaAst& f) {
        if (f.l1.is_literal && f.l2.is_literal) {
            bool truth = letter_cmp(f.op, f.l1.literal, f.l2.literal);
            return truth ? env_.universe({}) : empty_language({});
        }
        TermCtx ctx;
        const Dfao& d1 = env_.dfao(f.l1.word);
        if (static_cast<int>(f.l1.indices.size()) != d1.k())
            throw SemanticError("'" + f.l1.word + "' takes " + std::to_string(d1.k()) + " indices");
        std::vector<std::string> n1;
        for (const auto& ix : f.l1.indices) n1.push_back(term(*ix, ctx));
        Dfa cmp;
        if (f.l2.is_literal) {
            cmp = instantiate(dfao_select(d1, f.op, f.l2.literal), n1);
        } else {
            const Dfao& d2 = env_.dfao(f.l2.word);
            if (static_cast<int>(f.l2.indices.size()) != d2.k())
                throw SemanticError("'" + f.l2.word + "' takes " + std::to_string(d2.k()) + " indices");
            std::vector<std::string> n2;
            for (const auto& ix : f.l2.indices) n2.push_back(term(*ix, ctx));
            cmp = dfao_compare(d1, n1, d2, n2, f.op);
        }
        return assemble(ctx, std::move(cmp));
    }

    Dfa atom_custom(const FormulaAst& f) {
        const Dfa& rel = env_.relation(f.name);
        if (static_cast<int>(f.args.size()) != rel.k())
            throw SemanticError("relation '" + f.name + "' takes " + std::to_string(rel.k()) + " arguments");
        TermCtx ctx;
        std::vector<std::string> names;
        for (const auto& a : f.args) names.push_back(term(*a, ctx));
        Dfa cmp = instantiate(rel, names);
        return assemble(ctx, std::move(cmp));
    }

    // ---------------------------------------------------------- formulas --

    Dfa project_all(Dfa a, const std::vector<std::string>& vars) {
        for (const auto& v : vars)
            if (mentions(a, v)) a = exists_one(a, v);
        return a;
    }

    // Intermediate automata may accept junk words with non-canonical tracks
    // (the raw adder and total DFAOs tolerate them); the root result is
    // clamped to the canonical universe.
    Dfa clean(Dfa r) {
        if (r.tracks.empty()) return r;
        return conj(r, env_.universe(r.tracks));
    }

    Dfa formula(const FormulaAst& f, bool root = false) {
        switch (f.kind) {
            case FormulaAst::Compare: {
                auto t0 = Clock::now();
                Dfa r = atom_compare(f);
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::LetterCmp: {
                auto t0 = Clock::now();
                Dfa r = atom_letter(f);
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::Custom: {
                auto t0 = Clock::now();
                Dfa r = atom_custom(f);
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::Not: {
                Dfa a = formula(*f.f1);
                auto t0 = Clock::now();
                Dfa r = negate(a);
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::And:
            case FormulaAst::Or: {
                Dfa a = formula(*f.f1);
                Dfa b = formula(*f.f2);
                auto t0 = Clock::now();
                Dfa r = note(product(a, b, f.kind == FormulaAst::And ? BoolOp::And : BoolOp::Or, budget_));
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::Implies:
            case FormulaAst::Iff: {
                // a => b is ~a | b; a <=> b is (~a | b) & (~b | a)
                Dfa a = formula(*f.f1);
                Dfa b = formula(*f.f2);
                auto t0 = Clock::now();
                Dfa r = note(product(negate(a), b, BoolOp::Or, budget_));
                if (f.kind == FormulaAst::Iff)
                    r = conj(r, note(product(negate(b), a, BoolOp::Or, budget_)));
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::Exists: {
                Dfa a = formula(*f.f1);
                auto t0 = Clock::now();
                Dfa r = project_all(std::move(a), f.vars);
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
            case FormulaAst::ForAll: {
                Dfa a = formula(*f.f1);
                auto t0 = Clock::now();
                Dfa r = negate(project_all(negate(std::move(a)), f.vars));
                if (root) r = clean(std::move(r));
                log_step(f, r, t0);
                return r;
            }
        }
        throw SemanticError("bad formula");
    }

    const CompileEnv& env_;
    const CompileOptions& opts_;
    Budget budget_;
    CompileLog log_;
    int fresh_counter_ = 0;
};

} // namespace detail

inline CompileResult compile(const FormulaAst& f, const CompileEnv& env, const CompileOptions& opts = {}) {
    return detail::Compiler(env, opts).run(f);
}
inline CompileResult compile(const FormulaPtr& f, const CompileEnv& env, const CompileOptions& opts = {}) {
    return compile(*f, env, opts);
}
inline CompileResult compile(const std::string& text, const CompileEnv& env, const CompileOptions& opts = {}) {
    return compile(parse_formula(text), env, opts);
}

// Truth of a closed formula: the zero-track result accepts the empty word.
inline bool decide(const FormulaAst& f, const CompileEnv& env, const CompileOptions& opts = {}) {
    CompileResult r = compile(f, env, opts);
    if (!r.dfa.tracks.empty()) {
        std::string vars;
        for (const auto& t : r.dfa.tracks) vars += (vars.empty() ? "" : ", ") + t;
        throw SemanticError("formula is not closed; free variables: " + vars);
    }
    return r.dfa.accepting[r.dfa.initial] != 0;
}
inline bool decide(const std::string& text, const CompileEnv& env, const CompileOptions& opts = {}) {
    return decide(*parse_formula(text), env, opts);
}

// The self-checks for a numeration system: addition is total and single
// valued, associative, has 0 as identity, and steps by exactly one.
struct NumerationCheck {
    std::string name;
    std::string predicate;
    bool ok = false;
};

inline std::vector<NumerationCheck> numeration_checks(const NumerationBundle& bundle,
                                                      const CompileOptions& opts = {}) {
    CompileEnv env;
    env.numsys = bundle;
    env.relations["add"] = bundle.add;
    std::vector<NumerationCheck> checks = {
        {"totality", "Ax Ay Ez add(x, y, z)", false},
        {"uniqueness", "Ax Ay Az Aw (add(x, y, z) & add(x, y, w)) => z = w", false},
        {"associativity", "Ax Ay Az Ar As At (add(x, y, r) & add(r, z, t) & add(y, z, s)) => add(x, s, t)", false},
        {"identity", "Ax Ay add(x, 0, y) <=> x = y", false},
        {"successor", "Ax Ay add(x, 1, y) => (x < y & ~Ez (x < z & z < y))", false},
    };
    for (auto& c : checks) c.ok = decide(c.predicate, env, opts);
    return checks;
}

} // namespace fibra
