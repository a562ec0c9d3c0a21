#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fibra/errors.hpp"

namespace fibra {

// ---------------------------------------------------------------- tokens --

enum class Tok {
    Ident, Nat,
    Not, And, Or, Implies, Iff,
    Eq, Neq, Lt, Le, Gt, Ge,
    Plus, Minus, Star,
    LParen, RParen, LBracket, RBracket, Comma,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    uint64_t value = 0;
    int pos = 0; // character offset in the input
};

inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    auto push = [&](Tok k, size_t start, size_t len) {
        out.push_back({k, text.substr(start, len), 0, static_cast<int>(start)});
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
            push(Tok::Ident, start, i - start);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            uint64_t v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                v = v * 10 + (text[i] - '0');
                ++i;
            }
            push(Tok::Nat, start, i - start);
            out.back().value = v;
        } else if (text.compare(i, 3, "<=>") == 0) { push(Tok::Iff, start, 3); i += 3; }
        else if (text.compare(i, 2, "=>") == 0) { push(Tok::Implies, start, 2); i += 2; }
        else if (text.compare(i, 2, "!=") == 0) { push(Tok::Neq, start, 2); i += 2; }
        else if (text.compare(i, 2, "<=") == 0) { push(Tok::Le, start, 2); i += 2; }
        else if (text.compare(i, 2, ">=") == 0) { push(Tok::Ge, start, 2); i += 2; }
        else {
            Tok k;
            switch (c) {
                case '~': k = Tok::Not; break;
                case '&': k = Tok::And; break;
                case '|': k = Tok::Or; break;
                case '=': k = Tok::Eq; break;
                case '<': k = Tok::Lt; break;
                case '>': k = Tok::Gt; break;
                case '+': k = Tok::Plus; break;
                case '-': k = Tok::Minus; break;
                case '*': k = Tok::Star; break;
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                case '[': k = Tok::LBracket; break;
                case ']': k = Tok::RBracket; break;
                case ',': k = Tok::Comma; break;
                default:
                    throw SyntaxError("unexpected character '" + std::string(1, c) + "'", 1, static_cast<int>(i));
            }
            push(k, start, 1);
            ++i;
        }
    }
    out.push_back({Tok::End, "", 0, static_cast<int>(text.size())});
    return out;
}

// ------------------------------------------------------------------- AST --

struct TermAst;
using TermPtr = std::shared_ptr<const TermAst>;

struct TermAst {
    enum Kind { Variable, Constant, Sum, Difference, ConstMultiple } kind;
    std::string name;     // Variable
    uint64_t value = 0;   // Constant value or multiple coefficient
    TermPtr lhs, rhs;     // Sum/Difference operands; ConstMultiple uses rhs

    static TermPtr variable(std::string n) {
        auto t = std::make_shared<TermAst>();
        t->kind = Variable;
        t->name = std::move(n);
        return t;
    }
    static TermPtr constant(uint64_t v) {
        auto t = std::make_shared<TermAst>();
        t->kind = Constant;
        t->value = v;
        return t;
    }
    static TermPtr sum(TermPtr a, TermPtr b) {
        auto t = std::make_shared<TermAst>();
        t->kind = Sum;
        t->lhs = std::move(a);
        t->rhs = std::move(b);
        return t;
    }
    static TermPtr difference(TermPtr a, TermPtr b) {
        auto t = std::make_shared<TermAst>();
        t->kind = Difference;
        t->lhs = std::move(a);
        t->rhs = std::move(b);
        return t;
    }
    static TermPtr const_multiple(uint64_t c, TermPtr a) {
        auto t = std::make_shared<TermAst>();
        t->kind = ConstMultiple;
        t->value = c;
        t->rhs = std::move(a);
        return t;
    }
};

enum class CompareOp { Eq, Neq, Lt, Le, Gt, Ge };

inline const char* compare_text(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Neq: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

// One side of a letter comparison: a literal output letter or an indexing
// W[t1]...[tk] into a named DFAO.
struct LetterExpr {
    bool is_literal = false;
    long long literal = 0;
    std::string word;
    std::vector<TermPtr> indices;
};

struct FormulaAst;
using FormulaPtr = std::shared_ptr<const FormulaAst>;

struct FormulaAst {
    enum Kind { Compare, LetterCmp, Custom, Not, And, Or, Implies, Iff, Exists, ForAll } kind;
    CompareOp op = CompareOp::Eq;   // Compare / LetterCmp
    TermPtr t1, t2;                 // Compare
    LetterExpr l1, l2;              // LetterCmp
    std::string name;               // Custom relation
    std::vector<TermPtr> args;      // Custom arguments
    FormulaPtr f1, f2;              // connective operands / quantifier body in f1
    std::vector<std::string> vars;  // quantified variables

    static std::shared_ptr<FormulaAst> make(Kind k) {
        auto f = std::make_shared<FormulaAst>();
        f->kind = k;
        return f;
    }
    static FormulaPtr compare(TermPtr a, CompareOp op, TermPtr b) {
        auto f = make(Compare);
        f->op = op;
        f->t1 = std::move(a);
        f->t2 = std::move(b);
        return f;
    }
    static FormulaPtr letter_cmp(LetterExpr a, CompareOp op, LetterExpr b) {
        auto f = make(LetterCmp);
        f->op = op;
        f->l1 = std::move(a);
        f->l2 = std::move(b);
        return f;
    }
    static FormulaPtr custom(std::string name, std::vector<TermPtr> args) {
        auto f = make(Custom);
        f->name = std::move(name);
        f->args = std::move(args);
        return f;
    }
    static FormulaPtr unary(Kind k, FormulaPtr a) {
        auto f = make(k);
        f->f1 = std::move(a);
        return f;
    }
    static FormulaPtr binary(Kind k, FormulaPtr a, FormulaPtr b) {
        auto f = make(k);
        f->f1 = std::move(a);
        f->f2 = std::move(b);
        return f;
    }
    static FormulaPtr quantifier(Kind k, std::vector<std::string> vars, FormulaPtr body) {
        auto f = make(k);
        f->vars = std::move(vars);
        f->f1 = std::move(body);
        return f;
    }
};

// ---------------------------------------------------------------- parser --

namespace detail {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    FormulaPtr parse() {
        FormulaPtr f = formula();
        expect(Tok::End, "end of input");
        return f;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& peek(int d = 1) const { return toks_[std::min(i_ + d, toks_.size() - 1)]; }
    void advance() { if (cur().kind != Tok::End) ++i_; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg + " at '" + (cur().kind == Tok::End ? std::string("<end>") : cur().text) + "'", 1, cur().pos);
    }
    void expect(Tok k, const char* what) {
        if (cur().kind != k) fail(std::string("expected ") + what);
        advance();
    }

    // Fused quantifier tokens: a leading E or A followed by a variable name,
    // as in Ei or At.
    static bool fused_quantifier(const Token& t) {
        return t.kind == Tok::Ident && t.text.size() >= 2 && (t.text[0] == 'E' || t.text[0] == 'A') &&
               (std::islower(static_cast<unsigned char>(t.text[1])) || t.text[1] == '_' ||
                std::isdigit(static_cast<unsigned char>(t.text[1])));
    }
    static bool bare_quantifier(const Token& t) {
        return t.kind == Tok::Ident && (t.text == "E" || t.text == "A");
    }

    FormulaPtr formula() { return iff(); }

    FormulaPtr iff() {
        FormulaPtr f = implies();
        while (cur().kind == Tok::Iff) {
            advance();
            f = FormulaAst::binary(FormulaAst::Iff, f, implies());
        }
        return f;
    }
    FormulaPtr implies() {
        FormulaPtr f = disj();
        if (cur().kind == Tok::Implies) {
            advance();
            return FormulaAst::binary(FormulaAst::Implies, f, implies());
        }
        return f;
    }
    FormulaPtr disj() {
        FormulaPtr f = conj();
        while (cur().kind == Tok::Or) {
            advance();
            f = FormulaAst::binary(FormulaAst::Or, f, conj());
        }
        return f;
    }
    FormulaPtr conj() {
        FormulaPtr f = unary();
        while (cur().kind == Tok::And) {
            advance();
            f = FormulaAst::binary(FormulaAst::And, f, unary());
        }
        return f;
    }

    FormulaPtr unary() {
        if (cur().kind == Tok::Not) {
            advance();
            return FormulaAst::unary(FormulaAst::Not, unary());
        }
        if (bare_quantifier(cur()) && peek().kind != Tok::LParen) return quantified(cur().text[0], {});
        if (fused_quantifier(cur())) {
            char q = cur().text[0];
            std::string var = cur().text.substr(1);
            advance();
            return quantified(q, {std::move(var)});
        }
        return atom();
    }

    FormulaPtr quantified(char q, std::vector<std::string> vars) {
        if (vars.empty()) {
            advance(); // the E or A token
            if (cur().kind != Tok::Ident) fail("expected quantified variable");
            vars.push_back(cur().text);
            advance();
        }
        for (;;) {
            if (cur().kind == Tok::Comma && peek().kind == Tok::Ident) {
                advance();
                vars.push_back(cur().text);
                advance();
            } else if (cur().kind == Tok::Ident && peek().kind == Tok::Ident &&
                       !fused_quantifier(cur()) && !bare_quantifier(cur())) {
                // "E i j body": identifiers keep joining the variable list
                // until one starts the body
                vars.push_back(cur().text);
                advance();
            } else {
                break;
            }
        }
        // the body extends maximally to the right
        FormulaPtr body = formula();
        return FormulaAst::quantifier(q == 'E' ? FormulaAst::Exists : FormulaAst::ForAll, std::move(vars), body);
    }

    FormulaPtr atom() {
        if (cur().kind == Tok::Ident && peek().kind == Tok::LParen) {
            if (bare_quantifier(cur())) fail("E and A are quantifiers, not relation names");
            std::string name = cur().text;
            advance();
            advance();
            std::vector<TermPtr> args;
            if (cur().kind != Tok::RParen) {
                args.push_back(term());
                while (cur().kind == Tok::Comma) {
                    advance();
                    args.push_back(term());
                }
            }
            expect(Tok::RParen, "')'");
            return FormulaAst::custom(std::move(name), std::move(args));
        }
        size_t save = i_;
        try {
            return comparison();
        } catch (const SyntaxError&) {
            if (toks_[save].kind != Tok::LParen) throw;
            i_ = save;
        }
        expect(Tok::LParen, "'('");
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        return f;
    }

    struct Side {
        bool is_letter;
        LetterExpr letter;
        TermPtr term;
    };

    Side side() {
        if (cur().kind == Tok::Minus && peek().kind == Tok::Nat) {
            advance();
            LetterExpr e;
            e.is_literal = true;
            e.literal = -static_cast<long long>(cur().value);
            advance();
            return {true, std::move(e), nullptr};
        }
        if (cur().kind == Tok::Ident && peek().kind == Tok::LBracket) {
            LetterExpr e;
            e.word = cur().text;
            advance();
            while (cur().kind == Tok::LBracket) {
                advance();
                e.indices.push_back(term());
                expect(Tok::RBracket, "']'");
            }
            return {true, std::move(e), nullptr};
        }
        return {false, {}, term()};
    }

    CompareOp cmp_op() {
        switch (cur().kind) {
            case Tok::Eq: advance(); return CompareOp::Eq;
            case Tok::Neq: advance(); return CompareOp::Neq;
            case Tok::Lt: advance(); return CompareOp::Lt;
            case Tok::Le: advance(); return CompareOp::Le;
            case Tok::Gt: advance(); return CompareOp::Gt;
            case Tok::Ge: advance(); return CompareOp::Ge;
            default: fail("expected comparison operator");
        }
    }

    static CompareOp mirror(CompareOp op) {
        switch (op) {
            case CompareOp::Lt: return CompareOp::Gt;
            case CompareOp::Le: return CompareOp::Ge;
            case CompareOp::Gt: return CompareOp::Lt;
            case CompareOp::Ge: return CompareOp::Le;
            default: return op;
        }
    }

    FormulaPtr comparison() {
        Side lhs = side();
        CompareOp op = cmp_op();
        Side rhs = side();
        if (!lhs.is_letter && !rhs.is_letter) return FormulaAst::compare(lhs.term, op, rhs.term);
        auto to_letter = [&](Side& s) -> LetterExpr {
            if (s.is_letter) return std::move(s.letter);
            if (s.term->kind == TermAst::Constant) {
                LetterExpr e;
                e.is_literal = true;
                e.literal = static_cast<long long>(s.term->value);
                return e;
            }
            fail("letter comparisons take a letter literal or another indexing");
        };
        // normalize a lone literal to the right-hand side
        if (lhs.is_letter && lhs.letter.is_literal && rhs.is_letter && !rhs.letter.is_literal)
            return FormulaAst::letter_cmp(std::move(rhs.letter), mirror(op), std::move(lhs.letter));
        if (!lhs.is_letter || lhs.letter.is_literal) {
            LetterExpr l = to_letter(lhs);
            LetterExpr r = to_letter(rhs);
            if (l.is_literal && !r.is_literal) return FormulaAst::letter_cmp(std::move(r), mirror(op), std::move(l));
            return FormulaAst::letter_cmp(std::move(l), op, std::move(r));
        }
        return FormulaAst::letter_cmp(std::move(lhs.letter), op, to_letter(rhs));
    }

    TermPtr term() {
        TermPtr t = mul();
        for (;;) {
            if (cur().kind == Tok::Plus) {
                advance();
                t = TermAst::sum(t, mul());
            } else if (cur().kind == Tok::Minus) {
                advance();
                t = TermAst::difference(t, mul());
            } else {
                return t;
            }
        }
    }
    TermPtr mul() {
        TermPtr t = primary();
        while (cur().kind == Tok::Star) {
            advance();
            TermPtr r = primary();
            if (t->kind == TermAst::Constant && r->kind == TermAst::Constant)
                t = TermAst::constant(t->value * r->value);
            else if (t->kind == TermAst::Constant)
                t = TermAst::const_multiple(t->value, r);
            else if (r->kind == TermAst::Constant)
                t = TermAst::const_multiple(r->value, t);
            else
                fail("one side of '*' must be a constant");
        }
        return t;
    }
    TermPtr primary() {
        if (cur().kind == Tok::Nat) {
            uint64_t v = cur().value;
            advance();
            return TermAst::constant(v);
        }
        if (cur().kind == Tok::Ident) {
            if (peek().kind == Tok::LBracket) fail("word indexing is not a term");
            std::string n = cur().text;
            advance();
            return TermAst::variable(std::move(n));
        }
        if (cur().kind == Tok::LParen) {
            advance();
            TermPtr t = term();
            expect(Tok::RParen, "')'");
            return t;
        }
        fail("expected a term");
    }

    std::vector<Token> toks_;
    size_t i_ = 0;
};

} // namespace detail

inline FormulaPtr parse(const std::vector<Token>& tokens) { return detail::Parser(tokens).parse(); }
inline FormulaPtr parse_formula(const std::string& text) { return parse(tokenize(text)); }

// ------------------------------------------------------------- formatter --

namespace detail {

inline void fmt_term(const TermAst& t, int parent, std::string& out) {
    switch (t.kind) {
        case TermAst::Variable: out += t.name; return;
        case TermAst::Constant: out += std::to_string(t.value); return;
        case TermAst::Sum:
        case TermAst::Difference: {
            bool paren = parent > 1;
            if (paren) out += '(';
            fmt_term(*t.lhs, 1, out);
            out += t.kind == TermAst::Sum ? " + " : " - ";
            fmt_term(*t.rhs, 2, out); // right operand binds tighter: a - (b + c) keeps parens
            if (paren) out += ')';
            return;
        }
        case TermAst::ConstMultiple: {
            bool paren = parent > 2;
            if (paren) out += '(';
            out += std::to_string(t.value);
            out += " * ";
            fmt_term(*t.rhs, 3, out);
            if (paren) out += ')';
            return;
        }
    }
}

inline void fmt_letter(const LetterExpr& e, std::string& out) {
    if (e.is_literal) {
        out += std::to_string(e.literal);
        return;
    }
    out += e.word;
    for (const auto& ix : e.indices) {
        out += '[';
        fmt_term(*ix, 0, out);
        out += ']';
    }
}

// Precedence levels: <=> 1, => 2, | 3, & 4, ~ 5, atoms 6. Quantifiers print
// without parentheses only on the rightmost spine, where their maximal-right
// body reparses identically.
inline void fmt_formula(const FormulaAst& f, int parent, bool rightmost, std::string& out) {
    auto binop = [&](int prec, const char* sym, bool right_assoc) {
        bool paren = parent > prec;
        if (paren) out += '(';
        fmt_formula(*f.f1, right_assoc ? prec + 1 : prec, false, out);
        out += ' ';
        out += sym;
        out += ' ';
        // a closing ')' bounds the right child, so quantifiers may print bare
        fmt_formula(*f.f2, right_assoc ? prec : prec + 1, paren || rightmost, out);
        if (paren) out += ')';
    };
    switch (f.kind) {
        case FormulaAst::Compare:
            fmt_term(*f.t1, 0, out);
            out += ' ';
            out += compare_text(f.op);
            out += ' ';
            fmt_term(*f.t2, 0, out);
            return;
        case FormulaAst::LetterCmp:
            fmt_letter(f.l1, out);
            out += ' ';
            out += compare_text(f.op);
            out += ' ';
            fmt_letter(f.l2, out);
            return;
        case FormulaAst::Custom: {
            out += f.name;
            out += '(';
            for (size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ", ";
                fmt_term(*f.args[i], 0, out);
            }
            out += ')';
            return;
        }
        case FormulaAst::Not: {
            bool paren = parent > 5;
            if (paren) out += '(';
            out += '~';
            fmt_formula(*f.f1, 5, paren || rightmost, out);
            if (paren) out += ')';
            return;
        }
        case FormulaAst::And: binop(4, "&", false); return;
        case FormulaAst::Or: binop(3, "|", false); return;
        case FormulaAst::Implies: binop(2, "=>", true); return;
        case FormulaAst::Iff: binop(1, "<=>", false); return;
        case FormulaAst::Exists:
        case FormulaAst::ForAll: {
            bool paren = !rightmost;
            if (paren) out += '(';
            char q = f.kind == FormulaAst::Exists ? 'E' : 'A';
            bool fusible = f.vars.size() == 1 && !f.vars[0].empty() &&
                           (std::islower(static_cast<unsigned char>(f.vars[0][0])) || f.vars[0][0] == '_');
            out += q;
            if (fusible) {
                out += f.vars[0];
            } else {
                for (size_t i = 0; i < f.vars.size(); ++i) {
                    out += i ? ", " : " ";
                    out += f.vars[i];
                }
            }
            out += ' ';
            fmt_formula(*f.f1, 0, true, out);
            if (paren) out += ')';
            return;
        }
    }
}

} // namespace detail

inline std::string format(const FormulaAst& f) {
    std::string out;
    detail::fmt_formula(f, 0, true, out);
    return out;
}
inline std::string format(const FormulaPtr& f) { return format(*f); }

inline std::string format(const TermAst& t) {
    std::string out;
    detail::fmt_term(t, 0, out);
    return out;
}

// ------------------------------------------------- structural comparison --

inline bool ast_equal(const TermPtr& a, const TermPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TermAst::Variable: return a->name == b->name;
        case TermAst::Constant: return a->value == b->value;
        case TermAst::Sum:
        case TermAst::Difference: return ast_equal(a->lhs, b->lhs) && ast_equal(a->rhs, b->rhs);
        case TermAst::ConstMultiple: return a->value == b->value && ast_equal(a->rhs, b->rhs);
    }
    return false;
}

inline bool letter_equal(const LetterExpr& a, const LetterExpr& b) {
    if (a.is_literal != b.is_literal) return false;
    if (a.is_literal) return a.literal == b.literal;
    if (a.word != b.word || a.indices.size() != b.indices.size()) return false;
    for (size_t i = 0; i < a.indices.size(); ++i)
        if (!ast_equal(a.indices[i], b.indices[i])) return false;
    return true;
}

inline bool ast_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case FormulaAst::Compare:
            return a->op == b->op && ast_equal(a->t1, b->t1) && ast_equal(a->t2, b->t2);
        case FormulaAst::LetterCmp:
            return a->op == b->op && letter_equal(a->l1, b->l1) && letter_equal(a->l2, b->l2);
        case FormulaAst::Custom: {
            if (a->name != b->name || a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!ast_equal(a->args[i], b->args[i])) return false;
            return true;
        }
        case FormulaAst::Not: return ast_equal(a->f1, b->f1);
        case FormulaAst::And:
        case FormulaAst::Or:
        case FormulaAst::Implies:
        case FormulaAst::Iff: return ast_equal(a->f1, b->f1) && ast_equal(a->f2, b->f2);
        case FormulaAst::Exists:
        case FormulaAst::ForAll: return a->vars == b->vars && ast_equal(a->f1, b->f1);
    }
    return false;
}

// Free variables in sorted order.
namespace detail {
inline void term_vars(const TermPtr& t, std::set<std::string>& out) {
    if (!t) return;
    if (t->kind == TermAst::Variable) out.insert(t->name);
    term_vars(t->lhs, out);
    term_vars(t->rhs, out);
}
inline void formula_vars(const FormulaAst& f, std::set<std::string> bound, std::set<std::string>& out) {
    switch (f.kind) {
        case FormulaAst::Compare: {
            std::set<std::string> vs;
            term_vars(f.t1, vs);
            term_vars(f.t2, vs);
            for (auto& v : vs)
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case FormulaAst::LetterCmp: {
            std::set<std::string> vs;
            for (auto& ix : f.l1.indices) term_vars(ix, vs);
            for (auto& ix : f.l2.indices) term_vars(ix, vs);
            for (auto& v : vs)
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case FormulaAst::Custom: {
            std::set<std::string> vs;
            for (auto& a : f.args) term_vars(a, vs);
            for (auto& v : vs)
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case FormulaAst::Not: formula_vars(*f.f1, bound, out); return;
        case FormulaAst::And:
        case FormulaAst::Or:
        case FormulaAst::Implies:
        case FormulaAst::Iff:
            formula_vars(*f.f1, bound, out);
            formula_vars(*f.f2, bound, out);
            return;
        case FormulaAst::Exists:
        case FormulaAst::ForAll: {
            for (auto& v : f.vars) {
                if (bound.count(v))
                    throw SemanticError("variable '" + v + "' is already bound on this path");
                bound.insert(v);
            }
            formula_vars(*f.f1, bound, out);
            return;
        }
    }
}
} // namespace detail

inline std::vector<std::string> free_variables(const FormulaAst& f) {
    std::set<std::string> out;
    detail::formula_vars(f, {}, out);
    return {out.begin(), out.end()};
}

} // namespace fibra
