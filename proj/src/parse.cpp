#include "jetlab/parse.hpp"

#include <cctype>
#include <optional>

namespace jetlab {

namespace {

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    size_t pos; // 0-based offset into the source text
};

struct Lexer {
    const std::string& src;
    size_t at = 0;

    [[noreturn]] void fail(size_t pos, const std::string& msg) const {
        throw SyntaxError("syntax error at column " + std::to_string(pos + 1) + ": " + msg);
    }

    Token next() {
        while (at < src.size() && std::isspace((unsigned char)src[at]))
            ++at;
        size_t p = at;
        if (at == src.size())
            return {Tok::End, "", p};
        char c = src[at];
        if (std::isdigit((unsigned char)c)) {
            while (at < src.size() && std::isdigit((unsigned char)src[at]))
                ++at;
            return {Tok::Num, src.substr(p, at - p), p};
        }
        if (std::isalpha((unsigned char)c)) {
            while (at < src.size() &&
                   (std::isalnum((unsigned char)src[at]) || src[at] == '_'))
                ++at;
            return {Tok::Ident, src.substr(p, at - p), p};
        }
        ++at;
        switch (c) {
        case '+': return {Tok::Plus, "+", p};
        case '-': return {Tok::Minus, "-", p};
        case '*': return {Tok::Star, "*", p};
        case '/': return {Tok::Slash, "/", p};
        case '^': return {Tok::Caret, "^", p};
        case '(': return {Tok::LParen, "(", p};
        case ')': return {Tok::RParen, ")", p};
        default: fail(p, std::string("unexpected character '") + c + "'");
        }
    }
};

struct Parser {
    const Context& ctx;
    Lexer lex;
    Token cur;

    Parser(const std::string& text, const Context& c) : ctx(c), lex{text} { cur = lex.next(); }

    void advance() { cur = lex.next(); }

    [[noreturn]] void fail(const std::string& msg) const { lex.fail(cur.pos, msg); }

    DiffPoly expr() {
        bool neg = false;
        if (cur.kind == Tok::Minus) {
            neg = true;
            advance();
        }
        DiffPoly r = term();
        if (neg)
            r = -r;
        while (cur.kind == Tok::Plus || cur.kind == Tok::Minus) {
            bool minus = cur.kind == Tok::Minus;
            advance();
            DiffPoly t = term();
            if (minus)
                r -= t;
            else
                r += t;
        }
        return r;
    }

    DiffPoly term() {
        DiffPoly r = factor();
        while (cur.kind == Tok::Star || cur.kind == Tok::Slash) {
            bool div = cur.kind == Tok::Slash;
            size_t opos = cur.pos;
            advance();
            DiffPoly f = factor();
            if (div) {
                if (!f.is_constant() || f.is_zero())
                    lex.fail(opos, "division requires a nonzero constant divisor");
                r = r * (Rat(1) / f.constant_value());
            } else {
                r = r * f;
            }
        }
        return r;
    }

    DiffPoly factor() {
        DiffPoly base = primary();
        if (cur.kind == Tok::Caret) {
            advance();
            if (cur.kind != Tok::Num)
                fail("exponent must be a nonnegative integer literal");
            unsigned e = (unsigned)std::stoul(cur.text);
            advance();
            return base.pow(e);
        }
        return base;
    }

    DiffPoly primary() {
        switch (cur.kind) {
        case Tok::Num: {
            Rat c(cur.text);
            advance();
            return DiffPoly::constant(c);
        }
        case Tok::Ident: {
            std::string name = cur.text;
            size_t pos = cur.pos;
            advance();
            try {
                return DiffPoly::var(parse_jetvar(name, ctx));
            } catch (const SemanticError&) {
                throw SemanticError("unknown identifier '" + name + "' at column " +
                                    std::to_string(pos + 1));
            }
        }
        case Tok::LParen: {
            advance();
            DiffPoly r = expr();
            if (cur.kind != Tok::RParen)
                fail("expected ')'");
            advance();
            return r;
        }
        default:
            fail("expected a number, identifier or '('");
        }
    }
};

// Greedily read a derivative suffix as a word in the independent names.
std::optional<MultiIndex> read_suffix(const std::string& s, const Context& ctx) {
    MultiIndex mi;
    size_t at = 0;
    while (at < s.size()) {
        int best = -1;
        size_t best_len = 0;
        for (int i = 0; i < ctx.n(); ++i) {
            const std::string& nm = ctx.indep[i];
            if (nm.size() > best_len && s.compare(at, nm.size(), nm) == 0) {
                best = i;
                best_len = nm.size();
            }
        }
        if (best < 0)
            return std::nullopt;
        mi.push_back(best);
        at += best_len;
    }
    return mi_sorted(std::move(mi));
}

} // namespace

JetVar parse_jetvar(const std::string& ident, const Context& ctx) {
    int i = ctx.indep_index(ident);
    if (i >= 0)
        return JetVar::x(i);
    int a = ctx.dep_index(ident);
    if (a >= 0)
        return JetVar::u(a);
    // longest dependent prefix followed by '_' and a suffix word
    int best_a = -1;
    MultiIndex best_mi;
    size_t best_len = 0;
    for (int d = 0; d < ctx.m(); ++d) {
        const std::string& nm = ctx.dep[d];
        if (nm.size() + 1 >= ident.size() || nm.size() < best_len)
            continue;
        if (ident.compare(0, nm.size(), nm) != 0 || ident[nm.size()] != '_')
            continue;
        auto mi = read_suffix(ident.substr(nm.size() + 1), ctx);
        if (mi) {
            best_a = d;
            best_mi = *mi;
            best_len = nm.size();
        }
    }
    if (best_a >= 0)
        return JetVar::u(best_a, best_mi);
    throw SemanticError("unknown identifier '" + ident + "'");
}

DiffPoly parse_expr(const std::string& text, const Context& ctx) {
    Parser p(text, ctx);
    DiffPoly r = p.expr();
    if (p.cur.kind != Tok::End)
        p.fail("unexpected trailing input (implicit multiplication is not allowed)");
    return r;
}

void check_name(const std::string& name) {
    if (name.empty() || !std::isalpha((unsigned char)name[0]))
        throw SyntaxError("variable name '" + name + "' must start with a letter");
    for (char c : name)
        if (!std::isalnum((unsigned char)c))
            throw SyntaxError("variable name '" + name + "' must be alphanumeric");
}

} // namespace jetlab
