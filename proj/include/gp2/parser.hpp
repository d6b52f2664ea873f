#pragma once

// Concrete syntax for sentences.
//
//   unit  := "forall" var [":" atom] "." unit
//          | "exists" var [":" atom] "." unit
//          | "!" unit | "(" chain ")" | "true" | "false" | atom | lpq
//   chain := unit { op unit }            one operator kind per chain; "->" at most once
//   atom  := NAME "(" var ")" | NAME "(" var "," var ")" | var "=" var | var "!=" var
//   lpq   := ["-"] term { ("+"|"-") term } cmp ["-"] INT
//   term  := [INT "*"] "#" "[" NAME "(" var "," var ")" "]" "{" chain "}"
//   cmp   := "=" | "!=" | "<=" | ">=" | "<" | ">" | "=mod" INT | "!=mod" INT
//
// An input file may start with declarations "unary A, B;" and "binary R;".
// Without declarations the signature is inferred from usage.

#include "gp2/bigint.hpp"
#include "gp2/errors.hpp"
#include "gp2/formula.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gp2 {

namespace detail {

enum class Tok : std::uint8_t {
    End, Name, Int, LParen, RParen, LBracket, RBracket, LBrace, RBrace, Comma, Dot, Colon, Semicolon,
    Bang, Amp, Pipe, Arrow, Eq, Ne, Le, Ge, Lt, Gt, Hash, Star, Plus, Minus
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto push = [&](Tok kind, std::size_t len) {
        out.push_back(Token{kind, std::string(src.substr(i, len)), line, col});
        advance(len);
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%') {  // comment to end of line
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < src.size()) {
                char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++j;
                } else if (d == '#' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                    j += 2;
                } else {
                    break;
                }
            }
            push(Tok::Name, j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Tok::Int, j - i);
            continue;
        }
        auto two = src.substr(i, 2);
        if (two == "->") { push(Tok::Arrow, 2); continue; }
        if (two == "!=") { push(Tok::Ne, 2); continue; }
        if (two == "<=") { push(Tok::Le, 2); continue; }
        if (two == ">=") { push(Tok::Ge, 2); continue; }
        switch (c) {
            case '(': push(Tok::LParen, 1); continue;
            case ')': push(Tok::RParen, 1); continue;
            case '[': push(Tok::LBracket, 1); continue;
            case ']': push(Tok::RBracket, 1); continue;
            case '{': push(Tok::LBrace, 1); continue;
            case '}': push(Tok::RBrace, 1); continue;
            case ',': push(Tok::Comma, 1); continue;
            case '.': push(Tok::Dot, 1); continue;
            case ':': push(Tok::Colon, 1); continue;
            case ';': push(Tok::Semicolon, 1); continue;
            case '!': push(Tok::Bang, 1); continue;
            case '&': push(Tok::Amp, 1); continue;
            case '|': push(Tok::Pipe, 1); continue;
            case '=': push(Tok::Eq, 1); continue;
            case '<': push(Tok::Lt, 1); continue;
            case '>': push(Tok::Gt, 1); continue;
            case '#': push(Tok::Hash, 1); continue;
            case '*': push(Tok::Star, 1); continue;
            case '+': push(Tok::Plus, 1); continue;
            case '-': push(Tok::Minus, 1); continue;
            default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back(Token{Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    // With infer set, unknown names are added to sig on first use.
    Parser(std::vector<Token> tokens, Signature& sig, bool infer)
        : toks_(std::move(tokens)), sig_(sig), infer_(infer) {}

    void declarations() {
        while (peek().kind == Tok::Name && (peek().text == "unary" || peek().text == "binary")) {
            bool unary = next().text == "unary";
            declared_ = true;
            do {
                const Token& t = expect(Tok::Name, "predicate name");
                try {
                    if (unary)
                        sig_.add_unary(t.text);
                    else
                        sig_.add_binary(t.text);
                } catch (const SignatureError& e) {
                    throw ParseError(e.what(), t.line, t.column);
                }
            } while (accept(Tok::Comma));
            expect(Tok::Semicolon, "';'");
        }
        if (declared_) infer_ = false;
    }

    Formula sentence() {
        Formula f = chain();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after sentence");
        if (f.free_vars() != 0) {
            std::string v = (f.free_vars() & var_bit(Var::X)) ? "x" : "y";
            throw ParseError("variable " + v + " occurs free; a sentence must be closed", 1, 1);
        }
        return f;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) {
            if (peek().kind == Tok::End) fail(std::string("expected ") + what + " but input ended");
            fail(std::string("expected ") + what + " but found '" + peek().text + "'");
        }
        return next();
    }

    Var var() {
        const Token& t = peek();
        if (t.kind != Tok::Name) fail("expected variable x or y");
        if (t.text != "x" && t.text != "y") fail("variable '" + t.text + "' is not allowed; only x and y exist");
        next();
        return t.text == "x" ? Var::X : Var::Y;
    }

    BigInt integer(const char* what) {
        const Token& t = expect(Tok::Int, what);
        return BigInt(t.text);
    }

    void resolve(const Token& name, std::size_t arity) {
        if (is_reserved_word(name.text))
            throw ParseError("'" + name.text + "' is a reserved word", name.line, name.column);
        bool is_unary = sig_.unary_index(name.text).has_value();
        bool is_binary = sig_.binary_index(name.text).has_value();
        if (!is_unary && !is_binary) {
            if (!infer_) throw ParseError("unknown predicate '" + name.text + "'", name.line, name.column);
            if (arity == 1)
                sig_.add_unary(name.text);
            else
                sig_.add_binary(name.text);
            return;
        }
        if ((arity == 1 && !is_unary) || (arity == 2 && !is_binary)) {
            throw ParseError("arity mismatch: '" + name.text + "' is " + (is_unary ? "unary" : "binary") +
                                 " but used with " + std::to_string(arity) + " argument(s)",
                             name.line, name.column);
        }
    }

    Atom atom() {
        if (peek().kind == Tok::Name && (peek().text == "x" || peek().text == "y")) {
            Var a = var();
            if (accept(Tok::Eq)) return Atom{Kind::Equal, {}, a, var()};
            fail("expected '=' after variable");
        }
        const Token name = expect(Tok::Name, "predicate name");
        expect(Tok::LParen, "'('");
        Var a = var();
        if (accept(Tok::Comma)) {
            Var b = var();
            expect(Tok::RParen, "')'");
            resolve(name, 2);
            return Atom{Kind::Binary, name.text, a, b};
        }
        expect(Tok::RParen, "')'");
        resolve(name, 1);
        return Atom{Kind::Unary, name.text, a, a};
    }

    Formula chain() {
        Formula first = unit();
        Tok op = peek().kind;
        if (op != Tok::Amp && op != Tok::Pipe && op != Tok::Arrow) return first;
        if (op == Tok::Arrow) {
            next();
            Formula rhs = unit();
            if (peek().kind == Tok::Arrow || peek().kind == Tok::Amp || peek().kind == Tok::Pipe)
                fail("mixed or chained '->' needs parentheses");
            return Formula::implies(first, rhs);
        }
        std::vector<Formula> parts{first};
        while (accept(op)) parts.push_back(unit());
        Tok k = peek().kind;
        if (k == Tok::Amp || k == Tok::Pipe || k == Tok::Arrow) fail("mixed connectives need parentheses");
        return op == Tok::Amp ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }

    Formula quantifier(bool universal) {
        Var v = var();
        std::optional<Atom> guard;
        if (accept(Tok::Colon)) guard = atom();
        expect(Tok::Dot, "'.'");
        Formula body = unit();
        return universal ? Formula::forall(v, guard, body) : Formula::exists(v, guard, body);
    }

    Formula unit() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Name:
                if (t.text == "forall") {
                    next();
                    return quantifier(true);
                }
                if (t.text == "exists") {
                    next();
                    return quantifier(false);
                }
                if (t.text == "true") {
                    next();
                    return Formula::truth();
                }
                if (t.text == "false") {
                    next();
                    return Formula::falsity();
                }
                if ((t.text == "x" || t.text == "y") && peek(1).kind == Tok::Ne) {
                    Var a = var();
                    next();
                    return Formula::not_equal(a, var());
                }
                return Formula::atom(atom());
            case Tok::Bang:
                next();
                return Formula::negate(unit());
            case Tok::LParen: {
                next();
                Formula f = chain();
                expect(Tok::RParen, "')'");
                return f;
            }
            case Tok::Int:
            case Tok::Hash:
            case Tok::Minus: return lpq();
            case Tok::End: fail("unexpected end of input");
            default: fail("unexpected '" + t.text + "'");
        }
    }

    CountTerm term(bool negative) {
        CountTerm ct;
        ct.coeff = 1;
        if (peek().kind == Tok::Int) {
            ct.coeff = integer("coefficient");
            expect(Tok::Star, "'*'");
        }
        if (negative) ct.coeff = -ct.coeff;
        expect(Tok::Hash, "'#'");
        expect(Tok::LBracket, "'['");
        const Token name = expect(Tok::Name, "binary predicate");
        expect(Tok::LParen, "'('");
        ct.from = var();
        expect(Tok::Comma, "','");
        ct.to = var();
        expect(Tok::RParen, "')'");
        if (ct.from == ct.to)
            throw ParseError("a counted edge must connect x and y", name.line, name.column);
        resolve(name, 2);
        ct.relation = name.text;
        expect(Tok::RBracket, "']'");
        expect(Tok::LBrace, "'{'");
        ct.inner = chain();
        expect(Tok::RBrace, "'}'");
        return ct;
    }

    Formula lpq() {
        LPQuantifier q;
        bool negative = accept(Tok::Minus);
        q.terms.push_back(term(negative));
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            negative = next().kind == Tok::Minus;
            q.terms.push_back(term(negative));
        }
        const Token cmp = next();
        switch (cmp.kind) {
            case Tok::Eq: q.rel = Relation::Eq; break;
            case Tok::Ne: q.rel = Relation::Ne; break;
            case Tok::Le: q.rel = Relation::Le; break;
            case Tok::Ge: q.rel = Relation::Ge; break;
            case Tok::Lt: q.rel = Relation::Lt; break;
            case Tok::Gt: q.rel = Relation::Gt; break;
            default: throw ParseError("expected comparison after counting terms", cmp.line, cmp.column);
        }
        if ((q.rel == Relation::Eq || q.rel == Relation::Ne) && peek().kind == Tok::Name && peek().text == "mod") {
            next();
            q.rel = q.rel == Relation::Eq ? Relation::ModEq : Relation::ModNe;
            const Token& m = peek();
            q.modulus = integer("modulus");
            if (q.modulus < 1) throw ParseError("modulus must be at least 1", m.line, m.column);
        }
        bool neg_rhs = accept(Tok::Minus);
        if (peek().kind != Tok::Int) fail("expected integer constant after comparison");
        q.rhs = integer("integer constant");
        if (neg_rhs) q.rhs = -q.rhs;
        return Formula::count(std::move(q));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Signature& sig_;
    bool infer_;
    bool declared_ = false;
};

}  // namespace detail

// Parses a sentence whose predicates must all resolve against sig.
inline Sentence parse(std::string_view text, const Signature& sig) {
    Signature s = sig;
    detail::Parser p(detail::tokenize(text), s, false);
    return p.sentence();
}

struct Problem {
    Signature sig;
    Sentence sentence;
};

// Parses an input file: optional declarations followed by one sentence.
// Without declarations the signature is inferred from usage.
inline Problem parse_problem(std::string_view text) {
    Problem out;
    detail::Parser p(detail::tokenize(text), out.sig, true);
    p.declarations();
    out.sentence = p.sentence();
    return out;
}

namespace detail {

inline void print_atom(std::ostream& os, const Atom& a) {
    switch (a.kind) {
        case Kind::Unary: os << a.name << '(' << var_char(a.first) << ')'; break;
        case Kind::Binary: os << a.name << '(' << var_char(a.first) << ',' << var_char(a.second) << ')'; break;
        case Kind::Equal: os << var_char(a.first) << " = " << var_char(a.second); break;
        default: break;
    }
}

inline void print(std::ostream& os, const Formula& f) {
    switch (f.kind()) {
        case Kind::True: os << "true"; return;
        case Kind::False: os << "false"; return;
        case Kind::Unary:
        case Kind::Binary:
        case Kind::Equal: print_atom(os, f.atom()); return;
        case Kind::Not: {
            const Formula& c = f.children()[0];
            if (c.kind() == Kind::Equal) {
                os << var_char(c.atom().first) << " != " << var_char(c.atom().second);
                return;
            }
            os << '!';
            print(os, c);
            return;
        }
        case Kind::And:
        case Kind::Or:
        case Kind::Implies: {
            const char* op = f.kind() == Kind::And ? " & " : f.kind() == Kind::Or ? " | " : " -> ";
            os << '(';
            for (std::size_t i = 0; i < f.children().size(); ++i) {
                if (i) os << op;
                print(os, f.children()[i]);
            }
            os << ')';
            return;
        }
        case Kind::Forall:
        case Kind::Exists:
            os << (f.kind() == Kind::Forall ? "forall " : "exists ") << var_char(f.bound());
            if (f.guard()) {
                os << " : ";
                print_atom(os, *f.guard());
            }
            os << " . ";
            print(os, f.body());
            return;
        case Kind::Count: {
            const LPQuantifier& q = f.count();
            for (std::size_t i = 0; i < q.terms.size(); ++i) {
                const CountTerm& t = q.terms[i];
                BigInt c = t.coeff;
                if (i == 0) {
                    if (c < 0) os << '-';
                } else {
                    os << (c < 0 ? " - " : " + ");
                }
                os << big_abs(c) << "*#[" << t.relation << '(' << var_char(t.from) << ',' << var_char(t.to)
                   << ")]{";
                print(os, t.inner);
                os << '}';
            }
            os << ' ' << relation_token(q.rel);
            if (is_modular(q.rel)) os << ' ' << q.modulus;
            os << ' ' << q.rhs;
            return;
        }
    }
}

}  // namespace detail

inline std::string pretty(const Formula& f) {
    std::ostringstream os;
    detail::print(os, f);
    return os.str();
}

inline std::string pretty(const Atom& a) {
    std::ostringstream os;
    detail::print_atom(os, a);
    return os.str();
}

inline std::string declarations(const Signature& sig) {
    std::string out;
    auto list = [&](const char* kw, const std::vector<std::string>& names) {
        if (names.empty()) return;
        out += kw;
        for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : " ") + names[i];
        out += ";\n";
    };
    list("unary", sig.unary());
    list("binary", sig.binary());
    return out;
}

}  // namespace gp2
