#pragma once

#include "gp2/bigint.hpp"
#include "gp2/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gp2 {

// The logic has exactly two variables.
enum class Var : std::uint8_t { X = 0, Y = 1 };

constexpr Var other(Var v) noexcept { return v == Var::X ? Var::Y : Var::X; }
constexpr char var_char(Var v) noexcept { return v == Var::X ? 'x' : 'y'; }
constexpr std::uint8_t var_bit(Var v) noexcept { return v == Var::X ? 1u : 2u; }

enum class Relation : std::uint8_t { Eq, Ne, Le, Ge, Lt, Gt, ModEq, ModNe };

constexpr bool is_modular(Relation r) noexcept { return r == Relation::ModEq || r == Relation::ModNe; }

constexpr std::string_view relation_token(Relation r) noexcept {
    switch (r) {
        case Relation::Eq: return "=";
        case Relation::Ne: return "!=";
        case Relation::Le: return "<=";
        case Relation::Ge: return ">=";
        case Relation::Lt: return "<";
        case Relation::Gt: return ">";
        case Relation::ModEq: return "=mod";
        case Relation::ModNe: return "!=mod";
    }
    return "?";
}

// Negation of the comparison (over finite values).
constexpr Relation complement(Relation r) noexcept {
    switch (r) {
        case Relation::Eq: return Relation::Ne;
        case Relation::Ne: return Relation::Eq;
        case Relation::Le: return Relation::Gt;
        case Relation::Ge: return Relation::Lt;
        case Relation::Lt: return Relation::Ge;
        case Relation::Gt: return Relation::Le;
        case Relation::ModEq: return Relation::ModNe;
        case Relation::ModNe: return Relation::ModEq;
    }
    return r;
}

// lhs ⊛ rhs over the integers; modulus is consulted only for the congruences.
inline bool compare(const BigInt& lhs, Relation r, const BigInt& modulus, const BigInt& rhs) {
    switch (r) {
        case Relation::Eq: return lhs == rhs;
        case Relation::Ne: return lhs != rhs;
        case Relation::Le: return lhs <= rhs;
        case Relation::Ge: return lhs >= rhs;
        case Relation::Lt: return lhs < rhs;
        case Relation::Gt: return lhs > rhs;
        case Relation::ModEq: return mod_floor(lhs - rhs, modulus) == 0;
        case Relation::ModNe: return mod_floor(lhs - rhs, modulus) != 0;
    }
    return false;
}

inline bool is_identifier(std::string_view name) {
    if (name.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(name[0])) return false;
    for (std::size_t i = 1; i < name.size(); ++i) {
        char c = name[i];
        if (alpha(c) || digit(c)) continue;
        // '#' is only legal as the separator of a generated name such as q#3.
        if (c == '#' && i + 1 < name.size() && digit(name[i + 1])) continue;
        return false;
    }
    return true;
}

inline bool is_reserved_word(std::string_view name) {
    static constexpr std::string_view words[] = {"x",     "y",    "true",  "false", "forall",
                                                 "exists", "mod", "unary", "binary"};
    return std::find(std::begin(words), std::end(words), name) != std::end(words);
}

// A relational vocabulary with unary and binary predicates only.
class Signature {
public:
    Signature() = default;
    Signature(std::vector<std::string> unary, std::vector<std::string> binary) {
        for (auto& u : unary) add_unary(std::move(u));
        for (auto& b : binary) add_binary(std::move(b));
    }

    const std::vector<std::string>& unary() const noexcept { return unary_; }
    const std::vector<std::string>& binary() const noexcept { return binary_; }
    std::size_t unary_count() const noexcept { return unary_.size(); }
    std::size_t binary_count() const noexcept { return binary_.size(); }

    std::optional<std::size_t> unary_index(std::string_view name) const { return find(unary_, name); }
    std::optional<std::size_t> binary_index(std::string_view name) const { return find(binary_, name); }
    bool contains(std::string_view name) const { return unary_index(name) || binary_index(name); }

    void add_unary(std::string name) {
        check_new(name);
        unary_.push_back(std::move(name));
    }
    void add_binary(std::string name) {
        check_new(name);
        binary_.push_back(std::move(name));
    }

    bool operator==(const Signature&) const = default;

private:
    static std::optional<std::size_t> find(const std::vector<std::string>& v, std::string_view name) {
        auto it = std::find(v.begin(), v.end(), name);
        if (it == v.end()) return std::nullopt;
        return static_cast<std::size_t>(it - v.begin());
    }
    void check_new(const std::string& name) const {
        if (!is_identifier(name) || is_reserved_word(name))
            throw SignatureError("invalid predicate name '" + name + "'");
        if (contains(name)) throw SignatureError("duplicate predicate name '" + name + "'");
    }

    std::vector<std::string> unary_;
    std::vector<std::string> binary_;
};

enum class Kind : std::uint8_t { True, False, Unary, Binary, Equal, Not, And, Or, Implies, Forall, Exists, Count };

// Atomic formula: U(v), R(v,w) or v = w.  Also used for quantifier guards.
struct Atom {
    Kind kind = Kind::True;
    std::string name;
    Var first = Var::X;
    Var second = Var::X;

    std::uint8_t vars() const noexcept {
        if (kind == Kind::Unary) return var_bit(first);
        return static_cast<std::uint8_t>(var_bit(first) | var_bit(second));
    }
    bool operator==(const Atom&) const = default;
};

class Formula;
struct LPQuantifier;

class Formula {
public:
    Formula();

    static Formula truth();
    static Formula falsity();
    static Formula constant(bool value) { return value ? truth() : falsity(); }
    static Formula unary(std::string name, Var v);
    static Formula binary(std::string name, Var a, Var b);
    static Formula equal(Var a, Var b);
    static Formula not_equal(Var a, Var b) { return negate(equal(a, b)); }
    static Formula atom(const Atom& a);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    static Formula implies(Formula lhs, Formula rhs);
    static Formula forall(Var bound, std::optional<Atom> guard, Formula body);
    static Formula exists(Var bound, std::optional<Atom> guard, Formula body);
    static Formula count(LPQuantifier q);

    Kind kind() const noexcept;
    bool is_atom() const noexcept {
        auto k = kind();
        return k == Kind::Unary || k == Kind::Binary || k == Kind::Equal;
    }
    bool is_quantifier() const noexcept { return kind() == Kind::Forall || kind() == Kind::Exists; }

    const Atom& atom() const;
    const std::vector<Formula>& children() const;
    Var bound() const;
    const std::optional<Atom>& guard() const;
    const Formula& body() const;
    const LPQuantifier& count() const;

    // Bitmask over {x = 1, y = 2}.
    std::uint8_t free_vars() const noexcept;
    bool quantifier_free() const noexcept;
    std::size_t size() const noexcept;

    bool operator==(const Formula& other) const;
    bool operator!=(const Formula& other) const { return !(*this == other); }
    // Same node, not merely equal structure.
    bool same_node(const Formula& other) const noexcept { return node_ == other.node_; }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Formula make(Node node);

    std::shared_ptr<const Node> node_;
};

struct CountTerm {
    BigInt coeff;
    std::string relation;
    // Direction of the counted edge: relation(from, to), {from, to} = {x, y}.
    Var from = Var::X;
    Var to = Var::Y;
    Formula inner;

    bool operator==(const CountTerm&) const = default;
};

// Σ coeff_i · #_y^{r_i}[inner_i] ⊛ rhs, with free variable x.
struct LPQuantifier {
    std::vector<CountTerm> terms;
    Relation rel = Relation::Eq;
    BigInt modulus = 0;
    BigInt rhs = 0;

    bool operator==(const LPQuantifier&) const = default;
};

struct Formula::Node {
    Node() = default;
    explicit Node(Kind k) : kind(k) {}

    Kind kind = Kind::True;
    Atom atom;
    Var bound = Var::X;
    std::optional<Atom> guard;
    std::vector<Formula> children;
    std::shared_ptr<const LPQuantifier> lpq;
    std::uint8_t free = 0;
    bool qfree = true;
    std::size_t size = 1;
};

inline Formula Formula::make(Node node) {
    switch (node.kind) {
        case Kind::True:
        case Kind::False:
            node.free = 0;
            break;
        case Kind::Unary:
        case Kind::Binary:
        case Kind::Equal:
            node.free = node.atom.vars();
            break;
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
        case Kind::Implies:
            for (const auto& c : node.children) {
                node.free |= c.free_vars();
                node.qfree = node.qfree && c.quantifier_free();
                node.size += c.size();
            }
            break;
        case Kind::Forall:
        case Kind::Exists: {
            const Formula& b = node.children.at(0);
            std::uint8_t f = b.free_vars();
            if (node.guard) f |= node.guard->vars();
            node.free = static_cast<std::uint8_t>(f & ~var_bit(node.bound));
            node.qfree = false;
            node.size += b.size() + (node.guard ? 1 : 0);
            break;
        }
        case Kind::Count:
            node.free = var_bit(Var::X);
            node.qfree = false;
            for (const auto& t : node.lpq->terms) node.size += 1 + t.inner.size();
            break;
    }
    return Formula(std::make_shared<const Node>(std::move(node)));
}

inline Formula::Formula() : Formula(truth()) {}

inline Formula Formula::truth() {
    static const Formula t = make(Node{Kind::True});
    return t;
}
inline Formula Formula::falsity() {
    static const Formula f = make(Node{Kind::False});
    return f;
}
inline Formula Formula::unary(std::string name, Var v) {
    Node n{Kind::Unary};
    n.atom = Atom{Kind::Unary, std::move(name), v, v};
    return make(std::move(n));
}
inline Formula Formula::binary(std::string name, Var a, Var b) {
    Node n{Kind::Binary};
    n.atom = Atom{Kind::Binary, std::move(name), a, b};
    return make(std::move(n));
}
inline Formula Formula::equal(Var a, Var b) {
    Node n{Kind::Equal};
    n.atom = Atom{Kind::Equal, {}, a, b};
    return make(std::move(n));
}
inline Formula Formula::atom(const Atom& a) {
    switch (a.kind) {
        case Kind::Unary: return unary(a.name, a.first);
        case Kind::Binary: return binary(a.name, a.first, a.second);
        case Kind::Equal: return equal(a.first, a.second);
        default: throw InternalError("Formula::atom on a non-atom");
    }
}
inline Formula Formula::negate(Formula f) {
    Node n{Kind::Not};
    n.children.push_back(std::move(f));
    return make(std::move(n));
}
inline Formula Formula::conj(std::vector<Formula> parts) {
    if (parts.empty()) return truth();
    if (parts.size() == 1) return parts.front();
    Node n{Kind::And};
    n.children = std::move(parts);
    return make(std::move(n));
}
inline Formula Formula::disj(std::vector<Formula> parts) {
    if (parts.empty()) return falsity();
    if (parts.size() == 1) return parts.front();
    Node n{Kind::Or};
    n.children = std::move(parts);
    return make(std::move(n));
}
inline Formula Formula::implies(Formula lhs, Formula rhs) {
    Node n{Kind::Implies};
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return make(std::move(n));
}
inline Formula Formula::forall(Var bound, std::optional<Atom> guard, Formula body) {
    Node n{Kind::Forall};
    n.bound = bound;
    n.guard = std::move(guard);
    n.children.push_back(std::move(body));
    return make(std::move(n));
}
inline Formula Formula::exists(Var bound, std::optional<Atom> guard, Formula body) {
    Node n{Kind::Exists};
    n.bound = bound;
    n.guard = std::move(guard);
    n.children.push_back(std::move(body));
    return make(std::move(n));
}
inline Formula Formula::count(LPQuantifier q) {
    if (q.terms.empty()) throw InternalError("counting quantifier without terms");
    if (is_modular(q.rel) && q.modulus < 1) throw InternalError("congruence modulus must be positive");
    Node n{Kind::Count};
    n.lpq = std::make_shared<const LPQuantifier>(std::move(q));
    return make(std::move(n));
}

inline Kind Formula::kind() const noexcept { return node_->kind; }
inline const Atom& Formula::atom() const {
    if (!is_atom()) throw InternalError("atom() on a non-atomic formula");
    return node_->atom;
}
inline const std::vector<Formula>& Formula::children() const { return node_->children; }
inline Var Formula::bound() const { return node_->bound; }
inline const std::optional<Atom>& Formula::guard() const { return node_->guard; }
inline const Formula& Formula::body() const {
    if (!is_quantifier()) throw InternalError("body() on a non-quantifier");
    return node_->children.front();
}
inline const LPQuantifier& Formula::count() const {
    if (kind() != Kind::Count) throw InternalError("count() on a non-counting formula");
    return *node_->lpq;
}
inline std::uint8_t Formula::free_vars() const noexcept { return node_->free; }
inline bool Formula::quantifier_free() const noexcept { return node_->qfree; }
inline std::size_t Formula::size() const noexcept { return node_->size; }

inline bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    const Node& a = *node_;
    const Node& b = *other.node_;
    if (a.kind != b.kind || a.size != b.size || a.free != b.free) return false;
    switch (a.kind) {
        case Kind::True:
        case Kind::False: return true;
        case Kind::Unary:
        case Kind::Binary:
        case Kind::Equal: return a.atom == b.atom;
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
        case Kind::Implies: return a.children == b.children;
        case Kind::Forall:
        case Kind::Exists: return a.bound == b.bound && a.guard == b.guard && a.children == b.children;
        case Kind::Count: return *a.lpq == *b.lpq;
    }
    return false;
}

// A sentence is a formula without free variables.
using Sentence = Formula;

// Exchanges the names x and y throughout a formula.  Counting quantifiers
// always count over y, so they cannot be renamed and are rejected.
inline Formula swap_vars(const Formula& f) {
    auto sw = [](Atom a) {
        a.first = other(a.first);
        a.second = other(a.second);
        return a;
    };
    switch (f.kind()) {
        case Kind::True:
        case Kind::False: return f;
        case Kind::Unary:
        case Kind::Binary:
        case Kind::Equal: return Formula::atom(sw(f.atom()));
        case Kind::Not: return Formula::negate(swap_vars(f.children()[0]));
        case Kind::And:
        case Kind::Or: {
            std::vector<Formula> parts;
            for (const auto& c : f.children()) parts.push_back(swap_vars(c));
            return f.kind() == Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        }
        case Kind::Implies: return Formula::implies(swap_vars(f.children()[0]), swap_vars(f.children()[1]));
        case Kind::Forall:
        case Kind::Exists: {
            std::optional<Atom> g;
            if (f.guard()) g = sw(*f.guard());
            return f.kind() == Kind::Forall ? Formula::forall(other(f.bound()), g, swap_vars(f.body()))
                                            : Formula::exists(other(f.bound()), g, swap_vars(f.body()));
        }
        case Kind::Count: throw InternalError("cannot exchange variables inside a counting quantifier");
    }
    return f;
}

// Replaces y by x in a quantifier-free formula (the diagonal instance φ(x,x)).
inline Formula diagonal(const Formula& f) {
    switch (f.kind()) {
        case Kind::True:
        case Kind::False: return f;
        case Kind::Unary: return Formula::unary(f.atom().name, Var::X);
        case Kind::Binary: return Formula::binary(f.atom().name, Var::X, Var::X);
        case Kind::Equal: return Formula::truth();
        case Kind::Not: return Formula::negate(diagonal(f.children()[0]));
        case Kind::And:
        case Kind::Or: {
            std::vector<Formula> parts;
            for (const auto& c : f.children()) parts.push_back(diagonal(c));
            return f.kind() == Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        }
        case Kind::Implies: return Formula::implies(diagonal(f.children()[0]), diagonal(f.children()[1]));
        default: throw InternalError("diagonal() requires a quantifier-free formula");
    }
}

// Constant folding of true/false through the connectives.  Leaves the
// structure of non-constant parts alone.
inline Formula simplify(const Formula& f) {
    switch (f.kind()) {
        case Kind::Not: {
            Formula c = simplify(f.children()[0]);
            if (c.kind() == Kind::True) return Formula::falsity();
            if (c.kind() == Kind::False) return Formula::truth();
            if (c.kind() == Kind::Not) return c.children()[0];
            return Formula::negate(c);
        }
        case Kind::And:
        case Kind::Or: {
            const bool is_and = f.kind() == Kind::And;
            const Kind unit = is_and ? Kind::True : Kind::False;
            const Kind zero = is_and ? Kind::False : Kind::True;
            std::vector<Formula> parts;
            auto add = [&](Formula s) {
                for (const auto& p : parts) {
                    if (p == s) return true;
                    if ((p.kind() == Kind::Not && p.children()[0] == s) ||
                        (s.kind() == Kind::Not && s.children()[0] == p))
                        return false;  // p and its negation
                }
                parts.push_back(std::move(s));
                return true;
            };
            for (const auto& c : f.children()) {
                Formula s = simplify(c);
                if (s.kind() == unit) continue;
                if (s.kind() == zero) return s;
                if (s.kind() == f.kind()) {
                    for (const auto& g : s.children())
                        if (!add(g)) return Formula::constant(!is_and);
                } else if (!add(std::move(s))) {
                    return Formula::constant(!is_and);
                }
            }
            if (parts.empty()) return Formula::constant(is_and);
            if (parts.size() == 1) return parts.front();
            return is_and ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        }
        case Kind::Implies: {
            Formula a = simplify(f.children()[0]);
            Formula b = simplify(f.children()[1]);
            if (a.kind() == Kind::False || b.kind() == Kind::True || a == b) return Formula::truth();
            if (a.kind() == Kind::True) return b;
            if (b.kind() == Kind::False) return simplify(Formula::negate(a));
            // a -> (a -> c) is a -> c
            if (b.kind() == Kind::Implies && b.children()[1] == a) return Formula::truth();
            if (b.kind() == Kind::Implies && b.children()[0] == a) return simplify(Formula::implies(a, b.children()[1]));
            return Formula::implies(a, b);
        }
        case Kind::Forall:
        case Kind::Exists: {
            Formula b = simplify(f.body());
            if (f.kind() == Kind::Forall && b.kind() == Kind::True) return b;
            if (f.kind() == Kind::Exists && b.kind() == Kind::False) return b;
            if (b.same_node(f.body())) return f;
            return f.kind() == Kind::Forall ? Formula::forall(f.bound(), f.guard(), b)
                                            : Formula::exists(f.bound(), f.guard(), b);
        }
        case Kind::Count: {
            LPQuantifier q = f.count();
            for (auto& t : q.terms) t.inner = simplify(t.inner);
            return Formula::count(std::move(q));
        }
        default: return f;
    }
}

}  // namespace gp2
