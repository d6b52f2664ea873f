#pragma once

// Unary types, binary types and configurations as fixed-width bit patterns.
//
// Unary type bits: bit i is U_i(x) for the i-th unary predicate, bit n+j is
// R_j(x,x).  Binary type bits: bit 2j is R_j(x,y) and bit 2j+1 is R_j(y,x),
// so reversing a binary type swaps adjacent bit pairs.

#include "gp2/errors.hpp"
#include "gp2/formula.hpp"
#include "gp2/normal_form.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gp2 {

struct UnaryType {
    std::uint64_t bits = 0;
    auto operator<=>(const UnaryType&) const = default;
};

struct BinaryType {
    std::uint64_t bits = 0;
    bool null() const noexcept { return bits == 0; }
    auto operator<=>(const BinaryType&) const = default;
};

struct Configuration {
    UnaryType source;
    BinaryType label;
    UnaryType target;
    auto operator<=>(const Configuration&) const = default;
};

inline BinaryType reverse(BinaryType eta) {
    constexpr std::uint64_t even = 0x5555555555555555ULL;
    return BinaryType{((eta.bits & even) << 1) | ((eta.bits >> 1) & even)};
}

inline Configuration reverse(const Configuration& c) { return {c.target, reverse(c.label), c.source}; }

inline constexpr std::size_t default_type_cap = 24;

class TypeSpace {
public:
    explicit TypeSpace(Signature sig, std::size_t cap = default_type_cap) : sig_(std::move(sig)) {
        const std::size_t width = sig_.unary_count() + sig_.binary_count();
        if (width > cap)
            throw CapExceeded("type space has " + std::to_string(width) + " atoms, above the cap of " +
                              std::to_string(cap));
        if (width > 62 || 2 * sig_.binary_count() > 62)
            throw CapExceeded("type space too wide for a 64-bit type encoding");
    }

    const Signature& signature() const noexcept { return sig_; }
    std::size_t n() const noexcept { return sig_.unary_count(); }
    std::size_t m() const noexcept { return sig_.binary_count(); }
    std::size_t unary_width() const noexcept { return n() + m(); }
    std::uint64_t unary_type_count() const noexcept { return std::uint64_t{1} << unary_width(); }
    std::uint64_t binary_type_count() const noexcept { return std::uint64_t{1} << (2 * m()); }

    std::size_t unary_bit(std::size_t u) const noexcept { return u; }
    std::size_t loop_bit(std::size_t r) const noexcept { return n() + r; }
    static std::size_t forward_bit(std::size_t r) noexcept { return 2 * r; }
    static std::size_t backward_bit(std::size_t r) noexcept { return 2 * r + 1; }

    bool has_unary(UnaryType pi, const std::string& name) const {
        auto i = sig_.unary_index(name);
        if (!i) throw SignatureError("unknown unary predicate " + name);
        return (pi.bits >> *i) & 1U;
    }
    bool has_forward(BinaryType eta, std::size_t r) const noexcept { return (eta.bits >> forward_bit(r)) & 1U; }

    std::vector<UnaryType> all_unary_types() const {
        std::vector<UnaryType> out;
        out.reserve(unary_type_count());
        for (std::uint64_t b = 0; b < unary_type_count(); ++b) out.push_back(UnaryType{b});
        return out;
    }

    std::vector<BinaryType> non_null_binary_types() const {
        std::vector<BinaryType> out;
        for (std::uint64_t b = 1; b < binary_type_count(); ++b) out.push_back(BinaryType{b});
        return out;
    }

    // Atom lists in canonical order; negative atoms carry a '!' prefix.
    std::string describe(UnaryType pi) const {
        std::string s;
        for (std::size_t i = 0; i < n(); ++i) append(s, (pi.bits >> i) & 1U, sig_.unary()[i] + "(x)");
        for (std::size_t j = 0; j < m(); ++j)
            append(s, (pi.bits >> loop_bit(j)) & 1U, sig_.binary()[j] + "(x,x)");
        return s.empty() ? "-" : s;
    }
    std::string describe(BinaryType eta) const {
        std::string s;
        for (std::size_t j = 0; j < m(); ++j) {
            append(s, (eta.bits >> forward_bit(j)) & 1U, sig_.binary()[j] + "(x,y)");
            append(s, (eta.bits >> backward_bit(j)) & 1U, sig_.binary()[j] + "(y,x)");
        }
        return s.empty() ? "-" : s;
    }
    std::vector<std::string> positive_atoms(UnaryType pi) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n(); ++i)
            if ((pi.bits >> i) & 1U) out.push_back(sig_.unary()[i] + "(x)");
        for (std::size_t j = 0; j < m(); ++j)
            if ((pi.bits >> loop_bit(j)) & 1U) out.push_back(sig_.binary()[j] + "(x,x)");
        return out;
    }
    std::vector<std::string> positive_atoms(BinaryType eta) const {
        std::vector<std::string> out;
        for (std::size_t j = 0; j < m(); ++j) {
            if ((eta.bits >> forward_bit(j)) & 1U) out.push_back(sig_.binary()[j] + "(x,y)");
            if ((eta.bits >> backward_bit(j)) & 1U) out.push_back(sig_.binary()[j] + "(y,x)");
        }
        return out;
    }

private:
    static void append(std::string& s, bool positive, const std::string& atom) {
        if (!s.empty()) s += ' ';
        if (!positive) s += '!';
        s += atom;
    }

    Signature sig_;
};

// A quantifier-free formula resolved against a type space, evaluated on a
// configuration (π, η, π′) with x ↦ π and y ↦ π′.
class CompiledFormula {
public:
    CompiledFormula() = default;
    CompiledFormula(const Formula& f, const TypeSpace& ts) {
        if (!f.quantifier_free()) throw Error("eval_qf: formula contains a quantifier");
        root_ = compile(f, ts);
    }

    bool eval(UnaryType pi, BinaryType eta, UnaryType pi2) const {
        if (nodes_.empty()) return true;
        const std::uint64_t words[3] = {pi.bits, eta.bits, pi2.bits};
        return eval_node(root_, words);
    }

private:
    enum class Op : std::uint8_t { Const, Bit, Not, And, Or, Implies };
    struct Node {
        Op op = Op::Const;
        bool value = false;
        std::uint8_t word = 0;  // 0 = π, 1 = η, 2 = π′
        std::uint8_t bit = 0;
        std::vector<std::size_t> kids;
    };

    std::size_t add(Node n) {
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
    }

    std::size_t bit_node(std::uint8_t word, std::size_t bit) {
        Node n;
        n.op = Op::Bit;
        n.word = word;
        n.bit = static_cast<std::uint8_t>(bit);
        return add(std::move(n));
    }

    std::size_t compile(const Formula& f, const TypeSpace& ts) {
        const auto& sig = ts.signature();
        switch (f.kind()) {
            case Kind::True:
            case Kind::False: {
                Node n;
                n.value = f.kind() == Kind::True;
                return add(std::move(n));
            }
            case Kind::Unary: {
                auto i = sig.unary_index(f.atom().name);
                if (!i) throw SignatureError("unknown unary predicate " + f.atom().name);
                return bit_node(f.atom().first == Var::X ? 0 : 2, ts.unary_bit(*i));
            }
            case Kind::Binary: {
                auto j = sig.binary_index(f.atom().name);
                if (!j) throw SignatureError("unknown binary predicate " + f.atom().name);
                const Var a = f.atom().first;
                const Var b = f.atom().second;
                if (a == b) return bit_node(a == Var::X ? 0 : 2, ts.loop_bit(*j));
                return bit_node(1, a == Var::X ? TypeSpace::forward_bit(*j) : TypeSpace::backward_bit(*j));
            }
            case Kind::Equal: {
                // The two endpoints of a configuration are distinct elements.
                Node n;
                n.value = f.atom().first == f.atom().second;
                return add(std::move(n));
            }
            case Kind::Not:
            case Kind::And:
            case Kind::Or:
            case Kind::Implies: {
                std::vector<std::size_t> kids;
                for (const auto& c : f.children()) kids.push_back(compile(c, ts));
                Node n;
                n.op = f.kind() == Kind::Not   ? Op::Not
                       : f.kind() == Kind::And ? Op::And
                       : f.kind() == Kind::Or  ? Op::Or
                                               : Op::Implies;
                n.kids = std::move(kids);
                return add(std::move(n));
            }
            default: throw Error("eval_qf: formula contains a quantifier");
        }
    }

    bool eval_node(std::size_t i, const std::uint64_t* words) const {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::Const: return n.value;
            case Op::Bit: return (words[n.word] >> n.bit) & 1U;
            case Op::Not: return !eval_node(n.kids[0], words);
            case Op::And:
                for (auto k : n.kids)
                    if (!eval_node(k, words)) return false;
                return true;
            case Op::Or:
                for (auto k : n.kids)
                    if (eval_node(k, words)) return true;
                return false;
            case Op::Implies: return !eval_node(n.kids[0], words) || eval_node(n.kids[1], words);
        }
        return false;
    }

    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

inline bool eval_qf(const Formula& f, const TypeSpace& ts, UnaryType pi, BinaryType eta, UnaryType pi2) {
    return CompiledFormula(f, ts).eval(pi, eta, pi2);
}

// The parts of a normal form the type graph needs, resolved to bit positions.
struct CompiledClause {
    std::size_t q_bit = 0;
    std::vector<std::pair<std::size_t, BigInt>> terms;  // (binary index, coefficient)
    Relation rel = Relation::Eq;
    BigInt modulus = 0;
    BigInt rhs = 0;
};

class CompiledNormalForm {
public:
    CompiledNormalForm(const NormalForm& nf, std::size_t cap = default_type_cap)
        : nf_(&nf), ts_(nf.ext_sig, cap), gamma_(nf.gamma, ts_) {
        for (const auto& a : nf.alphas) {
            auto g = nf.ext_sig.binary_index(a.guard);
            if (!g) throw SignatureError("alpha guard " + a.guard + " is not a binary predicate");
            alphas_.push_back({*g, CompiledFormula(a.beta, ts_)});
        }
        for (const auto& c : nf.lp_clauses) {
            auto q = nf.ext_sig.unary_index(c.q);
            if (!q) throw SignatureError("clause predicate " + c.q + " is not unary");
            if (is_modular(c.constraint.rel) && c.constraint.modulus < 1)
                throw Error("modulus of a congruence must be positive");
            CompiledClause cc;
            cc.q_bit = ts_.unary_bit(*q);
            for (const auto& t : c.constraint.terms) {
                auto r = nf.ext_sig.binary_index(t.relation);
                if (!r) throw SignatureError("counted relation " + t.relation + " is not binary");
                cc.terms.emplace_back(*r, t.coeff);
            }
            cc.rel = c.constraint.rel;
            cc.modulus = c.constraint.modulus;
            cc.rhs = c.constraint.rhs;
            clauses_.push_back(std::move(cc));
        }
        // Flags hold at every element or at none, so both ends of a pair agree on them.
        for (const auto& f : nf.flags) {
            auto u = nf.ext_sig.unary_index(f);
            if (!u) throw SignatureError("flag " + f + " is not a unary predicate");
            flag_mask_ |= std::uint64_t{1} << ts_.unary_bit(*u);
        }
    }

    const NormalForm& nf() const noexcept { return *nf_; }
    const TypeSpace& space() const noexcept { return ts_; }
    const std::vector<CompiledClause>& clauses() const noexcept { return clauses_; }

    bool compatible_unary(UnaryType pi) const { return gamma_.eval(pi, BinaryType{}, UnaryType{}); }

    // (π, η, π′) satisfies every α read in both orientations.
    bool compatible_config(UnaryType pi, BinaryType eta, UnaryType pi2) const {
        if (!compatible_unary(pi) || !compatible_unary(pi2)) return false;
        if ((pi.bits & flag_mask_) != (pi2.bits & flag_mask_)) return false;
        return alphas_hold(pi, eta, pi2) && alphas_hold(pi2, reverse(eta), pi);
    }

    // Indices of the clauses whose q holds in π.
    std::vector<std::size_t> active_clauses(UnaryType pi) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if ((pi.bits >> clauses_[i].q_bit) & 1U) out.push_back(i);
        return out;
    }

    // Σ λ_j over the terms whose relation holds from x to y in η.
    BigInt coefficient(std::size_t clause, BinaryType eta) const {
        BigInt sum = 0;
        for (const auto& [r, coeff] : clauses_[clause].terms)
            if (ts_.has_forward(eta, r)) sum += coeff;
        return sum;
    }

private:
    bool alphas_hold(UnaryType pi, BinaryType eta, UnaryType pi2) const {
        for (const auto& [g, beta] : alphas_)
            if (ts_.has_forward(eta, g) && !beta.eval(pi, eta, pi2)) return false;
        return true;
    }

    const NormalForm* nf_;
    TypeSpace ts_;
    CompiledFormula gamma_;
    std::vector<std::pair<std::size_t, CompiledFormula>> alphas_;
    std::uint64_t flag_mask_ = 0;
    std::vector<CompiledClause> clauses_;
};

}  // namespace gp2
