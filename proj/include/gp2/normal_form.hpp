#pragma once

#include "gp2/formula.hpp"
#include "gp2/parser.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace gp2 {

struct BasicTerm {
    BigInt coeff;
    std::string relation;

    bool operator==(const BasicTerm&) const = default;
};

// Σ coeff_j · #_y^{R_j(x,y)}[x ≠ y] ⊛ rhs.
struct BasicLPQ {
    std::vector<BasicTerm> terms;
    Relation rel = Relation::Eq;
    BigInt modulus = 0;
    BigInt rhs = 0;

    std::size_t arity() const noexcept { return terms.size(); }
    bool operator==(const BasicLPQ&) const = default;
};

// ∀x∀y ((R(x,y) ∧ x ≠ y) → β(x,y))
struct Alpha {
    std::string guard;
    Formula beta;

    bool operator==(const Alpha&) const = default;
};

// ∀x (q(x) → P(x))
struct LpClause {
    std::string q;
    BasicLPQ constraint;

    bool operator==(const LpClause&) const = default;
};

// A model must realize a type satisfying `witness` whenever the uniform
// sentence flags satisfy `when`.  Both are quantifier-free in x.
struct Requirement {
    Formula when;
    Formula witness;

    bool operator==(const Requirement&) const = default;
};

// Where a fresh predicate came from and what it stands for.
struct FreshDefinition {
    std::string name;
    int arity = 1;
    // Unary: free variable x (closed for flags).  Binary: free x and y.
    Formula definition;
    std::string origin;
};

struct NormalForm {
    Formula gamma;
    std::vector<Alpha> alphas;
    std::vector<LpClause> lp_clauses;
    std::vector<Requirement> requirements;
    // Unary predicates that stand for closed subsentences; every model
    // interprets them uniformly (all elements or none).
    std::vector<std::string> flags;
    Signature ext_sig;
    std::vector<FreshDefinition> definitions;

    std::size_t k() const noexcept { return alphas.size(); }
    std::size_t l() const noexcept { return lp_clauses.size(); }
};

inline Formula basic_count_formula(const BasicLPQ& p) {
    LPQuantifier q;
    for (const auto& t : p.terms)
        q.terms.push_back(CountTerm{t.coeff, t.relation, Var::X, Var::Y, Formula::not_equal(Var::X, Var::Y)});
    q.rel = p.rel;
    q.modulus = p.modulus;
    q.rhs = p.rhs;
    return Formula::count(std::move(q));
}

inline Formula alpha_formula(const Alpha& a) {
    return Formula::forall(
        Var::X, std::nullopt,
        Formula::forall(Var::Y, Atom{Kind::Binary, a.guard, Var::X, Var::Y},
                        Formula::implies(Formula::not_equal(Var::X, Var::Y), a.beta)));
}

inline Formula clause_formula(const LpClause& c) {
    return Formula::forall(Var::X, std::nullopt,
                           Formula::implies(Formula::unary(c.q, Var::X), basic_count_formula(c.constraint)));
}

// The normal form as one closed formula: conjunction of ∀x γ, the α's, the
// counting clauses, flag uniformity and the realization requirements.
// Evaluating it on a structure gives the meaning of the normal form.
inline Sentence to_sentence(const NormalForm& nf) {
    std::vector<Formula> parts;
    parts.push_back(Formula::forall(Var::X, std::nullopt, nf.gamma));
    for (const auto& a : nf.alphas) parts.push_back(alpha_formula(a));
    for (const auto& c : nf.lp_clauses) parts.push_back(clause_formula(c));
    for (const auto& f : nf.flags) {
        parts.push_back(Formula::forall(
            Var::X, std::nullopt,
            Formula::forall(Var::Y, std::nullopt,
                            Formula::implies(Formula::unary(f, Var::X), Formula::unary(f, Var::Y)))));
    }
    for (const auto& r : nf.requirements) {
        parts.push_back(Formula::disj({Formula::forall(Var::X, std::nullopt, Formula::negate(r.when)),
                                       Formula::exists(Var::X, std::nullopt, r.witness)}));
    }
    return Formula::conj(std::move(parts));
}

// Number of AST nodes of the normal form.
inline std::size_t nf_size(const NormalForm& nf) {
    std::size_t n = nf.gamma.size();
    for (const auto& a : nf.alphas) n += 3 + a.beta.size();
    for (const auto& c : nf.lp_clauses) n += 2 + c.constraint.terms.size();
    for (const auto& r : nf.requirements) n += 1 + r.when.size() + r.witness.size();
    n += nf.flags.size();
    return n;
}

struct ShapeViolation {
    std::string where;
    std::string reason;
};

namespace detail {

inline void check_qf_over(const Formula& f, const Signature& sig, std::uint8_t allowed, const std::string& where,
                          std::vector<ShapeViolation>& out) {
    if (!f.quantifier_free()) out.push_back({where, "not quantifier-free"});
    if ((f.free_vars() & ~allowed) != 0) out.push_back({where, "uses a variable outside its scope"});
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (g.kind() == Kind::Unary && !sig.unary_index(g.atom().name))
            out.push_back({where, "unknown unary predicate " + g.atom().name});
        if (g.kind() == Kind::Binary && !sig.binary_index(g.atom().name))
            out.push_back({where, "unknown binary predicate " + g.atom().name});
        for (const auto& c : g.children()) stack.push_back(c);
    }
}

}  // namespace detail

// Syntactic recognizer for the normal form.
inline std::vector<ShapeViolation> check_normal_form(const NormalForm& nf) {
    std::vector<ShapeViolation> out;
    const auto& sig = nf.ext_sig;
    detail::check_qf_over(nf.gamma, sig, var_bit(Var::X), "gamma", out);
    for (std::size_t i = 0; i < nf.alphas.size(); ++i) {
        const auto& a = nf.alphas[i];
        std::string where = "alpha " + std::to_string(i + 1);
        if (!sig.binary_index(a.guard)) out.push_back({where, "guard is not a binary predicate"});
        detail::check_qf_over(a.beta, sig, 3, where, out);
    }
    for (std::size_t i = 0; i < nf.lp_clauses.size(); ++i) {
        const auto& c = nf.lp_clauses[i];
        std::string where = "clause " + std::to_string(i + 1);
        if (!sig.unary_index(c.q)) out.push_back({where, "q is not a unary predicate"});
        if (c.constraint.terms.empty()) out.push_back({where, "no counting terms"});
        for (const auto& t : c.constraint.terms)
            if (!sig.binary_index(t.relation)) out.push_back({where, "term over unknown relation " + t.relation});
        if (is_modular(c.constraint.rel) && c.constraint.modulus < 1) out.push_back({where, "modulus below 1"});
    }
    for (std::size_t i = 0; i < nf.requirements.size(); ++i) {
        std::string where = "requirement " + std::to_string(i + 1);
        detail::check_qf_over(nf.requirements[i].when, sig, var_bit(Var::X), where, out);
        detail::check_qf_over(nf.requirements[i].witness, sig, var_bit(Var::X), where, out);
    }
    for (const auto& f : nf.flags)
        if (!sig.unary_index(f)) out.push_back({"flags", "flag " + f + " is not a unary predicate"});
    return out;
}

// Prints the normal form in the input grammar, one conjunct per line.
inline std::string pretty(const NormalForm& nf) {
    std::ostringstream os;
    os << declarations(nf.ext_sig);
    std::vector<std::string> lines;
    lines.push_back("forall x . " + pretty(nf.gamma));
    for (const auto& a : nf.alphas) lines.push_back(pretty(alpha_formula(a)));
    for (const auto& c : nf.lp_clauses) lines.push_back(pretty(clause_formula(c)));
    for (const auto& f : nf.flags)
        lines.push_back("forall x . forall y . (" + f + "(x) -> " + f + "(y))");
    for (const auto& r : nf.requirements)
        lines.push_back("(forall x . " + pretty(simplify(Formula::negate(r.when))) + " | exists x . " + pretty(simplify(r.witness)) + ")");
    if (lines.size() == 1) {
        os << lines.front() << '\n';
        return os.str();
    }
    for (std::size_t i = 0; i < lines.size(); ++i) os << (i == 0 ? "( " : "& ") << lines[i] << '\n';
    os << ")\n";
    return os.str();
}

}  // namespace gp2
