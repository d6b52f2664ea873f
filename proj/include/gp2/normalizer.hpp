#pragma once

// Rewrites a guarded two-variable sentence with counting quantifiers into
// the normal form
//
//   ∀x γ(x) ∧ ⋀ ∀x∀y ((R(x,y) ∧ x≠y) → β) ∧ ⋀ ∀x (q(x) → P(x))
//
// over an extended signature.  Subformulas with one free variable are
// replaced bottom-up by fresh unary predicates.  Which direction of the
// definition is asserted depends on the polarity of the occurrence, so a
// positive existential is encoded as a counting constraint "#R' ≥ 1"
// rather than through a universal.

#include "gp2/formula.hpp"
#include "gp2/normal_form.hpp"
#include "gp2/validate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gp2 {

enum class Polarity : std::uint8_t { Pos, Neg, Both };

constexpr Polarity flip(Polarity p) noexcept {
    return p == Polarity::Pos ? Polarity::Neg : p == Polarity::Neg ? Polarity::Pos : Polarity::Both;
}

// Replaces x = y by false, which is sound inside an α where x ≠ y holds.
inline Formula assume_distinct(const Formula& f) {
    switch (f.kind()) {
        case Kind::Equal:
            return f.atom().first == f.atom().second ? Formula::truth() : Formula::falsity();
        case Kind::Not: return Formula::negate(assume_distinct(f.children()[0]));
        case Kind::And:
        case Kind::Or: {
            std::vector<Formula> parts;
            for (const auto& c : f.children()) parts.push_back(assume_distinct(c));
            return f.kind() == Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        }
        case Kind::Implies:
            return Formula::implies(assume_distinct(f.children()[0]), assume_distinct(f.children()[1]));
        default: return f;
    }
}

class Normalizer {
public:
    explicit Normalizer(const Signature& sig) : sig_(sig) { nf_.ext_sig = sig; }

    NormalForm run(const Sentence& s) {
        auto violations = validate_guarded(s);
        if (!violations.empty())
            throw Error("sentence is not guarded: " + violations.front().reason + " in " + violations.front().subformula);
        top_level(simplify(s));
        nf_.gamma = simplify(Formula::conj(std::move(gamma_)));
        return std::move(nf_);
    }

private:
    std::string fresh(bool unary, Formula definition, std::string origin) {
        const char* stem = unary ? "q#" : "R#";
        std::string name;
        do {
            name = stem + std::to_string(++counter_);
        } while (nf_.ext_sig.contains(name));
        if (unary)
            nf_.ext_sig.add_unary(name);
        else
            nf_.ext_sig.add_binary(name);
        nf_.definitions.push_back({name, unary ? 1 : 2, std::move(definition), std::move(origin)});
        return name;
    }

    void add_gamma(const Formula& f) {
        Formula g = simplify(f);
        if (g.kind() == Kind::True) return;
        gamma_.push_back(g);
    }

    // ∀x∀y (guard → chi): the diagonal x = y goes to γ, the rest becomes an α.
    void add_pair_universal(const Atom& guard, const Formula& chi) {
        add_gamma(Formula::implies(Formula::binary(guard.name, Var::X, Var::X), diagonal(chi)));
        Formula beta = guard.first == Var::X ? chi : swap_vars(chi);
        beta = simplify(assume_distinct(beta));
        if (beta.kind() == Kind::True) return;
        nf_.alphas.push_back({guard.name, beta});
    }

    static Formula guard_formula(const Atom& r) { return Formula::atom(r); }

    // Fresh q with q(x) → ∀y (r → psi).
    std::string encode_forall(const Atom& r, const Formula& psi) {
        Formula def = Formula::forall(Var::Y, r, psi);
        for (const auto& [d, name] : quant_cache_)
            if (d == def) return name;
        std::string q = fresh(true, def, "forall");
        quant_cache_.emplace_back(def, q);
        add_pair_universal(r, Formula::implies(Formula::unary(q, Var::X), psi));
        return q;
    }

    // Fresh q with q(x) → ((r(x,x) ∧ psi(x,x)) ∨ e(x)) and e(x) → #_y^{R'}[x≠y] ≥ 1,
    // where R' ⊆ r ∧ psi.
    std::string encode_exists(const Atom& r, const Formula& psi) {
        Formula def = Formula::exists(Var::Y, r, psi);
        for (const auto& [d, name] : quant_cache_)
            if (d == def) return name;
        std::string q = fresh(true, def, "exists");
        quant_cache_.emplace_back(def, q);
        Formula edge = Formula::conj({guard_formula(r), psi});
        std::string rel = fresh(false, edge, "exists-edge");
        add_pair_universal(Atom{Kind::Binary, rel, Var::X, Var::Y}, edge);
        BasicLPQ atleast{{BasicTerm{1, rel}}, Relation::Ge, 0, 1};
        std::string e = fresh(true, basic_count_formula(atleast), "exists-count");
        nf_.lp_clauses.push_back({e, atleast});
        add_gamma(Formula::implies(Formula::unary(q, Var::X),
                                   Formula::disj({diagonal(edge), Formula::unary(e, Var::X)})));
        return q;
    }

    // A quantified subformula with exactly one free variable.
    Formula rename_quantifier(const Formula& f, Polarity pol) {
        const Atom& guard = *f.guard();
        const bool universal = f.kind() == Kind::Forall;
        const Var subject = other(f.bound());
        auto to_x = [&](const Formula& g) { return subject == Var::X ? g : swap_vars(g); };
        Atom r = guard;
        if (subject == Var::Y) {
            r.first = other(r.first);
            r.second = other(r.second);
        }
        auto replacement = [&](const std::string& q, bool negated) {
            Formula a = Formula::unary(q, subject);
            return negated ? Formula::negate(a) : a;
        };
        if (pol == Polarity::Both) {
            Formula body = to_x(rename(f.body(), Polarity::Both));
            Formula neg_body = Formula::negate(body);
            std::string q1 = universal ? encode_forall(r, body) : encode_exists(r, body);
            std::string q2 = universal ? encode_exists(r, neg_body) : encode_forall(r, neg_body);
            add_gamma(Formula::disj({Formula::unary(q1, Var::X), Formula::unary(q2, Var::X)}));
            return replacement(q1, false);
        }
        Formula body = to_x(rename(f.body(), pol));
        if (pol == Polarity::Pos)
            return replacement(universal ? encode_forall(r, body) : encode_exists(r, body), false);
        // Negative occurrence: assert the dual quantifier on a fresh q and use ¬q.
        Formula neg_body = Formula::negate(body);
        return replacement(universal ? encode_exists(r, neg_body) : encode_forall(r, neg_body), true);
    }

    // Counting quantifier with QF-renamed inner formulas converted to basic form.
    BasicLPQ basicize(const LPQuantifier& q) {
        BasicLPQ out;
        out.rel = q.rel;
        out.modulus = q.modulus;
        out.rhs = q.rhs;
        for (const auto& t : q.terms) {
            Formula inner = rename(t.inner, Polarity::Both);
            Atom r{Kind::Binary, t.relation, t.from, t.to};
            // Counting skips the element itself, so an inner "true" is as good as x != y.
            bool already_basic = t.from == Var::X &&
                                 (simplify(inner).kind() == Kind::True ||
                                  (inner.kind() == Kind::Not && inner.children()[0].kind() == Kind::Equal &&
                                   inner.children()[0].atom().first != inner.children()[0].atom().second));
            if (already_basic) {
                out.terms.push_back({t.coeff, t.relation});
                continue;
            }
            Formula edge = Formula::conj({guard_formula(r), inner});
            if (auto hit = cached_edge(edge)) {
                out.terms.push_back({t.coeff, *hit});
                continue;
            }
            std::string rel = fresh(false, edge, "count-edge");
            edge_cache_.emplace_back(edge, rel);
            Formula fresh_edge = Formula::binary(rel, Var::X, Var::Y);
            add_pair_universal(Atom{Kind::Binary, rel, Var::X, Var::Y}, edge);
            add_pair_universal(r, Formula::implies(inner, fresh_edge));
            out.terms.push_back({t.coeff, rel});
        }
        return out;
    }

    static BasicLPQ complemented(BasicLPQ p) {
        p.rel = complement(p.rel);
        return p;
    }

    Formula rename_count(const Formula& f, Polarity pol) {
        BasicLPQ p = basicize(f.count());
        if (pol == Polarity::Pos || pol == Polarity::Both) {
            std::string q = fresh(true, basic_count_formula(p), "count");
            nf_.lp_clauses.push_back({q, p});
            if (pol == Polarity::Both) {
                BasicLPQ c = complemented(p);
                std::string q2 = fresh(true, basic_count_formula(c), "count");
                nf_.lp_clauses.push_back({q2, c});
                add_gamma(Formula::disj({Formula::unary(q, Var::X), Formula::unary(q2, Var::X)}));
            }
            return Formula::unary(q, Var::X);
        }
        BasicLPQ c = complemented(p);
        std::string q = fresh(true, basic_count_formula(c), "count");
        nf_.lp_clauses.push_back({q, c});
        return Formula::negate(Formula::unary(q, Var::X));
    }

    // Closed subsentence: a uniform flag p with p ↔ sentence.
    Formula rename_closed(const Formula& f) {
        std::string p = fresh(true, f, "sentence");
        nf_.flags.push_back(p);
        const bool universal = f.kind() == Kind::Forall;
        const Var v = f.bound();
        Formula body = f.body();
        if (f.guard()) {
            Formula g = guard_formula(*f.guard());
            body = universal ? Formula::implies(g, body) : Formula::conj({g, body});
        }
        auto to_x = [&](const Formula& g) { return v == Var::X ? g : swap_vars(g); };
        // One renaming serves both directions of the equivalence.
        Formula pos = to_x(rename(body, Polarity::Both));
        const Formula& neg = pos;
        Formula px = Formula::unary(p, Var::X);
        if (universal) {
            add_gamma(Formula::implies(px, pos));
            nf_.requirements.push_back({Formula::negate(px), simplify(Formula::negate(neg))});
        } else {
            nf_.requirements.push_back({px, simplify(pos)});
            add_gamma(Formula::implies(Formula::negate(px), Formula::negate(neg)));
        }
        return Formula::unary(p, Var::X);
    }

public:
    // Quantifier-free replacement of f with the same free variables.
    Formula rename(const Formula& f, Polarity pol) {
        switch (f.kind()) {
            case Kind::True:
            case Kind::False:
            case Kind::Unary:
            case Kind::Binary:
            case Kind::Equal: return f;
            case Kind::Not: return Formula::negate(rename(f.children()[0], flip(pol)));
            case Kind::And:
            case Kind::Or: {
                std::vector<Formula> parts;
                for (const auto& c : f.children()) parts.push_back(rename(c, pol));
                return f.kind() == Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
            }
            case Kind::Implies:
                return Formula::implies(rename(f.children()[0], flip(pol)), rename(f.children()[1], pol));
            case Kind::Forall:
            case Kind::Exists:
            case Kind::Count: {
                for (const auto& c : rename_cache_)
                    if (c.pol == pol || c.pol == Polarity::Both || f.free_vars() == 0)
                        if (c.f == f) return c.result;
                Formula out = f.kind() == Kind::Count ? rename_count(f, pol)
                              : f.free_vars() == 0   ? rename_closed(f)
                                                     : rename_quantifier(f, pol);
                rename_cache_.push_back({f, pol, out});
                return out;
            }
        }
        return f;
    }

private:
    static void flatten(const Formula& f, std::vector<Formula>& out) {
        if (f.kind() == Kind::And) {
            for (const auto& c : f.children()) flatten(c, out);
            return;
        }
        if (f.kind() == Kind::Implies && f.children()[1].kind() == Kind::And) {
            for (const auto& c : f.children()[1].children()) flatten(Formula::implies(f.children()[0], c), out);
            return;
        }
        out.push_back(f);
    }

    static bool binary_guard_over_xy(const Formula& f) {
        return f.kind() == Kind::Forall && f.bound() == Var::Y && f.guard() && f.guard()->kind == Kind::Binary &&
               f.guard()->first != f.guard()->second;
    }

    // Conjunct of ∀x body(x) at the top level.
    void universal_part(const Formula& part) {
        // q(x) → P(x) with q an existing unary predicate.
        if (part.kind() == Kind::Implies && part.children()[0].kind() == Kind::Unary &&
            part.children()[0].atom().first == Var::X && part.children()[1].kind() == Kind::Count) {
            BasicLPQ p = basicize(part.children()[1].count());
            nf_.lp_clauses.push_back({part.children()[0].atom().name, p});
            return;
        }
        // ∀y (r(x,y) → φ) and A(x) → ∀y (r(x,y) → φ) become α's directly.
        if (binary_guard_over_xy(part)) {
            add_pair_universal(*part.guard(), rename(part.body(), Polarity::Pos));
            return;
        }
        if (part.kind() == Kind::Implies && part.children()[0].quantifier_free() &&
            binary_guard_over_xy(part.children()[1])) {
            const Formula& q = part.children()[1];
            add_pair_universal(*q.guard(), Formula::implies(part.children()[0], rename(q.body(), Polarity::Pos)));
            return;
        }
        add_gamma(rename(part, Polarity::Pos));
    }

    void top_level(const Formula& c) {
        switch (c.kind()) {
            case Kind::True: return;
            case Kind::And:
                for (const auto& part : c.children()) top_level(part);
                return;
            case Kind::Forall: {
                Formula body = c.body();
                if (c.guard()) body = Formula::implies(guard_formula(*c.guard()), body);
                if (c.bound() == Var::Y) {
                    add_gamma(swap_vars(rename(body, Polarity::Pos)));
                    return;
                }
                std::vector<Formula> parts;
                flatten(body, parts);
                for (const auto& part : parts) universal_part(part);
                return;
            }
            case Kind::Exists: {
                Formula body = c.body();
                if (c.guard()) body = Formula::conj({guard_formula(*c.guard()), body});
                Formula w = rename(body, Polarity::Pos);
                if (c.bound() == Var::Y) w = swap_vars(w);
                nf_.requirements.push_back({Formula::truth(), simplify(w)});
                return;
            }
            default:
                // Boolean combination of sentences: closed parts become flags.
                add_gamma(rename(c, Polarity::Pos));
                return;
        }
    }

    const Signature& sig_;
    NormalForm nf_;
    std::vector<Formula> gamma_;
    std::size_t counter_ = 0;
    // Exact-match caches: identical subformulas reuse one fresh symbol.
    struct Renamed {
        Formula f;
        Polarity pol;
        Formula result;
    };
    std::vector<Renamed> rename_cache_;
    std::vector<std::pair<Formula, std::string>> edge_cache_;
    std::vector<std::pair<Formula, std::string>> quant_cache_;

    std::optional<std::string> cached_edge(const Formula& edge) const {
        for (const auto& [e, rel] : edge_cache_)
            if (e == edge) return rel;
        return std::nullopt;
    }
};

// Equisatisfiable normal form of a guarded sentence over sig.
inline NormalForm normalize(const Sentence& s, const Signature& sig) { return Normalizer(sig).run(s); }

}  // namespace gp2
