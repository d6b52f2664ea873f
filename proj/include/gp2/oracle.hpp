#pragma once

// Finite structures and direct evaluation of formulas on them.  Nothing
// here uses the type machinery; the oracle exists to cross-check it.

#include "gp2/formula.hpp"
#include "gp2/normal_form.hpp"

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gp2 {

struct FiniteStructure {
    std::size_t size = 0;
    Signature sig;
    std::vector<std::vector<char>> unary;   // per unary predicate, indexed by element
    std::vector<std::vector<char>> binary;  // per binary predicate, indexed by a·size + b

    FiniteStructure() = default;
    FiniteStructure(Signature s, std::size_t n) : size(n), sig(std::move(s)) {
        unary.assign(sig.unary_count(), std::vector<char>(n, 0));
        binary.assign(sig.binary_count(), std::vector<char>(n * n, 0));
    }

    bool holds_unary(std::size_t u, std::size_t a) const { return unary[u][a] != 0; }
    bool holds_binary(std::size_t r, std::size_t a, std::size_t b) const { return binary[r][a * size + b] != 0; }
    void set_unary(std::size_t u, std::size_t a, bool v) { unary[u][a] = v; }
    void set_binary(std::size_t r, std::size_t a, std::size_t b, bool v) { binary[r][a * size + b] = v; }
};

namespace detail {

using Env = std::array<std::size_t, 2>;

inline std::size_t at(const Env& env, Var v) { return env[static_cast<std::size_t>(v)]; }

inline bool eval_atom(const Atom& a, const FiniteStructure& s, const Env& env) {
    switch (a.kind) {
        case Kind::Unary: {
            auto i = s.sig.unary_index(a.name);
            if (!i) throw SignatureError("structure has no unary predicate " + a.name);
            return s.holds_unary(*i, at(env, a.first));
        }
        case Kind::Binary: {
            auto i = s.sig.binary_index(a.name);
            if (!i) throw SignatureError("structure has no binary predicate " + a.name);
            return s.holds_binary(*i, at(env, a.first), at(env, a.second));
        }
        case Kind::Equal: return at(env, a.first) == at(env, a.second);
        default: throw InternalError("not an atom");
    }
}

inline bool eval(const Formula& f, const FiniteStructure& s, Env env) {
    switch (f.kind()) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Unary:
        case Kind::Binary:
        case Kind::Equal: return eval_atom(f.atom(), s, env);
        case Kind::Not: return !eval(f.children()[0], s, env);
        case Kind::And:
            for (const auto& c : f.children())
                if (!eval(c, s, env)) return false;
            return true;
        case Kind::Or:
            for (const auto& c : f.children())
                if (eval(c, s, env)) return true;
            return false;
        case Kind::Implies: return !eval(f.children()[0], s, env) || eval(f.children()[1], s, env);
        case Kind::Forall:
        case Kind::Exists: {
            const bool universal = f.kind() == Kind::Forall;
            for (std::size_t b = 0; b < s.size; ++b) {
                env[static_cast<std::size_t>(f.bound())] = b;
                if (f.guard() && !eval_atom(*f.guard(), s, env)) continue;
                if (eval(f.body(), s, env) != universal) return !universal;
            }
            return universal;
        }
        case Kind::Count: {
            // An element never counts itself.
            const LPQuantifier& q = f.count();
            const std::size_t a = at(env, Var::X);
            BigInt sum = 0;
            for (std::size_t b = 0; b < s.size; ++b) {
                if (b == a) continue;
                Env e2{a, b};
                for (const auto& t : q.terms) {
                    Atom r{Kind::Binary, t.relation, t.from, t.to};
                    if (eval_atom(r, s, e2) && eval(t.inner, s, e2)) sum += t.coeff;
                }
            }
            return compare(sum, q.rel, q.modulus, q.rhs);
        }
    }
    return false;
}

}  // namespace detail

// Truth of φ with x ↦ a and y ↦ b.
inline bool evaluate(const Formula& f, const FiniteStructure& s, std::size_t a = 0, std::size_t b = 0) {
    return detail::eval(f, s, {a, b});
}

inline bool holds(const Sentence& s, const FiniteStructure& a) {
    if (a.size == 0) throw Error("structures have at least one element");
    return evaluate(s, a);
}

inline bool model_check(const NormalForm& nf, const FiniteStructure& a) { return holds(to_sentence(nf), a); }

// Interprets the fresh predicates of a normal form by their definitions.
inline FiniteStructure expand(const FiniteStructure& a, const NormalForm& nf) {
    FiniteStructure out(nf.ext_sig, a.size);
    for (std::size_t u = 0; u < a.sig.unary_count(); ++u) {
        auto i = nf.ext_sig.unary_index(a.sig.unary()[u]);
        if (!i) throw SignatureError("extended signature lacks " + a.sig.unary()[u]);
        out.unary[*i] = a.unary[u];
    }
    for (std::size_t r = 0; r < a.sig.binary_count(); ++r) {
        auto i = nf.ext_sig.binary_index(a.sig.binary()[r]);
        if (!i) throw SignatureError("extended signature lacks " + a.sig.binary()[r]);
        out.binary[*i] = a.binary[r];
    }
    for (const auto& d : nf.definitions) {
        if (d.arity == 1) {
            auto i = *nf.ext_sig.unary_index(d.name);
            for (std::size_t e = 0; e < a.size; ++e) out.set_unary(i, e, evaluate(d.definition, out, e, e));
        } else {
            auto i = *nf.ext_sig.binary_index(d.name);
            for (std::size_t e = 0; e < a.size; ++e)
                for (std::size_t f = 0; f < a.size; ++f) out.set_binary(i, e, f, evaluate(d.definition, out, e, f));
        }
    }
    return out;
}

// Forgets every predicate outside sig.
inline FiniteStructure reduct(const FiniteStructure& a, const Signature& sig) {
    FiniteStructure out(sig, a.size);
    for (std::size_t u = 0; u < sig.unary_count(); ++u) out.unary[u] = a.unary[*a.sig.unary_index(sig.unary()[u])];
    for (std::size_t r = 0; r < sig.binary_count(); ++r)
        out.binary[r] = a.binary[*a.sig.binary_index(sig.binary()[r])];
    return out;
}

struct SearchOptions {
    std::size_t node_cap = 50'000'000;
};

namespace detail {

// Element description: bit u for U_u, bit n+r for R_r(a,a).
inline void write_element(FiniteStructure& s, std::size_t a, std::uint64_t bits) {
    const std::size_t n = s.sig.unary_count();
    for (std::size_t u = 0; u < n; ++u) s.set_unary(u, a, (bits >> u) & 1U);
    for (std::size_t r = 0; r < s.sig.binary_count(); ++r) s.set_binary(r, a, a, (bits >> (n + r)) & 1U);
}

// Pair description from a to b (a ≠ b): bit 2r for R_r(a,b), bit 2r+1 for R_r(b,a).
inline void write_pair(FiniteStructure& s, std::size_t a, std::size_t b, std::uint64_t bits) {
    for (std::size_t r = 0; r < s.sig.binary_count(); ++r) {
        s.set_binary(r, a, b, (bits >> (2 * r)) & 1U);
        s.set_binary(r, b, a, (bits >> (2 * r + 1)) & 1U);
    }
}

class ModelSearch {
public:
    ModelSearch(const NormalForm& nf, const SearchOptions& opt) : nf_(nf), opt_(opt), whole_(to_sentence(nf)) {
        const Signature& sig = nf.ext_sig;
        const std::size_t width = sig.unary_count() + sig.binary_count();
        if (width > 20 || 2 * sig.binary_count() > 20) throw CapExceeded("signature too large for model search");
        for (std::uint64_t u = 0; u < (std::uint64_t{1} << width); ++u) {
            FiniteStructure one(sig, 1);
            write_element(one, 0, u);
            if (evaluate(nf.gamma, one, 0, 0)) kinds_.push_back(u);
        }
        for (const auto& a : nf.alphas) alpha_sentences_.push_back(alpha_formula(a));
        for (const auto& c : nf.lp_clauses) clause_sentences_.push_back(clause_formula(c));
        pairs_.assign(kinds_.size() * kinds_.size(), std::nullopt);
    }

    std::optional<FiniteStructure> run(std::size_t n) {
        if (kinds_.empty()) return std::nullopt;
        s_ = FiniteStructure(nf_.ext_sig, n);
        choice_.assign(n, 0);
        return elements(0, 0) ? std::optional<FiniteStructure>(s_) : std::nullopt;
    }

private:
    bool elements(std::size_t a, std::size_t from) {
        if (a == s_.size) {
            order_.clear();
            for (std::size_t i = 0; i < s_.size; ++i)
                for (std::size_t j = i + 1; j < s_.size; ++j) order_.emplace_back(i, j);
            return pairs(0);
        }
        for (std::size_t k = from; k < kinds_.size(); ++k) {
            choice_[a] = k;
            write_element(s_, a, kinds_[k]);
            if (elements(a + 1, k)) return true;
        }
        return false;
    }

    bool clauses_hold_at(std::size_t a) const {
        for (const auto& c : clause_sentences_)
            if (!evaluate(c.body(), s_, a, a)) return false;
        return true;
    }

    bool pairs(std::size_t idx) {
        if (++nodes_ > opt_.node_cap) throw ResourceLimit("model search node cap exceeded");
        if (idx == order_.size()) {
            if (s_.size == 1 && !clauses_hold_at(0)) return false;
            return holds(whole_, s_);
        }
        auto [a, b] = order_[idx];
        for (auto e : allowed(choice_[a], choice_[b])) {
            write_pair(s_, a, b, e);
            // Once its last pair is set, element a's counts are final.
            if (b == s_.size - 1 && !clauses_hold_at(a)) continue;
            if (b == s_.size - 1 && a + 2 == s_.size && !clauses_hold_at(b)) continue;
            if (pairs(idx + 1)) return true;
        }
        write_pair(s_, a, b, 0);
        return false;
    }

    // Pair descriptions between kinds i and j that satisfy every alpha.
    const std::vector<std::uint64_t>& allowed(std::size_t i, std::size_t j) {
        auto& slot = pairs_[i * kinds_.size() + j];
        if (slot) return *slot;
        const Signature& sig = nf_.ext_sig;
        const std::uint64_t etas = std::uint64_t{1} << (2 * sig.binary_count());
        FiniteStructure two(sig, 2);
        write_element(two, 0, kinds_[i]);
        write_element(two, 1, kinds_[j]);
        slot.emplace();
        for (std::uint64_t e = 0; e < etas; ++e) {
            if (++nodes_ > opt_.node_cap) throw ResourceLimit("model search node cap exceeded");
            write_pair(two, 0, 1, e);
            bool ok = true;
            for (const auto& al : alpha_sentences_)
                if (!evaluate(al, two)) {
                    ok = false;
                    break;
                }
            if (ok) slot->push_back(e);
        }
        return *slot;
    }

    const NormalForm& nf_;
    SearchOptions opt_;
    Sentence whole_;
    std::vector<std::uint64_t> kinds_;
    std::vector<std::optional<std::vector<std::uint64_t>>> pairs_;
    std::vector<Sentence> alpha_sentences_;
    std::vector<Sentence> clause_sentences_;
    FiniteStructure s_;
    std::vector<std::size_t> choice_;
    std::vector<std::pair<std::size_t, std::size_t>> order_;
    std::size_t nodes_ = 0;
};

}  // namespace detail

// A model of the normal form with at most max_size elements, if any.
// Element types are enumerated in non-decreasing order, which loses no
// models up to isomorphism.
inline std::optional<FiniteStructure> find_model(const NormalForm& nf, std::size_t max_size,
                                                 const SearchOptions& opt = {}) {
    if (max_size < 1) throw Error("find_model: max_size must be at least 1");
    detail::ModelSearch search(nf, opt);
    for (std::size_t n = 1; n <= max_size; ++n)
        if (auto m = search.run(n)) return m;
    return std::nullopt;
}

// Brute force over all structures for an arbitrary sentence.
inline std::optional<FiniteStructure> find_model(const Sentence& s, const Signature& sig, std::size_t max_size,
                                                 const SearchOptions& opt = {}) {
    if (max_size < 1) throw Error("find_model: max_size must be at least 1");
    const std::size_t width = sig.unary_count() + sig.binary_count();
    const std::size_t pw = 2 * sig.binary_count();
    std::size_t nodes = 0;
    for (std::size_t n = 1; n <= max_size; ++n) {
        const std::size_t npairs = n * (n - 1) / 2;
        if (width * n + pw * npairs > 40) throw CapExceeded("structure space too large for brute force");
        FiniteStructure a(sig, n);
        std::vector<std::uint64_t> kinds(n, 0);
        // Non-decreasing element descriptions, then every pair assignment.
        while (true) {
            for (std::size_t i = 0; i < n; ++i) detail::write_element(a, i, kinds[i]);
            const std::uint64_t total = std::uint64_t{1} << (pw * npairs);
            for (std::uint64_t p = 0; p < total; ++p) {
                if (++nodes > opt.node_cap) throw ResourceLimit("model search node cap exceeded");
                std::size_t k = 0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j, ++k)
                        detail::write_pair(a, i, j, (p >> (pw * k)) & ((std::uint64_t{1} << pw) - 1));
                if (holds(s, a)) return a;
            }
            // Next non-decreasing tuple.
            std::size_t i = n;
            const std::uint64_t top = (std::uint64_t{1} << width) - 1;
            while (i > 0 && kinds[i - 1] == top) --i;
            if (i == 0) break;
            ++kinds[i - 1];
            for (std::size_t j = i; j < n; ++j) kinds[j] = kinds[i - 1];
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Generators

namespace detail {

class Gen {
public:
    Gen(std::uint64_t seed, const Signature& sig) : rng_(seed), sig_(sig) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }

    // Atom over the variables in `vars` (bit mask of x = 1, y = 2).
    Formula atom(std::uint8_t vars) {
        std::vector<Formula> atoms;
        for (Var v : {Var::X, Var::Y}) {
            if (!(vars & var_bit(v))) continue;
            for (const auto& u : sig_.unary()) atoms.push_back(Formula::unary(u, v));
            for (const auto& r : sig_.binary()) atoms.push_back(Formula::binary(r, v, v));
        }
        if (vars == 3)
            for (const auto& r : sig_.binary()) {
                atoms.push_back(Formula::binary(r, Var::X, Var::Y));
                atoms.push_back(Formula::binary(r, Var::Y, Var::X));
            }
        if (atoms.empty()) return Formula::constant(coin());
        return pick(atoms);
    }

    Formula qf(std::uint8_t vars, int size) {
        if (size <= 1) {
            Formula a = atom(vars);
            return coin(0.3) ? Formula::negate(a) : a;
        }
        int left = uniform(1, size - 1);
        Formula l = qf(vars, left);
        Formula r = qf(vars, size - left);
        switch (uniform(0, 2)) {
            case 0: return Formula::conj({l, r});
            case 1: return Formula::disj({l, r});
            default: return Formula::implies(l, r);
        }
    }

    Relation relation() {
        static const std::vector<Relation> rels{Relation::Eq, Relation::Ne, Relation::Le, Relation::Ge,
                                                Relation::Lt, Relation::Gt, Relation::ModEq, Relation::ModNe};
        return pick(rels);
    }

    std::mt19937_64& rng() { return rng_; }
    const Signature& sig() const { return sig_; }

private:
    std::mt19937_64 rng_;
    const Signature& sig_;
};

}  // namespace detail

// Random normal form over sig with |λ| ≤ 3, |δ| ≤ 4 and moduli 2..4.
inline NormalForm random_sentence(std::uint64_t seed, const Signature& sig, int budget) {
    detail::Gen g(seed, sig);
    NormalForm nf;
    nf.ext_sig = sig;
    nf.gamma = Formula::truth();
    if (budget <= 0) return nf;
    if (g.coin(0.6)) nf.gamma = g.qf(1, g.uniform(1, std::max(1, budget / 2)));
    if (sig.binary_count() == 0) return nf;
    const int alphas = g.uniform(0, 2);
    for (int i = 0; i < alphas; ++i)
        nf.alphas.push_back({g.pick(sig.binary()), g.qf(3, g.uniform(1, std::max(1, budget / 2)))});
    if (sig.unary_count() == 0) return nf;
    const int clauses = g.uniform(1, 2);
    for (int i = 0; i < clauses; ++i) {
        BasicLPQ p;
        const int terms = g.uniform(1, 2);
        for (int t = 0; t < terms; ++t) {
            int c = g.uniform(-3, 3);
            if (c == 0) c = 1;
            p.terms.push_back({BigInt(c), g.pick(sig.binary())});
        }
        p.rel = g.relation();
        if (is_modular(p.rel)) p.modulus = g.uniform(2, 4);
        p.rhs = g.uniform(-4, 4);
        nf.lp_clauses.push_back({g.pick(sig.unary()), std::move(p)});
    }
    return nf;
}

namespace detail {

// A formula whose only free variable is v.
inline Formula gp2_formula(Gen& g, Var v, int depth) {
    const Var w = other(v);
    auto qf_over = [&](int size) {
        Formula f = g.qf(3, size);
        return v == Var::X ? f : swap_vars(f);
    };
    auto guard = [&] {
        const std::string& r = g.pick(g.sig().binary());
        return g.coin() ? Atom{Kind::Binary, r, v, w} : Atom{Kind::Binary, r, w, v};
    };
    auto inner = [&] {
        // Body of a quantifier over w: a formula in v and w.
        if (depth > 1 && g.coin(0.4)) return Formula::conj({qf_over(1), gp2_formula(g, w, depth - 1)});
        return qf_over(g.uniform(1, 2));
    };
    const int choice = depth <= 0 || g.sig().binary_count() == 0 ? 0 : g.uniform(0, v == Var::X ? 4 : 3);
    switch (choice) {
        case 0: {
            Formula f = g.qf(1, g.uniform(1, 2));
            return v == Var::X ? f : swap_vars(f);
        }
        case 1: return Formula::exists(w, guard(), inner());
        case 2: return Formula::forall(w, guard(), inner());
        case 3:
            return Formula::conj({gp2_formula(g, v, depth - 1), gp2_formula(g, v, depth - 1)});
        default: {
            // Counting quantifiers always have free variable x.
            LPQuantifier q;
            const int terms = g.uniform(1, 2);
            for (int t = 0; t < terms; ++t) {
                int c = g.uniform(-2, 2);
                if (c == 0) c = 1;
                Atom r = guard();
                Formula body = depth > 1 && g.coin(0.3) ? gp2_formula(g, Var::Y, depth - 1) : g.qf(3, 1);
                q.terms.push_back(CountTerm{BigInt(c), r.name, r.first, r.second, body});
            }
            q.rel = g.relation();
            if (is_modular(q.rel)) q.modulus = g.uniform(2, 3);
            q.rhs = g.uniform(-1, 3);
            Formula f = Formula::count(std::move(q));
            return g.coin(0.3) ? Formula::negate(f) : f;
        }
    }
}

inline Sentence gp2_sentence(Gen& g, int depth) {
    auto closed = [&]() -> Formula {
        if (g.coin(0.6)) return Formula::forall(Var::X, std::nullopt, gp2_formula(g, Var::X, depth));
        if (g.sig().unary_count() > 0) {
            Atom u{Kind::Unary, g.pick(g.sig().unary()), Var::X, Var::X};
            return Formula::exists(Var::X, u, gp2_formula(g, Var::X, depth));
        }
        return Formula::forall(Var::X, std::nullopt, gp2_formula(g, Var::X, depth));
    };
    std::vector<Formula> parts;
    const int n = g.uniform(1, 3);
    for (int i = 0; i < n; ++i) {
        if (g.coin(0.15))
            parts.push_back(Formula::disj({closed(), Formula::negate(closed())}));
        else
            parts.push_back(closed());
    }
    return Formula::conj(std::move(parts));
}

}  // namespace detail

// Random guarded sentence with counting quantifiers over sig.
inline Sentence random_gp2(std::uint64_t seed, const Signature& sig, int depth = 2) {
    detail::Gen g(seed, sig);
    return detail::gp2_sentence(g, depth);
}

// Breaks the guard discipline of one quantifier: the guard is dropped from
// an existential or replaced by an equality.  nullopt if s has no guard.
inline std::optional<Sentence> mutate_guard(const Sentence& s, std::uint64_t seed) {
    std::vector<Formula> guarded;
    std::vector<Formula> stack{s};
    while (!stack.empty()) {
        Formula f = stack.back();
        stack.pop_back();
        if (f.is_quantifier() && f.guard()) guarded.push_back(f);
        for (const auto& c : f.children()) stack.push_back(c);
        if (f.kind() == Kind::Count)
            for (const auto& t : f.count().terms) stack.push_back(t.inner);
    }
    if (guarded.empty()) return std::nullopt;
    std::mt19937_64 rng(seed);
    const Formula target = guarded[std::uniform_int_distribution<std::size_t>(0, guarded.size() - 1)(rng)];
    const bool use_equality = std::bernoulli_distribution(0.5)(rng);
    std::function<Formula(const Formula&)> rewrite = [&](const Formula& f) -> Formula {
        if (f.same_node(target)) {
            std::optional<Atom> g;
            if (use_equality) g = Atom{Kind::Equal, "", Var::X, Var::Y};
            // An unguarded closed ∀ is legal, so always drop to an existential there.
            return use_equality ? (f.kind() == Kind::Forall ? Formula::forall(f.bound(), g, f.body())
                                                            : Formula::exists(f.bound(), g, f.body()))
                                : Formula::exists(f.bound(), std::nullopt, f.body());
        }
        switch (f.kind()) {
            case Kind::Not: return Formula::negate(rewrite(f.children()[0]));
            case Kind::And:
            case Kind::Or: {
                std::vector<Formula> parts;
                for (const auto& c : f.children()) parts.push_back(rewrite(c));
                return f.kind() == Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
            }
            case Kind::Implies: return Formula::implies(rewrite(f.children()[0]), rewrite(f.children()[1]));
            case Kind::Forall: return Formula::forall(f.bound(), f.guard(), rewrite(f.body()));
            case Kind::Exists: return Formula::exists(f.bound(), f.guard(), rewrite(f.body()));
            case Kind::Count: {
                LPQuantifier q = f.count();
                for (auto& t : q.terms) t.inner = rewrite(t.inner);
                return Formula::count(std::move(q));
            }
            default: return f;
        }
    };
    return rewrite(s);
}

}  // namespace gp2
