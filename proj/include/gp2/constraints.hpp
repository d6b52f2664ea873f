#pragma once

#include "gp2/nat_solver.hpp"
#include "gp2/type_graph.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gp2 {

// z_{η′,π′}: how many neighbours of type π′ the anchor element reaches through η′.
struct VarKey {
    BinaryType eta;
    UnaryType pi_prime;
    auto operator<=>(const VarKey&) const = default;
};

struct LinearConstraint {
    std::map<VarKey, BigInt> coeffs;
    Relation rel = Relation::Eq;
    BigInt modulus = 0;
    BigInt rhs = 0;
    std::size_t clause = 0;  // index of the counting clause it came from
};

struct LinearSystem {
    Configuration anchor;
    LinearConstraint atleast;  // z_{η,π₂} ≥ 1
    std::vector<LinearConstraint> body;
    std::vector<VarKey> variables;
};

// Q_i^{G,π}: the coefficient of z_{η′,π′} is the sum of λ_{i,j} over the
// terms whose relation holds from x to y in η′.
inline LinearConstraint build_Q(const TypeGraph& g, UnaryType pi, const CompiledNormalForm& cnf, std::size_t i) {
    const CompiledClause& c = cnf.clauses().at(i);
    LinearConstraint q;
    q.rel = c.rel;
    q.modulus = c.modulus;
    q.rhs = c.rhs;
    q.clause = i;
    for (const auto& nb : g.neighbors(pi)) {
        BigInt coeff = cnf.coefficient(i, nb.eta);
        if (coeff != 0) q.coeffs.emplace(VarKey{nb.eta, nb.target}, std::move(coeff));
    }
    return q;
}

// Z^G_{π₁,η,π₂}; variables outside every sum except the anchor are dropped.
inline LinearSystem build_Z(const TypeGraph& g, const Configuration& e, const CompiledNormalForm& cnf) {
    if (!g.has_edge(e)) throw Error("build_Z: the anchor is not an edge of the graph");
    LinearSystem z;
    z.anchor = e;
    const VarKey anchor{e.label, e.target};
    z.atleast.coeffs.emplace(anchor, 1);
    z.atleast.rel = Relation::Ge;
    z.atleast.rhs = 1;
    std::map<VarKey, bool> used{{anchor, true}};
    for (auto i : cnf.active_clauses(e.source)) {
        z.body.push_back(build_Q(g, e.source, cnf, i));
        for (const auto& [k, c] : z.body.back().coeffs) used[k] = true;
    }
    for (const auto& [k, b] : used) z.variables.push_back(k);
    return z;
}

// z_<η bits>_<π′ bits> in hexadecimal.
inline std::string var_name(const VarKey& k) {
    std::ostringstream os;
    os << "z_" << std::hex << k.eta.bits << '_' << k.pi_prime.bits;
    return os.str();
}

// The solver's view of a LinearSystem, with columns in the order of z.variables.
inline ConstraintSystem to_constraint_system(const LinearSystem& z) {
    ConstraintSystem cs;
    std::map<VarKey, std::size_t> col;
    for (const auto& k : z.variables) {
        col.emplace(k, cs.names.size());
        cs.names.push_back(var_name(k));
    }
    auto row = [&](const LinearConstraint& c) {
        Row r{std::vector<BigInt>(z.variables.size(), 0), c.rel, c.modulus, c.rhs};
        for (const auto& [k, v] : c.coeffs) r.coeffs[col.at(k)] = v;
        cs.rows.push_back(std::move(r));
    };
    row(z.atleast);
    for (const auto& c : z.body) row(c);
    return cs;
}

// The system with duplicate columns merged and the rest sorted.  Systems
// that agree up to variable names and column order have the same
// canonical form, and a solution of it maps back column by column.
struct CanonicalSystem {
    ConstraintSystem system;
    std::vector<std::size_t> column_of;  // original column → canonical column
};

inline CanonicalSystem canonicalize(const ConstraintSystem& cs) {
    std::vector<std::vector<BigInt>> cols;
    for (std::size_t j = 0; j < cs.vars(); ++j) {
        std::vector<BigInt> c;
        for (const auto& r : cs.rows) c.push_back(r.coeffs[j]);
        cols.push_back(std::move(c));
    }
    std::vector<std::vector<BigInt>> distinct = cols;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    CanonicalSystem out;
    for (std::size_t k = 0; k < distinct.size(); ++k) out.system.names.push_back("c" + std::to_string(k + 1));
    for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        Row r{{}, cs.rows[i].rel, cs.rows[i].modulus, cs.rows[i].rhs};
        for (const auto& c : distinct) r.coeffs.push_back(c[i]);
        out.system.rows.push_back(std::move(r));
    }
    for (const auto& c : cols)
        out.column_of.push_back(
            static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), c) - distinct.begin()));
    return out;
}

inline std::string fingerprint(const ConstraintSystem& cs) { return dump(canonicalize(cs).system); }

enum class Semantics : std::uint8_t { Nat, NatInfinity };

// 0 ⊛ δ, the value of a constraint at the zero assignment.
inline bool zero_satisfies(const CompiledClause& c) { return compare(BigInt(0), c.rel, c.modulus, c.rhs); }

// A vertex with no outgoing edge whose obligations fail at zero.  Returns
// the index of the first violated clause.
inline std::optional<std::size_t> bad_vertex_clause(const TypeGraph& g, UnaryType pi, const CompiledNormalForm& cnf) {
    if (!g.neighbors(pi).empty()) return std::nullopt;
    for (auto i : cnf.active_clauses(pi))
        if (!zero_satisfies(cnf.clauses()[i])) return i;
    return std::nullopt;
}

inline bool is_bad_vertex(const TypeGraph& g, UnaryType pi, const CompiledNormalForm& cnf) {
    return bad_vertex_clause(g, pi, cnf).has_value();
}

inline bool system_feasible(const ConstraintSystem& cs, Semantics sem, const SolverOptions& opt) {
    if (sem == Semantics::Nat) return feasible_system(cs, opt).has_value();
    return feasible_infinity(cs, opt).has_value();
}

inline bool is_bad_edge(const TypeGraph& g, const Configuration& e, const CompiledNormalForm& cnf,
                        Semantics sem = Semantics::Nat, const SolverOptions& opt = {}) {
    return !system_feasible(to_constraint_system(build_Z(g, e, cnf)), sem, opt);
}

}  // namespace gp2
