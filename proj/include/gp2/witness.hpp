#pragma once

// SAT witnesses and finite prefixes of the ω-model they describe.
//
// A witness is a good subgraph H with one solution of Z^H per edge.  The
// prefix builder processes elements a_1, a_2, ... in order: when a_j is
// processed, every pair (a_j, a_k) with k > j receives its binary type, and
// the neighbours a_j still needs are allocated beyond the current frontier.

#include "gp2/constraints.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace gp2 {

using Solution = std::map<VarKey, ExtNat>;  // non-zero entries only

struct Witness {
    TypeGraph graph;
    std::map<Configuration, Solution> solutions;
    Semantics semantics = Semantics::Nat;
    bool used_zero_times_infinity = false;
};

namespace detail {

struct CanonicalAnswer {
    bool feasible = false;
    std::vector<ExtNat> values;
    bool zero_times_infinity = false;
};

// Canonical systems already solved, keyed by their dump.
using AnswerCache = std::map<std::string, CanonicalAnswer>;

// Solves the canonical form of z and spreads the answer back onto z's variables.
inline std::optional<Solution> solve_edge(const LinearSystem& z, Semantics sem, const SolverOptions& opt,
                                          bool* zero_inf = nullptr, AnswerCache* cache = nullptr) {
    ConstraintSystem cs = to_constraint_system(z);
    CanonicalSystem canon = canonicalize(cs);
    auto solve = [&] {
        CanonicalAnswer a;
        if (sem == Semantics::Nat) {
            if (auto sol = feasible_system(canon.system, opt)) {
                a.feasible = true;
                for (auto& v : *sol) a.values.push_back({false, v});
            }
        } else if (auto sol = feasible_infinity(canon.system, opt)) {
            a.feasible = true;
            a.values = sol->assignment;
            a.zero_times_infinity = sol->used_zero_times_infinity;
        }
        return a;
    };
    CanonicalAnswer local;
    const CanonicalAnswer* answer = &local;
    if (cache) {
        std::string key = dump(canon.system);
        auto it = cache->find(key);
        if (it == cache->end()) it = cache->emplace(std::move(key), solve()).first;
        answer = &it->second;
    } else {
        local = solve();
    }
    if (!answer->feasible) return std::nullopt;
    if (zero_inf && answer->zero_times_infinity) *zero_inf = true;
    const auto& values = answer->values;
    Solution out;
    std::vector<bool> placed(values.size(), false);
    for (std::size_t j = 0; j < z.variables.size(); ++j) {
        std::size_t c = canon.column_of[j];
        if (placed[c]) continue;
        placed[c] = true;
        if (values[c].infinite || values[c].value != 0) out[z.variables[j]] = values[c];
    }
    return out;
}

inline ExtNat lookup(const Solution& s, const VarKey& k) {
    auto it = s.find(k);
    return it == s.end() ? ExtNat{} : it->second;
}

}  // namespace detail

inline Witness make_witness(const TypeGraph& h, const CompiledNormalForm& cnf, Semantics sem = Semantics::Nat,
                            const SolverOptions& opt = {}) {
    if (h.empty()) throw Error("make_witness: the graph is empty");
    Witness w;
    w.graph = h;
    w.semantics = sem;
    detail::AnswerCache cache;
    for (const auto& e : h.edges()) {
        auto sol = detail::solve_edge(build_Z(h, e, cnf), sem, opt, &w.used_zero_times_infinity, &cache);
        if (!sol)
            throw InternalError("make_witness: edge " + h.space().describe(e.source) + " | " +
                                h.space().describe(e.label) + " | " + h.space().describe(e.target) +
                                " has no solution");
        w.solutions.emplace(e, std::move(*sol));
    }
    return w;
}

// Rechecks goodness of the witness from scratch.  Empty means valid.
inline std::vector<std::string> verify_witness(const Witness& w, const CompiledNormalForm& cnf) {
    std::vector<std::string> out;
    const TypeGraph& h = w.graph;
    const TypeSpace& ts = h.space();
    auto edge_name = [&](const Configuration& e) {
        return "(" + ts.describe(e.source) + " | " + ts.describe(e.label) + " | " + ts.describe(e.target) + ")";
    };
    if (h.empty()) out.push_back("witness graph is empty");
    if (!h.symmetric()) out.push_back("witness graph is not symmetric");
    for (const auto& e : h.edges())
        if (!h.has_edge(reverse(e))) out.push_back("edge " + edge_name(e) + " has no inverse");
    for (const auto& v : h.vertices()) {
        if (!cnf.compatible_unary(v)) out.push_back("vertex " + ts.describe(v) + " violates gamma");
        if (h.neighbors(v).empty())
            for (auto i : cnf.active_clauses(v))
                if (!zero_satisfies(cnf.clauses()[i]))
                    out.push_back("vertex " + ts.describe(v) + " has no edges but clause " + std::to_string(i + 1) +
                                  " fails at zero");
    }
    for (const auto& e : h.edges()) {
        if (!cnf.compatible_config(e.source, e.label, e.target))
            out.push_back("edge " + edge_name(e) + " is not a compatible configuration");
        auto it = w.solutions.find(e);
        if (it == w.solutions.end()) {
            out.push_back("edge " + edge_name(e) + " has no stored solution");
            continue;
        }
        const Solution& s = it->second;
        for (const auto& [k, v] : s) {
            if (!h.neighbors(e.source).count(Neighbor{k.eta, k.pi_prime}))
                out.push_back("edge " + edge_name(e) + " assigns a count outside the neighbourhood");
            if (v.infinite && w.semantics == Semantics::Nat)
                out.push_back("edge " + edge_name(e) + " uses an infinite count under finite semantics");
        }
        LinearSystem z = build_Z(h, e, cnf);
        auto check = [&](const LinearConstraint& c, const std::string& what) {
            std::vector<ExtNat> vals;
            Row r{{}, c.rel, c.modulus, c.rhs};
            for (const auto& [k, coeff] : c.coeffs) {
                r.coeffs.push_back(coeff);
                vals.push_back(detail::lookup(s, k));
            }
            if (!row_holds_ext(r, vals)) out.push_back("edge " + edge_name(e) + " violates " + what);
        };
        check(z.atleast, "the anchor row z >= 1");
        for (const auto& c : z.body) check(c, "the row of clause " + std::to_string(c.clause + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prefixes

struct PrefixOptions {
    std::size_t element_cap = 100000;
    // Number of elements standing in for an infinite count.
    std::size_t infinity_sample = 3;
};

struct ModelPrefix {
    std::vector<UnaryType> elements;
    // Non-null binary types, keyed (i, k) with i < k and read from a_i towards a_k.
    std::map<std::pair<std::size_t, std::size_t>, BinaryType> pairs;
    std::size_t processed = 0;
    std::vector<std::size_t> frontier;  // p_j before iteration j (1-based sizes)
    std::vector<int> case_used;         // 1 or 2 per processed element, 0 for an isolated type
    std::vector<std::set<VarKey>> infinite_slots;

    BinaryType type_between(std::size_t a, std::size_t b) const {
        if (a == b) return {};
        auto it = pairs.find({std::min(a, b), std::max(a, b)});
        if (it == pairs.end()) return {};
        return a < b ? it->second : reverse(it->second);
    }
};

// Runs J iterations.  The construction starts from one element of every
// vertex type of H so that all of them are realized; when the frontier is
// exhausted a fresh element is taken round-robin over the vertex types.
inline ModelPrefix expand_prefix(const Witness& w, std::size_t J, std::uint64_t seed, const PrefixOptions& opt = {}) {
    const TypeGraph& h = w.graph;
    ModelPrefix p;
    if (J == 0) return p;
    const auto verts = h.vertices();
    if (verts.empty()) throw Error("expand_prefix: the witness graph is empty");
    std::mt19937_64 rng(seed);
    p.elements = verts;
    std::size_t round_robin = 0;
    auto grow = [&](UnaryType t) {
        if (p.elements.size() >= opt.element_cap)
            throw CapExceeded("prefix needs more than " + std::to_string(opt.element_cap) + " elements");
        p.elements.push_back(t);
        return p.elements.size() - 1;
    };
    for (std::size_t j = 0; j < J; ++j) {
        if (j >= p.elements.size()) grow(verts[round_robin++ % verts.size()]);
        p.frontier.push_back(p.elements.size());
        const UnaryType pi1 = p.elements[j];
        // Back-links: non-null pairs with already processed elements.
        std::optional<std::size_t> back;
        for (std::size_t i = 0; i < j; ++i)
            if (!p.type_between(j, i).null()) {
                if (back) throw InternalError("element has two back-links");
                back = i;
            }
        std::optional<Configuration> edge;
        int which = 0;
        if (back) {
            edge = Configuration{pi1, p.type_between(j, *back), p.elements[*back]};
            which = 1;
        } else {
            const auto& out = h.neighbors(pi1);
            if (!out.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
                auto it = out.begin();
                std::advance(it, static_cast<std::ptrdiff_t>(pick(rng)));
                edge = Configuration{pi1, it->eta, it->target};
                which = 2;
            }
        }
        p.case_used.push_back(which);
        p.infinite_slots.emplace_back();
        if (edge) {
            auto sit = w.solutions.find(*edge);
            if (sit == w.solutions.end()) throw Error("expand_prefix: witness lacks a solution for an edge");
            for (const auto& [k, v] : sit->second) {
                std::size_t count;
                if (v.infinite) {
                    count = opt.infinity_sample;
                    p.infinite_slots.back().insert(k);
                } else {
                    if (!fits_int64(v.value) || v.value > BigInt(opt.element_cap))
                        throw CapExceeded("solution count too large to materialize");
                    count = static_cast<std::size_t>(v.value);
                }
                if (which == 1 && k == VarKey{edge->label, edge->target} && count > 0) --count;
                for (std::size_t c = 0; c < count; ++c) {
                    std::size_t idx = grow(k.pi_prime);
                    p.pairs[{j, idx}] = k.eta;
                }
            }
        }
        p.processed = j + 1;
    }
    return p;
}

struct PrefixReport {
    std::vector<std::string> violations;
    std::size_t pending = 0;  // elements whose obligations are not yet checked

    bool ok() const noexcept { return violations.empty(); }
};

inline PrefixReport check_prefix(const ModelPrefix& p, const Witness& w, const CompiledNormalForm& cnf) {
    PrefixReport r;
    const TypeGraph& h = w.graph;
    const std::size_t N = p.elements.size();
    const std::size_t J = p.processed;
    r.pending = N - J;
    auto el = [](std::size_t i) { return "a_" + std::to_string(i + 1); };
    for (std::size_t i = 0; i < N; ++i)
        if (!h.has_vertex(p.elements[i])) r.violations.push_back(el(i) + " has a type outside H");
    if (J > 0)
        for (const auto& v : h.vertices())
            if (std::find(p.elements.begin(), p.elements.end(), v) == p.elements.end())
                r.violations.push_back("vertex " + h.space().describe(v) + " is not realized");
    for (const auto& [key, eta] : p.pairs) {
        const auto [i, k] = key;
        if (i >= k || k >= N) r.violations.push_back("malformed pair key");
        if (eta.null()) continue;
        // (c): no pair between two unprocessed elements is defined yet.
        if (i >= J) r.violations.push_back("pair (" + el(i) + "," + el(k) + ") defined before either end is processed");
        if (!h.has_edge({p.elements[i], eta, p.elements[k]}))
            r.violations.push_back("pair (" + el(i) + "," + el(k) + ") realizes a configuration outside H");
    }
    // (d): an unprocessed element has at most one non-null link to a processed one.
    for (std::size_t k = J; k < N; ++k) {
        std::size_t links = 0;
        for (std::size_t i = 0; i < J; ++i)
            if (!p.type_between(i, k).null()) ++links;
        if (links > 1) r.violations.push_back(el(k) + " has " + std::to_string(links) + " back-links");
    }
    // (e): every processed element satisfies its counting clauses.
    for (std::size_t a = 0; a < J; ++a) {
        std::map<VarKey, BigInt> counts;
        for (std::size_t b = 0; b < N; ++b) {
            BinaryType eta = p.type_between(a, b);
            if (!eta.null()) counts[{eta, p.elements[b]}] += 1;
        }
        const std::set<VarKey> empty;
        const auto& inf = a < p.infinite_slots.size() ? p.infinite_slots[a] : empty;
        for (auto i : cnf.active_clauses(p.elements[a])) {
            const CompiledClause& c = cnf.clauses()[i];
            Row row{{}, c.rel, c.modulus, c.rhs};
            std::vector<ExtNat> vals;
            for (const auto& [k, n] : counts) {
                row.coeffs.push_back(cnf.coefficient(i, k.eta));
                vals.push_back(inf.count(k) ? ExtNat::inf() : ExtNat{false, n});
            }
            if (!row_holds_ext(row, vals))
                r.violations.push_back(el(a) + " violates clause " + std::to_string(i + 1));
        }
    }
    return r;
}

}  // namespace gp2
