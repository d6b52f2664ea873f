#pragma once

// The elimination fixpoint: delete bad edges (with their inverses) and bad
// vertices until neither is left.  What remains is the greatest good
// subgraph, or the empty graph.

#include "gp2/constraints.hpp"
#include "gp2/normalizer.hpp"
#include "gp2/witness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace gp2 {

enum class DeletionPolicy : std::uint8_t {
    Sweep,         // all bad edges of a snapshot at once
    SingleEdge,    // one bad edge per round, chosen by the seed
    RandomSubset,  // a random non-empty subset per round
};

struct EliminationOptions {
    Semantics semantics = Semantics::Nat;
    SolverOptions solver;
    std::optional<std::string> external;  // shell command of an external backend
    DeletionPolicy policy = DeletionPolicy::Sweep;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool record_systems = false;  // keep each infeasible system's dump in the trace
};

struct TraceEvent {
    enum class What : std::uint8_t { Edge, Vertex } what = What::Edge;
    std::size_t sweep = 0;
    Configuration edge;
    std::string system;  // dump of Z for a removed edge when recorded
    UnaryType vertex;
    std::size_t clause = 0;  // violated clause of a removed vertex
};

struct EliminationTrace {
    std::vector<TraceEvent> events;
    std::size_t sweeps = 0;
    std::size_t solver_calls = 0;
    std::size_t edges_removed = 0;  // counting each direction
    std::size_t vertices_removed = 0;
};

struct EliminationResult {
    TypeGraph graph;
    EliminationTrace trace;
};

class Eliminator {
public:
    Eliminator(const CompiledNormalForm& cnf, EliminationOptions opt) : cnf_(cnf), opt_(std::move(opt)) {}

    EliminationResult run(TypeGraph g) {
        EliminationResult res;
        std::mt19937_64 rng(opt_.seed);
        purge_vertices(g, res.trace);
        while (true) {
            auto bad = bad_edges(g, res.trace);
            if (bad.empty()) break;
            ++res.trace.sweeps;
            std::vector<std::size_t> chosen(bad.size());
            for (std::size_t i = 0; i < bad.size(); ++i) chosen[i] = i;
            if (opt_.policy == DeletionPolicy::SingleEdge) {
                std::uniform_int_distribution<std::size_t> pick(0, bad.size() - 1);
                chosen = {pick(rng)};
            } else if (opt_.policy == DeletionPolicy::RandomSubset) {
                std::shuffle(chosen.begin(), chosen.end(), rng);
                std::uniform_int_distribution<std::size_t> size(1, bad.size());
                chosen.resize(size(rng));
                std::sort(chosen.begin(), chosen.end());
            }
            for (auto i : chosen) {
                const Configuration& e = bad[i].first;
                if (!g.has_edge(e)) continue;  // already gone as the inverse of another
                g.remove_edge(e);
                res.trace.edges_removed += (e == reverse(e)) ? 1 : 2;
                TraceEvent ev;
                ev.what = TraceEvent::What::Edge;
                ev.sweep = res.trace.sweeps;
                ev.edge = e;
                ev.system = std::move(bad[i].second);
                res.trace.events.push_back(std::move(ev));
            }
            purge_vertices(g, res.trace);
        }
        res.graph = std::move(g);
        return res;
    }

private:
    void purge_vertices(TypeGraph& g, EliminationTrace& trace) {
        for (const auto& v : g.vertices()) {
            auto clause = bad_vertex_clause(g, v, cnf_);
            if (!clause) continue;
            g.remove_vertex(v);
            ++trace.vertices_removed;
            TraceEvent ev;
            ev.what = TraceEvent::What::Vertex;
            ev.sweep = trace.sweeps;
            ev.vertex = v;
            ev.clause = *clause;
            trace.events.push_back(std::move(ev));
        }
    }

    // Bad edges of the snapshot g, each with its system dump when recorded.
    // Two edges out of one source whose anchor columns agree have the same
    // canonical system, so only one representative per group is built.
    std::vector<std::pair<Configuration, std::string>> bad_edges(const TypeGraph& g, EliminationTrace& trace) {
        struct Group {
            std::string key;
            std::vector<Configuration> members;
        };
        std::vector<Group> groups;
        std::map<std::string, ConstraintSystem> unsolved;
        for (const auto& v : g.vertices()) {
            const auto active = cnf_.active_clauses(v);
            // Without obligations the anchor alone is satisfiable.
            if (active.empty()) continue;
            std::map<std::vector<BigInt>, std::size_t> by_column;
            for (const auto& nb : g.neighbors(v)) {
                std::vector<BigInt> column;
                for (auto i : active) column.push_back(cnf_.coefficient(i, nb.eta));
                const Configuration e{v, nb.eta, nb.target};
                auto [it, fresh] = by_column.emplace(std::move(column), groups.size());
                if (!fresh) {
                    groups[it->second].members.push_back(e);
                    continue;
                }
                CanonicalSystem canon = canonicalize(to_constraint_system(build_Z(g, e, cnf_)));
                std::string key = dump(canon.system);
                if (!cache_.count(key)) unsolved.emplace(key, std::move(canon.system));
                groups.push_back({std::move(key), {e}});
            }
        }
        solve_all(unsolved);
        trace.solver_calls += unsolved.size();
        std::vector<std::pair<Configuration, std::string>> out;
        for (const auto& grp : groups) {
            if (cache_.at(grp.key)) continue;
            for (const auto& e : grp.members)
                out.emplace_back(e, opt_.record_systems ? dump(to_constraint_system(build_Z(g, e, cnf_))) : std::string());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool solve_one(const ConstraintSystem& cs) const {
        if (opt_.external) {
            if (opt_.semantics != Semantics::Nat)
                throw SolverFailure("the external backend supports only the finite semantics");
            return external_feasible(*opt_.external, cs);
        }
        return system_feasible(cs, opt_.semantics, opt_.solver);
    }

    void solve_all(const std::map<std::string, ConstraintSystem>& todo) {
        std::vector<const std::pair<const std::string, ConstraintSystem>*> work;
        for (const auto& kv : todo) work.push_back(&kv);
        std::vector<char> answers(work.size(), 0);
        auto attach = [&](std::size_t i, const std::exception& ex) -> std::string {
            return std::string(ex.what()) + "\nsystem:\n" + dump(work[i]->second);
        };
        const unsigned jobs = std::max(1u, std::min<unsigned>(opt_.jobs, static_cast<unsigned>(work.size())));
        if (jobs <= 1) {
            for (std::size_t i = 0; i < work.size(); ++i) {
                try {
                    answers[i] = solve_one(work[i]->second);
                } catch (const SolverFailure& ex) {
                    throw SolverFailure(attach(i, ex));
                } catch (const ResourceLimit& ex) {
                    throw ResourceLimit(attach(i, ex));
                }
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex mu;
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < jobs; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next++) < work.size();) {
                        try {
                            answers[i] = solve_one(work[i]->second);
                        } catch (...) {
                            std::lock_guard<std::mutex> lock(mu);
                            if (!failure) failure = std::current_exception();
                        }
                    }
                });
            for (auto& th : pool) th.join();
            if (failure) std::rethrow_exception(failure);
        }
        for (std::size_t i = 0; i < work.size(); ++i) cache_[work[i]->first] = answers[i] != 0;
    }

    const CompiledNormalForm& cnf_;
    EliminationOptions opt_;
    std::map<std::string, bool> cache_;
};

inline EliminationResult eliminate(const TypeGraph& g, const CompiledNormalForm& cnf,
                                   const EliminationOptions& opt = {}) {
    return Eliminator(cnf, opt).run(g);
}

// Goodness checked directly: symmetric, no bad edge, no bad vertex.
inline bool is_good(const TypeGraph& h, const CompiledNormalForm& cnf, Semantics sem = Semantics::Nat,
                    const SolverOptions& opt = {}) {
    if (!h.symmetric()) return false;
    for (const auto& v : h.vertices())
        if (is_bad_vertex(h, v, cnf)) return false;
    for (const auto& e : h.edges())
        if (is_bad_edge(h, e, cnf, sem, opt)) return false;
    return true;
}

struct Decision {
    bool sat = false;
    TypeGraph initial;       // G_Ψ
    EliminationResult result;
    TypeGraph good;          // the chosen flag class of the final graph (empty when UNSAT)
    std::optional<Witness> witness;
    std::string reason;      // short explanation of an UNSAT verdict
};

// Satisfiability of a normal form.  The final graph splits into classes
// by the values of the sentence flags; a class is usable when it is
// non-empty and realizes every requirement its flags switch on.
inline Decision decide(const NormalForm& nf, const EliminationOptions& opt = {},
                       std::size_t type_cap = default_type_cap, bool want_witness = true) {
    CompiledNormalForm cnf(nf, type_cap);
    Decision d;
    d.initial = build_graph(cnf);
    d.result = eliminate(d.initial, cnf, opt);
    const TypeGraph& fin = d.result.graph;
    if (fin.empty()) {
        d.reason = "every vertex was eliminated";
        return d;
    }
    const TypeSpace& ts = cnf.space();
    std::uint64_t flag_mask = 0;
    for (const auto& f : nf.flags) flag_mask |= std::uint64_t{1} << ts.unary_bit(*nf.ext_sig.unary_index(f));
    std::map<std::uint64_t, std::vector<UnaryType>> classes;
    for (const auto& v : fin.vertices()) classes[v.bits & flag_mask].push_back(v);
    std::vector<std::pair<CompiledFormula, CompiledFormula>> reqs;
    for (const auto& r : nf.requirements) reqs.emplace_back(CompiledFormula(r.when, ts), CompiledFormula(r.witness, ts));
    for (const auto& [flags, members] : classes) {
        const UnaryType sample = members.front();
        bool ok = true;
        for (const auto& [when, wit] : reqs) {
            if (!when.eval(sample, {}, {})) continue;
            bool realized = std::any_of(members.begin(), members.end(),
                                        [&](UnaryType v) { return wit.eval(v, {}, {}); });
            if (!realized) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        d.sat = true;
        d.good = members.size() == fin.vertex_count() ? fin : fin.induced(members);
        if (want_witness) d.witness = make_witness(d.good, cnf, opt.semantics, opt.solver);
        return d;
    }
    d.reason = "no surviving class of types realizes the required elements";
    return d;
}

inline Decision decide(const Sentence& s, const Signature& sig, const EliminationOptions& opt = {},
                       std::size_t type_cap = default_type_cap, bool want_witness = true) {
    return decide(normalize(s, sig), opt, type_cap, want_witness);
}

}  // namespace gp2
