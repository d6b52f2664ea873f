#pragma once

// Orchestration behind the command-line tool: parse, normalize, build the
// type graph, eliminate, and report as JSON.

#include "gp2/elimination.hpp"
#include "gp2/normalizer.hpp"
#include "gp2/parser.hpp"
#include "gp2/witness.hpp"

#include "json.hpp"

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace gp2 {

enum class Mode : std::uint8_t { Sat, Witness, Prefix, NormalizeOnly, GraphDump };

struct RunConfig {
    Mode mode = Mode::Sat;
    Semantics semantics = Semantics::Nat;
    std::optional<std::string> external;
    std::size_t prefix_len = 10;
    std::uint64_t seed = 0;
    bool stats = false;
    bool trace = false;
    unsigned jobs = 1;
    std::size_t type_cap = default_type_cap;
    std::size_t node_budget = SolverOptions{}.node_budget;
    BigInt mod_cap = SolverOptions{}.mod_cap;
    std::size_t element_cap = PrefixOptions{}.element_cap;
};

enum ExitCode : int { exit_sat = 0, exit_unsat = 1, exit_error = 2 };

namespace json_io {

using nlohmann::json;

inline json atoms(const TypeSpace& ts, UnaryType pi) { return ts.positive_atoms(pi); }
inline json atoms(const TypeSpace& ts, BinaryType eta) { return ts.positive_atoms(eta); }

inline json count(const ExtNat& v) {
    if (v.infinite) return "inf";
    if (fits_int64(v.value)) return static_cast<std::int64_t>(v.value);
    return to_string(v.value);
}

inline json witness(const Witness& w) {
    const TypeSpace& ts = w.graph.space();
    json out;
    out["vertices"] = json::array();
    for (const auto& v : w.graph.vertices()) out["vertices"].push_back(atoms(ts, v));
    out["edges"] = json::array();
    for (const auto& e : w.graph.edges()) {
        json je{{"source", atoms(ts, e.source)}, {"eta", atoms(ts, e.label)}, {"target", atoms(ts, e.target)}};
        je["solution"] = json::array();
        auto it = w.solutions.find(e);
        if (it != w.solutions.end())
            for (const auto& [k, v] : it->second)
                je["solution"].push_back({{"eta", atoms(ts, k.eta)}, {"pi", atoms(ts, k.pi_prime)}, {"count", count(v)}});
        out["edges"].push_back(std::move(je));
    }
    return out;
}

inline json prefix(const ModelPrefix& p, const PrefixReport& r, const TypeSpace& ts) {
    json out;
    out["processed"] = p.processed;
    out["elements"] = json::array();
    for (std::size_t i = 0; i < p.elements.size(); ++i) {
        json e{{"index", i + 1}, {"type", atoms(ts, p.elements[i])}};
        e["status"] = i < p.processed ? "processed" : "pending";
        if (i < p.case_used.size()) e["case"] = p.case_used[i];
        out["elements"].push_back(std::move(e));
    }
    out["pairs"] = json::array();
    for (const auto& [key, eta] : p.pairs)
        out["pairs"].push_back({{"from", key.first + 1}, {"to", key.second + 1}, {"eta", atoms(ts, eta)}});
    out["report"] = {{"ok", r.ok()}, {"violations", r.violations}, {"pending", r.pending}};
    return out;
}

inline std::string error_kind(const std::exception& ex) {
    if (dynamic_cast<const SignatureError*>(&ex)) return "signature";
    if (dynamic_cast<const CapExceeded*>(&ex)) return "cap";
    if (dynamic_cast<const ResourceLimit*>(&ex)) return "resource";
    if (dynamic_cast<const SolverFailure*>(&ex)) return "solver";
    if (dynamic_cast<const InternalError*>(&ex)) return "internal";
    return "error";
}

inline json trace(const EliminationTrace& t, const TypeSpace& ts) {
    json events = json::array();
    for (const auto& e : t.events) {
        if (e.what == TraceEvent::What::Edge) {
            events.push_back({{"kind", "edge"},
                              {"sweep", e.sweep},
                              {"source", atoms(ts, e.edge.source)},
                              {"eta", atoms(ts, e.edge.label)},
                              {"target", atoms(ts, e.edge.target)},
                              {"system", e.system}});
        } else {
            events.push_back(
                {{"kind", "vertex"}, {"sweep", e.sweep}, {"vertex", atoms(ts, e.vertex)}, {"clause", e.clause + 1}});
        }
    }
    return events;
}

}  // namespace json_io

// 2^{4n+8m}, the bound on solver calls for n unary and m binary predicates.
inline BigInt solver_call_bound(const Signature& sig) {
    return BigInt(1) << static_cast<unsigned>(4 * sig.unary_count() + 8 * sig.binary_count());
}

inline int run(const RunConfig& cfg, std::string_view input, std::ostream& out, std::ostream& err) {
    using nlohmann::json;
    const auto started = std::chrono::steady_clock::now();
    json result;
    int code = exit_error;
    try {
        Problem problem = parse_problem(input);
        auto violations = validate_guarded(problem.sentence);
        if (!violations.empty()) {
            json list = json::array();
            for (const auto& v : violations) list.push_back({{"subformula", v.subformula}, {"reason", v.reason}});
            result = {{"status", "error"},
                      {"error", {{"kind", "guard"}, {"message", "sentence is not guarded"}, {"violations", list}}}};
            out << result.dump(2) << '\n';
            return exit_error;
        }
        NormalForm nf = normalize(problem.sentence, problem.sig);
        if (cfg.mode == Mode::NormalizeOnly) {
            json defs = json::array();
            for (const auto& d : nf.definitions)
                defs.push_back(d.name + (d.arity == 1 ? "(x)" : "(x,y)") + " := " + pretty(d.definition));
            result = {{"status", "ok"},
                      {"normal_form", pretty(nf)},
                      {"definitions", defs},
                      {"input_size", problem.sentence.size()},
                      {"output_size", nf_size(nf)}};
            out << result.dump(2) << '\n';
            return exit_sat;
        }
        CompiledNormalForm cnf(nf, cfg.type_cap);
        if (cfg.mode == Mode::GraphDump) {
            result = {{"status", "ok"}, {"graph", build_graph(cnf).dump()}};
            out << result.dump(2) << '\n';
            return exit_sat;
        }
        EliminationOptions eo;
        eo.semantics = cfg.semantics;
        eo.solver.node_budget = cfg.node_budget;
        eo.solver.mod_cap = cfg.mod_cap;
        eo.external = cfg.external;
        eo.seed = cfg.seed;
        eo.jobs = cfg.jobs;
        eo.record_systems = cfg.trace;
        const bool need_witness = cfg.mode == Mode::Witness || cfg.mode == Mode::Prefix;
        Decision d = decide(nf, eo, cfg.type_cap, need_witness);
        const TypeSpace& ts = cnf.space();
        result["status"] = d.sat ? "sat" : "unsat";
        code = d.sat ? exit_sat : exit_unsat;
        if (d.sat && d.witness) {
            auto problems = verify_witness(*d.witness, cnf);
            if (!problems.empty()) throw InternalError("witness failed verification: " + problems.front());
            if (cfg.mode == Mode::Witness) {
                result["witness"] = json_io::witness(*d.witness);
                result["witness"]["verified"] = true;
                if (d.witness->used_zero_times_infinity) result["witness"]["zero_times_infinity"] = true;
            } else {
                PrefixOptions po;
                po.element_cap = cfg.element_cap;
                ModelPrefix p = expand_prefix(*d.witness, cfg.prefix_len, cfg.seed, po);
                result["prefix"] = json_io::prefix(p, check_prefix(p, *d.witness, cnf), ts);
            }
        }
        if (!d.sat) result["reason"] = d.reason;
        if (cfg.stats) {
            const auto& t = d.result.trace;
            const BigInt bound = solver_call_bound(nf.ext_sig);
            result["stats"] = {{"unary_predicates", ts.n()},
                               {"binary_predicates", ts.m()},
                               {"initial_vertices", d.initial.vertex_count()},
                               {"initial_edges", d.initial.edge_count()},
                               {"final_vertices", d.result.graph.vertex_count()},
                               {"final_edges", d.result.graph.edge_count()},
                               {"sweeps", t.sweeps},
                               {"edges_removed", t.edges_removed},
                               {"vertices_removed", t.vertices_removed},
                               {"solver_calls", t.solver_calls},
                               {"solver_call_bound", "2^" + std::to_string(4 * ts.n() + 8 * ts.m())},
                               {"within_call_bound", BigInt(t.solver_calls) <= bound}};
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            err << "wall time: " << secs << " s\n";
        }
        if (cfg.trace) result["trace"] = json_io::trace(d.result.trace, ts);
    } catch (const ParseError& ex) {
        result = {{"status", "error"},
                  {"error", {{"kind", "parse"}, {"message", ex.detail()}, {"line", ex.line()}, {"column", ex.column()}}}};
        code = exit_error;
    } catch (const std::exception& ex) {
        result = {{"status", "error"}, {"error", {{"kind", json_io::error_kind(ex)}, {"message", ex.what()}}}};
        code = exit_error;
    }
    out << result.dump(2) << '\n';
    return code;
}

}  // namespace gp2
