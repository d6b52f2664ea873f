// One PASS/FAIL line per acceptance criterion.  Exit status is the number
// of failed criteria.

#include "fixtures.hpp"

#include "gp2/cli.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace gp2;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;

    void fail(const std::string& why) {
        if (pass) note = why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& title, double limit, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& ex) {
        o.fail(std::string("exception: ") + ex.what());
    }
    const double secs = seconds_since(t0);
    if (o.pass && secs > limit) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit) + " s");
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << secs << " s)";
    if (!o.note.empty()) std::cout << " -- " << o.note;
    std::cout << std::endl;
}

// Out- and in-degree of element a along relation r inside the prefix.
std::pair<std::size_t, std::size_t> degrees(const ModelPrefix& p, std::size_t a, std::size_t r) {
    std::size_t out = 0, in = 0;
    for (std::size_t b = 0; b < p.elements.size(); ++b) {
        if (b == a) continue;
        const BinaryType eta = p.type_between(a, b);
        out += (eta.bits >> TypeSpace::forward_bit(r)) & 1U;
        in += (eta.bits >> TypeSpace::backward_bit(r)) & 1U;
    }
    return {out, in};
}

Outcome criterion1() {
    Outcome o;
    Problem pr = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(pr.sentence, pr.sig);
    Decision d = decide(nf);
    if (!d.sat) o.fail("decide returned UNSAT");
    if (find_model(pr.sentence, pr.sig, 3)) o.fail("a finite model of size <= 3 exists");
    if (find_model(nf, 3)) o.fail("the normal form has a finite model of size <= 3");
    if (!o.pass || !d.witness) return o;
    CompiledNormalForm cnf(nf);
    auto bad = verify_witness(*d.witness, cnf);
    if (!bad.empty()) o.fail("witness: " + bad.front());
    ModelPrefix p = expand_prefix(*d.witness, 7, 1);
    PrefixReport rep = check_prefix(p, *d.witness, cnf);
    if (!rep.ok()) o.fail("prefix: " + rep.violations.front());
    if (p.processed != 7) o.fail("prefix processed " + std::to_string(p.processed) + " elements");
    const std::size_t r = *nf.ext_sig.binary_index("R");
    for (std::size_t a = 0; a < p.processed; ++a) {
        auto [out, in] = degrees(p, a, r);
        if (out != 2 || in > 1)
            o.fail("element " + std::to_string(a + 1) + " has out-degree " + std::to_string(out) + " and in-degree " +
                   std::to_string(in));
    }
    return o;
}

Outcome criterion2() {
    Outcome o;
    Problem pr = fixtures::problem(fixtures::no_edges_text);
    NormalForm nf = normalize(pr.sentence, pr.sig);
    Decision d = decide(nf);
    if (d.sat) o.fail("decide returned SAT");
    const std::size_t u = *nf.ext_sig.unary_index("U");
    std::size_t removed = 0;
    for (const auto& ev : d.result.trace.events) {
        if (ev.what != TraceEvent::What::Vertex) continue;
        ++removed;
        if (!((ev.vertex.bits >> u) & 1U)) o.fail("a vertex without U was removed");
    }
    if (removed == 0 || removed != d.initial.vertex_count()) o.fail("not every U-vertex was removed as bad");
    if (!d.result.graph.empty()) o.fail("final graph is not empty");
    return o;
}

// Brute force over [0..20]^t with machine integers.
bool brute_force(const ConstraintSystem& cs) {
    const std::size_t t = cs.vars();
    std::vector<std::int64_t> z(t, 0);
    auto row_ok = [&](const Row& r) {
        std::int64_t s = 0;
        for (std::size_t j = 0; j < t; ++j) s += static_cast<std::int64_t>(r.coeffs[j]) * z[j];
        const std::int64_t rhs = static_cast<std::int64_t>(r.rhs);
        const std::int64_t m = static_cast<std::int64_t>(r.modulus);
        switch (r.rel) {
            case Relation::Eq: return s == rhs;
            case Relation::Ne: return s != rhs;
            case Relation::Le: return s <= rhs;
            case Relation::Ge: return s >= rhs;
            case Relation::Lt: return s < rhs;
            case Relation::Gt: return s > rhs;
            case Relation::ModEq: return (((s - rhs) % m) + m) % m == 0;
            case Relation::ModNe: return (((s - rhs) % m) + m) % m != 0;
        }
        return false;
    };
    while (true) {
        bool all = true;
        for (const auto& r : cs.rows)
            if (!row_ok(r)) {
                all = false;
                break;
            }
        if (all) return true;
        std::size_t j = 0;
        while (j < t && z[j] == 20) z[j++] = 0;
        if (j == t) return false;
        ++z[j];
    }
}

// t ≤ 4 variables, |coeff| ≤ 5, |rhs| ≤ 10, at most 5 rows and moduli ≤ 5.
// The last row caps the sum at 20, so [0..20]^t holds every solution.
ConstraintSystem random_system(std::mt19937_64& rng) {
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    ConstraintSystem cs;
    const int t = uni(1, 4);
    for (int j = 0; j < t; ++j) cs.names.push_back("x" + std::to_string(j + 1));
    const int rows = uni(0, 4);
    static const std::array<Relation, 8> rels{Relation::Eq, Relation::Ne, Relation::Le, Relation::Ge,
                                              Relation::Lt, Relation::Gt, Relation::ModEq, Relation::ModNe};
    for (int i = 0; i < rows; ++i) {
        Row r;
        for (int j = 0; j < t; ++j) r.coeffs.push_back(uni(-5, 5));
        r.rel = rels[static_cast<std::size_t>(uni(0, 7))];
        if (is_modular(r.rel)) r.modulus = uni(2, 5);
        r.rhs = uni(-10, 10);
        cs.rows.push_back(std::move(r));
    }
    cs.rows.push_back(Row{std::vector<BigInt>(static_cast<std::size_t>(t), 1), Relation::Le, 0, 20});
    return cs;
}

// Criterion 8's per-solution check is folded in: every EqSystem solution
// feasible returns must respect both bounds.
std::size_t bound_violations = 0;
std::size_t bound_checks = 0;

Outcome criterion3() {
    Outcome o;
    std::mt19937_64 rng(20261015);
    std::size_t sat = 0;
    for (int k = 0; k < 500; ++k) {
        ConstraintSystem cs = random_system(rng);
        auto got = feasible_system(cs);
        const bool expect = brute_force(cs);
        sat += expect;
        if (got.has_value() != expect) o.fail("instance " + std::to_string(k) + " disagrees:\n" + dump(cs));
        if (got && !satisfies(cs, *got)) o.fail("instance " + std::to_string(k) + " returned a non-solution");
        for (const auto& eq : to_equational(cs)) {
            auto x = feasible(eq);
            if (!x) continue;
            ++bound_checks;
            const std::size_t d = std::max<std::size_t>(eq.rows(), 1);
            const BigInt M = std::max<BigInt>(max_entry(eq), 1);
            std::size_t support = 0;
            BigInt largest = 0;
            for (const auto& v : *x) {
                support += v != 0;
                largest = std::max(largest, v);
            }
            if (support > sparsity_bound(d, M) || largest > magnitude_bound(eq.cols(), d, M)) ++bound_violations;
        }
    }
    o.note = std::to_string(sat) + "/500 feasible";
    return o;
}

// 50 sentences over n + m ≤ 4 with 10 deletion orders each.
std::vector<NormalForm> sat_sentences;
std::size_t call_bound_violations = 0;

bool within_call_bound(const Signature& sig, std::size_t calls) {
    return BigInt(calls) <= (BigInt(1) << static_cast<unsigned>(4 * sig.unary_count() + 8 * sig.binary_count()));
}

Outcome criterion4() {
    Outcome o;
    const auto sigs = fixtures::small_signatures();
    std::size_t nontrivial = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto [n, m] = sigs[s % sigs.size()];
        NormalForm nf = random_sentence(1000 + s, fixtures::signature(n, m), 6);
        CompiledNormalForm cnf(nf);
        TypeGraph g = build_graph(cnf);
        std::string reference;
        for (int order = 0; order < 10; ++order) {
            EliminationOptions opt;
            opt.policy = order == 0 ? DeletionPolicy::Sweep
                                    : (order % 2 ? DeletionPolicy::SingleEdge : DeletionPolicy::RandomSubset);
            opt.seed = static_cast<std::uint64_t>(order) * 7919 + s;
            EliminationResult r = eliminate(g, cnf, opt);
            if (!within_call_bound(nf.ext_sig, r.trace.solver_calls)) ++call_bound_violations;
            const std::string dumped = r.graph.dump();
            if (order == 0) {
                reference = dumped;
                nontrivial += r.trace.edges_removed + r.trace.vertices_removed > 0;
            } else if (dumped != reference) {
                o.fail("sentence " + std::to_string(s) + " differs under order " + std::to_string(order));
            }
        }
        if (decide(nf, {}, default_type_cap, false).sat) sat_sentences.push_back(nf);
    }
    o.note = std::to_string(nontrivial) + "/50 sentences had deletions";
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto sigs = fixtures::small_signatures();
    std::size_t models = 0, unsat = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto [n, m] = sigs[s % sigs.size()];
        NormalForm nf = random_sentence(5000 + s, fixtures::signature(n, m), 6);
        Decision d = decide(nf, {}, default_type_cap, false);
        if (!within_call_bound(nf.ext_sig, d.result.trace.solver_calls)) ++call_bound_violations;
        auto model = find_model(nf, 3);
        models += model.has_value();
        unsat += !d.sat;
        if (model && !d.sat) o.fail("sentence " + std::to_string(s) + " has a finite model but was decided UNSAT");
        if (model && !model_check(nf, *model)) o.fail("find_model returned a non-model for " + std::to_string(s));
        if (d.sat) sat_sentences.push_back(nf);
    }
    o.note = std::to_string(models) + " with finite models, " + std::to_string(unsat) + " UNSAT";
    return o;
}

Outcome criterion6() {
    Outcome o;
    for (std::size_t i = 0; i < sat_sentences.size(); ++i) {
        const NormalForm& nf = sat_sentences[i];
        CompiledNormalForm cnf(nf);
        Decision d = decide(nf);
        if (!d.sat || !d.witness) {
            o.fail("sentence " + std::to_string(i) + " lost its SAT verdict");
            continue;
        }
        auto bad = verify_witness(*d.witness, cnf);
        if (!bad.empty()) o.fail("witness " + std::to_string(i) + ": " + bad.front());
        for (std::uint64_t seed : {1, 2, 3}) {
            ModelPrefix p = expand_prefix(*d.witness, 20, seed);
            PrefixReport rep = check_prefix(p, *d.witness, cnf);
            if (!rep.ok()) o.fail("prefix " + std::to_string(i) + " seed " + std::to_string(seed) + ": " +
                                  rep.violations.front());
        }
    }
    o.note = std::to_string(sat_sentences.size()) + " SAT sentences";
    return o;
}

Outcome criterion7() {
    Outcome o;
    std::vector<std::pair<Sentence, Signature>> corpus;
    for (const char* text : {fixtures::phi_text, fixtures::no_edges_text, fixtures::needs_infinity_text}) {
        Problem pr = fixtures::problem(text);
        corpus.emplace_back(pr.sentence, pr.sig);
    }
    for (std::uint64_t s = 0; s < 200; ++s) {
        Signature sig = fixtures::signature(1 + s % 2, 1);
        corpus.emplace_back(random_gp2(9000 + s, sig, 2), sig);
    }
    double worst = 0;
    std::size_t transferred = 0, out_of_range = 0;
    SearchOptions bounded;
    bounded.node_cap = 500000;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& [s, sig] = corpus[i];
        const std::string tag = "sentence " + std::to_string(i) + " (" + pretty(s) + ")";
        if (!validate_guarded(s).empty()) {
            o.fail(tag + " is not guarded");
            continue;
        }
        NormalForm nf = normalize(s, sig);
        auto shape = check_normal_form(nf);
        if (!shape.empty()) o.fail(tag + " normal form rejected: " + shape.front().reason);
        worst = std::max(worst, static_cast<double>(nf_size(nf)) / static_cast<double>(s.size()));
        if (i < 3) continue;
        // Outside the oracle's range when the type space or the model
        // search exceeds its cap.
        try {
            auto original = find_model(s, sig, 3);
            if (original) {
                ++transferred;
                if (!model_check(nf, expand(*original, nf))) o.fail(tag + ": expanded model fails the normal form");
                if (!decide(nf, {}, default_type_cap, false).sat) o.fail(tag + ": finite model but UNSAT");
            }
            auto normalized = find_model(nf, 2, bounded);
            if (normalized && !holds(s, reduct(*normalized, sig))) o.fail(tag + ": reduct fails the original");
        } catch (const CapExceeded&) {
            ++out_of_range;
        } catch (const ResourceLimit&) {
            ++out_of_range;
        }
    }
    if (worst > 10) o.fail("size ratio " + std::to_string(worst) + " exceeds 10");
    o.note = "worst size ratio " + std::to_string(worst) + ", " + std::to_string(transferred) +
             " models transferred, " + std::to_string(out_of_range) + " sentences beyond the oracle caps";
    return o;
}

Outcome criterion8() {
    Outcome o;
    if (sparsity_bound(1, 1) != 4) o.fail("sparsity_bound(1,1)");
    if (sparsity_bound(2, 3) != 18) o.fail("sparsity_bound(2,3)");
    if (magnitude_bound(3, 2, 2) != 3072) o.fail("magnitude_bound(3,2,2)");
    if (bound_checks == 0) o.fail("no solutions were checked against the bounds");
    if (bound_violations) o.fail(std::to_string(bound_violations) + " solutions outside the bounds");
    if (call_bound_violations) o.fail(std::to_string(call_bound_violations) + " runs over the call bound");
    RunConfig cfg;
    cfg.stats = true;
    std::ostringstream out, err;
    run(cfg, fixtures::phi_text, out, err);
    auto j = nlohmann::json::parse(out.str());
    if (!j.contains("stats") || !j["stats"]["within_call_bound"].get<bool>()) o.fail("--stats call bound");
    o.note = std::to_string(bound_checks) + " solutions checked";
    return o;
}

Outcome criterion9() {
    Outcome o;
    const ExtNat inf = ExtNat::inf(), five{false, 5};
    if (!(inf + inf).infinite || !(inf + five).infinite || !(five + inf).infinite) o.fail("addition with infinity");
    if (!compare_ext(five, Relation::Le, 0, inf)) o.fail("a <= inf");
    if (!compare_ext(inf, Relation::ModEq, 3, inf)) o.fail("inf == inf mod d");
    if (compare_ext(inf, Relation::ModEq, 3, five) || compare_ext(five, Relation::ModEq, 3, inf))
        o.fail("inf != a mod d");
    auto verdict = [](const std::string& text, Semantics sem) {
        Problem pr = fixtures::problem(text);
        EliminationOptions opt;
        opt.semantics = sem;
        return decide(pr.sentence, pr.sig, opt, default_type_cap, false).sat;
    };
    const std::string open = fixtures::needs_infinity_text, capped = fixtures::capped_infinity_text();
    if (verdict(open, Semantics::Nat)) o.fail("the infinity instance is SAT over the naturals");
    if (!verdict(open, Semantics::NatInfinity)) o.fail("the infinity instance is UNSAT with infinity");
    if (verdict(capped, Semantics::Nat)) o.fail("the capped instance is SAT over the naturals");
    if (verdict(capped, Semantics::NatInfinity)) o.fail("the capped instance is SAT with infinity");
    return o;
}

}  // namespace

int main() {
    report(1, "example with only infinite models", 5, criterion1);
    report(2, "edge-free UNSAT instance", 1, criterion2);
    report(3, "solver agrees with brute force", 60, criterion3);
    report(4, "elimination confluence", 600, criterion4);
    report(5, "finite models imply SAT", 600, criterion5);
    report(6, "witnesses and prefixes", 600, criterion6);
    report(7, "normalizer shape, size and model transfer", 600, criterion7);
    report(8, "bounds conformance", 60, criterion8);
    report(9, "infinity semantics", 60, criterion9);
    return failures;
}
