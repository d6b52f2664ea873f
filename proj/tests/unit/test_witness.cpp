#include "gp2/gp2.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gp2;

namespace {

struct Phi {
    Problem problem = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(problem.sentence, problem.sig);
    Decision d = decide(nf);
};

// One U-type whose elements are pairwise R-linked both ways, exactly once.
NormalForm symmetric_single() {
    NormalForm nf;
    nf.ext_sig = Signature({"U"}, {"R"});
    nf.gamma = Formula::conj({Formula::unary("U", Var::X), Formula::negate(Formula::binary("R", Var::X, Var::X))});
    nf.alphas.push_back({"R", Formula::binary("R", Var::Y, Var::X)});
    nf.lp_clauses.push_back({"U", BasicLPQ{{{1, "R"}}, Relation::Eq, 0, 1}});
    return nf;
}

}  // namespace

TEST(Witness, SingleEdge) {
    NormalForm nf;
    nf.ext_sig = Signature({"U"}, {"R"});
    nf.gamma = Formula::truth();
    CompiledNormalForm cnf(nf);
    TypeGraph h(std::make_shared<const TypeSpace>(cnf.space()));
    const Configuration e{UnaryType{0}, BinaryType{0b11}, UnaryType{0}};
    h.add_vertex(e.source);
    h.add_edge(e);
    Witness w = make_witness(h, cnf);
    ASSERT_EQ(w.solutions.size(), 1U);
    const Solution& s = w.solutions.at(e);
    ASSERT_EQ(s.size(), 1U);
    EXPECT_EQ(s.begin()->second, (ExtNat{false, 1}));
    EXPECT_TRUE(verify_witness(w, cnf).empty());
}

TEST(Witness, EmptyGraphIsAnError) {
    NormalForm nf;
    nf.ext_sig = Signature({"U"}, {"R"});
    nf.gamma = Formula::truth();
    CompiledNormalForm cnf(nf);
    EXPECT_THROW(make_witness(TypeGraph(std::make_shared<const TypeSpace>(cnf.space())), cnf), Error);
}

TEST(Witness, PhiOutCountIsTwo) {
    Phi phi;
    ASSERT_TRUE(phi.d.witness.has_value());
    CompiledNormalForm cnf(phi.nf);
    EXPECT_TRUE(verify_witness(*phi.d.witness, cnf).empty());
    const std::size_t r = *phi.nf.ext_sig.binary_index("R");
    for (const auto& [e, sol] : phi.d.witness->solutions) {
        BigInt out = 0;
        for (const auto& [k, v] : sol)
            if (cnf.space().has_forward(k.eta, r)) out += v.value;
        EXPECT_EQ(out, 2);
    }
}

TEST(Witness, DecrementedCountIsCaught) {
    Phi phi;
    ASSERT_TRUE(phi.d.witness.has_value());
    CompiledNormalForm cnf(phi.nf);
    Witness w = *phi.d.witness;
    auto& sol = w.solutions.begin()->second;
    ASSERT_FALSE(sol.empty());
    for (auto& [k, v] : sol) v.value -= 1;
    auto bad = verify_witness(w, cnf);
    ASSERT_FALSE(bad.empty());
    EXPECT_NE(bad.front().find("violates"), std::string::npos);
}

TEST(Witness, MissingInverseIsCaught) {
    NormalForm nf;
    nf.ext_sig = Signature({"U"}, {"R"});
    nf.gamma = Formula::truth();
    CompiledNormalForm cnf(nf);
    TypeGraph h(std::make_shared<const TypeSpace>(cnf.space()));
    const Configuration e{UnaryType{0}, BinaryType{0b01}, UnaryType{1}};
    h.add_vertex(e.source);
    h.add_vertex(e.target);
    h.add_arc(e);
    Witness w;
    w.graph = h;
    w.solutions[e][VarKey{e.label, e.target}] = ExtNat{false, 1};
    auto bad = verify_witness(w, cnf);
    bool symmetry = false;
    for (const auto& m : bad) symmetry |= m.find("inverse") != std::string::npos;
    EXPECT_TRUE(symmetry);
}

TEST(Prefix, ZeroIterations) {
    Phi phi;
    ASSERT_TRUE(phi.d.witness.has_value());
    CompiledNormalForm cnf(phi.nf);
    ModelPrefix p = expand_prefix(*phi.d.witness, 0, 0);
    EXPECT_EQ(p.processed, 0U);
    EXPECT_TRUE(p.pairs.empty());
    EXPECT_TRUE(check_prefix(p, *phi.d.witness, cnf).ok());
}

TEST(Prefix, OneIterationOnASymmetricEdge) {
    NormalForm nf = symmetric_single();
    Decision d = decide(nf);
    ASSERT_TRUE(d.sat);
    ASSERT_EQ(d.good.vertex_count(), 1U);
    ASSERT_EQ(d.good.edge_count(), 1U);
    CompiledNormalForm cnf(nf);
    ModelPrefix p = expand_prefix(*d.witness, 1, 0);
    EXPECT_EQ(p.processed, 1U);
    ASSERT_EQ(p.case_used.size(), 1U);
    EXPECT_EQ(p.case_used[0], 2);
    EXPECT_EQ(p.elements.size(), 2U);
    EXPECT_TRUE(check_prefix(p, *d.witness, cnf).ok());
}

TEST(Prefix, PhiDegrees) {
    Phi phi;
    CompiledNormalForm cnf(phi.nf);
    ModelPrefix p = expand_prefix(*phi.d.witness, 7, 3);
    ASSERT_TRUE(check_prefix(p, *phi.d.witness, cnf).ok());
    const std::size_t r = *phi.nf.ext_sig.binary_index("R");
    for (std::size_t a = 0; a < p.processed; ++a) {
        std::size_t out = 0, in = 0;
        for (std::size_t b = 0; b < p.elements.size(); ++b) {
            out += cnf.space().has_forward(p.type_between(a, b), r);
            in += cnf.space().has_forward(p.type_between(b, a), r);
        }
        EXPECT_EQ(out, 2U);
        EXPECT_LE(in, 1U);
    }
}

TEST(Prefix, DroppedPairIsCaught) {
    Phi phi;
    CompiledNormalForm cnf(phi.nf);
    ModelPrefix p = expand_prefix(*phi.d.witness, 3, 0);
    ASSERT_FALSE(p.pairs.empty());
    p.pairs.erase(p.pairs.begin());
    EXPECT_FALSE(check_prefix(p, *phi.d.witness, cnf).ok());
}

TEST(Prefix, SeedDeterminism) {
    Phi phi;
    ModelPrefix a = expand_prefix(*phi.d.witness, 7, 42);
    ModelPrefix b = expand_prefix(*phi.d.witness, 7, 42);
    EXPECT_EQ(a.elements, b.elements);
    EXPECT_EQ(a.pairs, b.pairs);
}
