#include "gp2/gp2.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gp2;

TEST(Normalizer, PhiShape) {
    Problem p = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(p.sentence, p.sig);
    EXPECT_TRUE(check_normal_form(nf).empty());
    EXPECT_EQ(nf.lp_clauses.size(), 2U);
    std::vector<Relation> rels;
    for (const auto& c : nf.lp_clauses) rels.push_back(c.constraint.rel);
    EXPECT_NE(std::find(rels.begin(), rels.end(), Relation::Eq), rels.end());
    EXPECT_NE(std::find(rels.begin(), rels.end(), Relation::Le), rels.end());
    EXPECT_TRUE(nf.ext_sig.unary_index("U").has_value());
}

TEST(Normalizer, FreshBinaryForCountedFormula) {
    Problem p = fixtures::problem("forall x . 1*#[R(x,y)]{U(y)} >= 1");
    NormalForm nf = normalize(p.sentence, p.sig);
    ASSERT_EQ(nf.lp_clauses.size(), 1U);
    const BasicLPQ& c = nf.lp_clauses[0].constraint;
    ASSERT_EQ(c.terms.size(), 1U);
    EXPECT_NE(c.terms[0].relation, "R");
    EXPECT_TRUE(nf.ext_sig.binary_index(c.terms[0].relation).has_value());
    std::size_t on_fresh = 0, on_r = 0;
    for (const auto& a : nf.alphas) {
        on_fresh += a.guard == c.terms[0].relation;
        on_r += a.guard == "R";
    }
    EXPECT_GE(on_fresh, 1U);
    EXPECT_GE(on_r, 1U);
}

TEST(Normalizer, TrueBodyNeedsNoObligations) {
    Problem p = fixtures::problem("forall x . (forall y : R(x,y) . true)");
    NormalForm nf = normalize(p.sentence, p.sig);
    EXPECT_TRUE(nf.alphas.empty());
    EXPECT_TRUE(nf.lp_clauses.empty());
}

TEST(Normalizer, PositiveExistentialBecomesCount) {
    Problem p = fixtures::problem("forall x . exists y : R(x,y) . x != y");
    NormalForm nf = normalize(p.sentence, p.sig);
    ASSERT_EQ(nf.lp_clauses.size(), 1U);
    EXPECT_EQ(nf.lp_clauses[0].constraint.rel, Relation::Ge);
    EXPECT_EQ(nf.lp_clauses[0].constraint.rhs, 1);
}

TEST(Normalizer, IdenticalSubformulasShareOneSymbol) {
    Problem once = fixtures::problem("forall x . 1*#[R(x,y)]{U(y)} >= 1");
    Problem twice = fixtures::problem("forall x . (1*#[R(x,y)]{U(y)} >= 1 & 1*#[R(x,y)]{U(y)} <= 3)");
    NormalForm a = normalize(once.sentence, once.sig);
    NormalForm b = normalize(twice.sentence, twice.sig);
    EXPECT_EQ(a.ext_sig.binary_count(), b.ext_sig.binary_count());
}

TEST(Normalizer, NormalFormIsAFixpoint) {
    Problem p = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(p.sentence, p.sig);
    NormalForm again = normalize(to_sentence(nf), nf.ext_sig);
    EXPECT_EQ(again.lp_clauses.size(), nf.lp_clauses.size());
    EXPECT_EQ(again.alphas.size(), nf.alphas.size());
    EXPECT_TRUE(again.definitions.empty());
}

TEST(Normalizer, RejectsUnguarded) {
    Signature sig({"U"}, {"R"});
    Formula s = Formula::forall(Var::X, std::nullopt,
                                Formula::forall(Var::Y, std::nullopt,
                                                Formula::implies(Formula::unary("U", Var::X), Formula::unary("U", Var::Y))));
    EXPECT_THROW(normalize(s, sig), Error);
}

TEST(Normalizer, ModelsTransfer) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Signature sig = fixtures::signature(1, 1);
        Sentence s = random_gp2(500 + seed, sig, 2);
        NormalForm nf = normalize(s, sig);
        EXPECT_TRUE(check_normal_form(nf).empty());
        auto m = find_model(s, sig, 2);
        if (!m) continue;
        ++checked;
        EXPECT_TRUE(model_check(nf, expand(*m, nf))) << pretty(s);
    }
    EXPECT_GT(checked, 0U);
}
