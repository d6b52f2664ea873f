#include "gp2/gp2.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gp2;

TEST(Oracle, EvaluatesOnAnExplicitStructure) {
    Signature sig({"U"}, {"R"});
    FiniteStructure a(sig, 2);
    a.set_unary(0, 0, true);
    a.set_binary(0, 0, 1, true);
    EXPECT_TRUE(holds(parse("forall x . (U(x) -> 1*#[R(x,y)]{true} = 1)", sig), a));
    EXPECT_FALSE(holds(parse("forall x . U(x)", sig), a));
    EXPECT_TRUE(holds(parse("forall x . 1*#[R(x,y)]{true} + 1*#[R(y,x)]{true} = 1", sig), a));
    // Counting never includes the element itself.
    a.set_binary(0, 1, 1, true);
    EXPECT_TRUE(holds(parse("forall x . 1*#[R(y,x)]{true} <= 1", sig), a));
}

TEST(Oracle, FindModel) {
    Problem u = fixtures::problem("forall x . U(x)");
    auto m = find_model(u.sentence, u.sig, 3);
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(m->size, 1U);
    Problem phi = fixtures::problem(fixtures::phi_text);
    EXPECT_FALSE(find_model(phi.sentence, phi.sig, 3).has_value());
    Problem none = fixtures::problem(fixtures::no_edges_text);
    EXPECT_FALSE(find_model(none.sentence, none.sig, 3).has_value());
    EXPECT_THROW(find_model(u.sentence, u.sig, 0), Error);
}

TEST(Oracle, NormalFormSearchAgreesOnPhi) {
    Problem phi = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(phi.sentence, phi.sig);
    EXPECT_FALSE(find_model(nf, 3).has_value());
}

TEST(Oracle, RandomSentenceIsDeterministic) {
    Signature sig = fixtures::signature(2, 1);
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        EXPECT_EQ(pretty(random_sentence(seed, sig, 6)), pretty(random_sentence(seed, sig, 6)));
    EXPECT_EQ(pretty(random_gp2(7, sig)), pretty(random_gp2(7, sig)));
}

TEST(Oracle, ZeroBudgetIsTrivial) {
    NormalForm nf = random_sentence(3, fixtures::signature(2, 1), 0);
    EXPECT_EQ(nf.gamma.kind(), Kind::True);
    EXPECT_TRUE(nf.alphas.empty());
    EXPECT_TRUE(nf.lp_clauses.empty());
}

TEST(Oracle, RandomGuardedSentencesValidate) {
    Signature sig = fixtures::signature(2, 2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_TRUE(validate_guarded(random_gp2(seed, sig)).empty());
}
