#include "gp2/gp2.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gp2;

namespace {

std::size_t count_nodes(const Formula& f) {
    std::size_t n = f.kind() == Kind::Count ? 1 : 0;
    if (f.is_quantifier()) return n + count_nodes(f.body());
    if (f.kind() == Kind::Count) {
        for (const auto& t : f.count().terms) n += count_nodes(t.inner);
        return n;
    }
    if (!f.is_atom())
        for (const auto& c : f.children()) n += count_nodes(c);
    return n;
}

}  // namespace

TEST(Parser, PhiHasThreeConjunctsAndTwoCounts) {
    Problem p = fixtures::problem(fixtures::phi_text);
    ASSERT_EQ(p.sentence.kind(), Kind::And);
    EXPECT_EQ(p.sentence.children().size(), 3U);
    EXPECT_EQ(count_nodes(p.sentence), 2U);
    EXPECT_EQ(p.sentence.free_vars(), 0);
    EXPECT_TRUE(p.sig.unary_index("U").has_value());
    EXPECT_TRUE(p.sig.binary_index("R").has_value());
}

TEST(Parser, GuardedUniversalWithTrueBody) {
    Problem p = fixtures::problem("forall x : R(x,x) . true");
    EXPECT_EQ(p.sentence.kind(), Kind::Forall);
    EXPECT_EQ(p.sentence.body().kind(), Kind::True);
}

TEST(Parser, MissingConstantIsSyntaxError) {
    EXPECT_THROW(fixtures::problem("forall x . #[R(x,y)]{x != y} = "), ParseError);
}

TEST(Parser, ErrorsCarryPosition) {
    try {
        fixtures::problem("forall x .\n  (U(x) & )");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2U);
    }
}

TEST(Parser, FreeVariableRejected) {
    EXPECT_THROW(fixtures::problem("U(x)"), ParseError);
}

TEST(Parser, DeclaredSignatureRejectsUnknownNames) {
    EXPECT_THROW(fixtures::problem("unary U; binary R; forall x . V(x)"), ParseError);
    EXPECT_THROW(fixtures::problem("unary U; binary R; forall x . U(x,x)"), ParseError);
}

TEST(Parser, RoundTrip) {
    const std::vector<std::string> inputs = {
        fixtures::phi_text,
        fixtures::needs_infinity_text,
        "forall x . (exists y : R(x,y) . (U(y) | !R(y,x)))",
        "forall x . 2*#[R(x,y)]{1*#[R(y,x)]{true} >= 1} !=mod 3 1",
        "forall x . forall y : R(x,y) . (x != y -> (U(x) -> U(y)))",
    };
    for (const auto& in : inputs) {
        Problem p = fixtures::problem(in);
        std::string text = pretty(p.sentence);
        EXPECT_EQ(parse(text, p.sig), p.sentence) << text;
    }
}

TEST(Printer, Constants) {
    EXPECT_EQ(pretty(Formula::truth()), "true");
    EXPECT_EQ(pretty(Formula::falsity()), "false");
}

TEST(Printer, NestedCountsAreParenthesised) {
    Problem p = fixtures::problem("forall x . (1*#[R(x,y)]{1*#[R(y,x)]{true} = 1} = 1 & U(x))");
    std::string text = pretty(p.sentence);
    EXPECT_NE(text.find('('), std::string::npos);
    EXPECT_EQ(parse(text, p.sig), p.sentence);
}

TEST(Validate, PhiIsGuarded) {
    Problem p = fixtures::problem(fixtures::phi_text);
    EXPECT_TRUE(validate_guarded(p.sentence).empty());
}

TEST(Validate, UnguardedInnerUniversal) {
    Signature sig({"U"}, {"R"});
    Formula inner = Formula::forall(Var::Y, std::nullopt,
                                    Formula::implies(Formula::unary("U", Var::X), Formula::unary("U", Var::Y)));
    Formula s = Formula::forall(Var::X, std::nullopt, inner);
    auto v = validate_guarded(s);
    ASSERT_FALSE(v.empty());
    EXPECT_NE(v.front().subformula.find("forall y"), std::string::npos);
}

TEST(Validate, GuardedInnerFormulaOfCount) {
    Problem p = fixtures::problem("forall x . 1*#[R(x,y)]{exists x : R(y,x) . U(x)} >= 1");
    EXPECT_TRUE(validate_guarded(p.sentence).empty());
}

TEST(Simplify, Tautologies) {
    Formula u = Formula::unary("U", Var::X);
    Formula v = Formula::unary("V", Var::X);
    EXPECT_EQ(simplify(Formula::disj({u, Formula::negate(u)})).kind(), Kind::True);
    EXPECT_EQ(simplify(Formula::conj({u, Formula::negate(u)})).kind(), Kind::False);
    EXPECT_EQ(simplify(Formula::implies(u, Formula::implies(v, u))).kind(), Kind::True);
    EXPECT_EQ(simplify(Formula::implies(u, Formula::implies(u, v))), Formula::implies(u, v));
    EXPECT_EQ(simplify(Formula::negate(Formula::negate(u))), u);
}
