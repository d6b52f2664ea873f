#include "gp2/cli.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace gp2;
using nlohmann::json;

namespace {

struct Ran {
    int code;
    json out;
};

Ran run_on(const std::string& text, RunConfig cfg = {}) {
    std::ostringstream out, err;
    int code = run(cfg, text, out, err);
    return {code, json::parse(out.str())};
}

}  // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_on(fixtures::phi_text).code, exit_sat);
    EXPECT_EQ(run_on(fixtures::no_edges_text).code, exit_unsat);
    Ran bad = run_on("forall x . (U(x) &");
    EXPECT_EQ(bad.code, exit_error);
    EXPECT_EQ(bad.out["error"]["kind"], "parse");
}

TEST(Cli, UnguardedInputIsAnError) {
    Ran r = run_on("unary U; forall x . forall y . (U(x) -> U(y))");
    EXPECT_EQ(r.code, exit_error);
    EXPECT_EQ(r.out["error"]["kind"], "guard");
}

TEST(Cli, TypeCap) {
    RunConfig cfg;
    cfg.type_cap = 1;
    Ran r = run_on(fixtures::phi_text, cfg);
    EXPECT_EQ(r.code, exit_error);
}

TEST(Cli, WitnessAndPrefix) {
    RunConfig cfg;
    cfg.mode = Mode::Prefix;
    cfg.prefix_len = 5;
    Ran r = run_on(fixtures::phi_text, cfg);
    ASSERT_EQ(r.code, exit_sat);
    EXPECT_TRUE(r.out.contains("prefix"));
    cfg.mode = Mode::Witness;
    Ran w = run_on(fixtures::phi_text, cfg);
    ASSERT_EQ(w.code, exit_sat);
    EXPECT_EQ(w.out["witness"]["verified"], true);
}

TEST(Cli, NormalizeOnly) {
    RunConfig cfg;
    cfg.mode = Mode::NormalizeOnly;
    Ran r = run_on("forall x . 1*#[R(x,y)]{U(y)} >= 1", cfg);
    ASSERT_EQ(r.code, exit_sat);
    EXPECT_FALSE(r.out["definitions"].empty());
    EXPECT_TRUE(r.out["normal_form"].is_string());
}

TEST(Cli, InfinitySemantics) {
    RunConfig cfg;
    EXPECT_EQ(run_on(fixtures::needs_infinity_text, cfg).code, exit_unsat);
    cfg.semantics = Semantics::NatInfinity;
    EXPECT_EQ(run_on(fixtures::needs_infinity_text, cfg).code, exit_sat);
}

TEST(Cli, SameSeedSameOutput) {
    RunConfig cfg;
    cfg.mode = Mode::Prefix;
    cfg.seed = 9;
    cfg.trace = true;
    EXPECT_EQ(run_on(fixtures::phi_text, cfg).out.dump(), run_on(fixtures::phi_text, cfg).out.dump());
}

TEST(Cli, ExternalSolverGarbage) {
    RunConfig cfg;
    cfg.external = "cat > /dev/null; echo nonsense";
    Ran r = run_on(fixtures::phi_text, cfg);
    EXPECT_EQ(r.code, exit_error);
    EXPECT_EQ(r.out["error"]["kind"], "solver");
}
