#include "gp2/gp2.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gp2;

namespace {


NormalForm open_nf() {
    NormalForm nf;
    nf.ext_sig = Signature({"U"}, {"R"});
    nf.gamma = Formula::truth();
    return nf;
}

}  // namespace

TEST(TypeGraph, FalseGammaGivesEmptyGraph) {
    NormalForm nf = open_nf();
    nf.gamma = Formula::falsity();
    CompiledNormalForm cnf(nf);
    EXPECT_TRUE(build_graph(cnf).empty());
}

TEST(TypeGraph, FullGraphCounts) {
    NormalForm nf = open_nf();
    CompiledNormalForm cnf(nf);
    TypeGraph g = build_graph(cnf);
    EXPECT_EQ(g.vertex_count(), 4U);
    EXPECT_EQ(g.edge_count(), 4U * 3U * 4U);
    EXPECT_TRUE(g.symmetric());
}

TEST(TypeGraph, PhiEdgesRespectAlphas) {
    Problem p = fixtures::problem(fixtures::phi_text);
    NormalForm nf = normalize(p.sentence, p.sig);
    CompiledNormalForm cnf(nf);
    TypeGraph g = build_graph(cnf);
    ASSERT_FALSE(g.empty());
    for (const auto& e : g.edges()) {
        EXPECT_TRUE(cnf.compatible_config(e.source, e.label, e.target));
        EXPECT_TRUE(g.has_edge(reverse(e)));
    }
}

TEST(TypeGraph, RemoveEdgeRemovesInverse) {
    NormalForm nf = open_nf();
    CompiledNormalForm cnf(nf);
    TypeGraph g = build_graph(cnf);
    const Configuration e{UnaryType{0}, BinaryType{1}, UnaryType{1}};
    ASSERT_TRUE(g.has_edge(e));
    g.remove_edge(e);
    EXPECT_FALSE(g.has_edge(e));
    EXPECT_FALSE(g.has_edge(reverse(e)));
    EXPECT_EQ(g.edge_count(), 48U - 2U);
    EXPECT_TRUE(g.symmetric());
}

TEST(TypeGraph, RemoveSymmetricSelfEdge) {
    NormalForm nf = open_nf();
    CompiledNormalForm cnf(nf);
    TypeGraph g = build_graph(cnf);
    const Configuration e{UnaryType{2}, BinaryType{0b11}, UnaryType{2}};
    ASSERT_EQ(reverse(e), e);
    g.remove_edge(e);
    EXPECT_FALSE(g.has_edge(e));
    EXPECT_EQ(g.edge_count(), 48U - 1U);
}

TEST(TypeGraph, RemoveVertexDropsIncidentEdges) {
    NormalForm nf = open_nf();
    CompiledNormalForm cnf(nf);
    TypeGraph g = build_graph(cnf);
    g.remove_vertex(UnaryType{3});
    EXPECT_EQ(g.vertex_count(), 3U);
    EXPECT_EQ(g.edge_count(), 3U * 3U * 3U);
    EXPECT_TRUE(g.symmetric());
    EXPECT_THROW(g.remove_vertex(UnaryType{3}), Error);
}

TEST(TypeGraph, ConfigCap) {
    NormalForm nf = open_nf();
    CompiledNormalForm cnf(nf);
    EXPECT_THROW(build_graph(cnf, 10), CapExceeded);
}
