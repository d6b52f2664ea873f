#pragma once

#include "gp2/gp2.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fixtures {

inline const char* const phi_text =
    "forall x . U(x)\n"
    "& forall x . (U(x) -> 1*#[R(x,y)]{true} = 2)\n"
    "& forall x . (U(x) -> 1*#[R(y,x)]{true} <= 1)\n";

// U everywhere, no R-edges, and U demands an R-successor.
inline const char* const no_edges_text =
    "forall x . U(x)\n"
    "& forall x . forall y : R(x,y) . false\n"
    "& forall x . (U(x) -> 1*#[R(x,y)]{true} >= 1)\n";

// Strictly more R than S and at least as many S as R: only ∞ works.
inline const char* const needs_infinity_text =
    "forall x . U(x)\n"
    "& forall x . (U(x) -> 1*#[R(x,y)]{true} - 1*#[S(x,y)]{true} >= 1)\n"
    "& forall x . (U(x) -> 1*#[S(x,y)]{true} - 1*#[R(x,y)]{true} >= 0)\n";

inline std::string capped_infinity_text() {
    return std::string(needs_infinity_text) + "& forall x . (U(x) -> 1*#[R(x,y)]{true} = 3)\n";
}

inline gp2::Signature signature(std::size_t n, std::size_t m) {
    gp2::Signature sig;
    for (std::size_t i = 0; i < n; ++i) sig.add_unary("U" + std::to_string(i + 1));
    for (std::size_t j = 0; j < m; ++j) sig.add_binary("R" + std::to_string(j + 1));
    return sig;
}

// Signatures with at least one predicate of each arity and n + m ≤ 4.
inline std::vector<std::pair<std::size_t, std::size_t>> small_signatures() {
    return {{1, 1}, {2, 1}, {1, 2}, {3, 1}, {2, 2}, {1, 3}};
}

inline gp2::Problem problem(const std::string& text) { return gp2::parse_problem(text); }

}  // namespace fixtures
