#pragma once

// Feasibility of linear constraints over ℕ and over ℕ ∪ {∞}.
//
// A system is first split into equational branches A·x = b (slack and
// quotient variables absorb inequalities and congruences).  Each branch is
// searched depth first inside the box given by the support and magnitude
// bounds for small solutions of integer programs, so a negative answer is
// exhaustive.  An exact rational LP relaxation and an integer-lattice test
// prune the search; neither is ever used to conclude feasibility.

#include "gp2/bigint.hpp"
#include "gp2/errors.hpp"
#include "gp2/formula.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gp2 {

struct Row {
    std::vector<BigInt> coeffs;
    Relation rel = Relation::Eq;
    BigInt modulus = 0;
    BigInt rhs = 0;

    bool operator==(const Row&) const = default;
};

// Σ_j coeffs_j · z_j ⊛ rhs for every row, z ∈ ℕ^vars.
struct ConstraintSystem {
    std::vector<std::string> names;
    std::vector<Row> rows;

    std::size_t vars() const noexcept { return names.size(); }
};

struct EqSystem {
    std::vector<std::vector<BigInt>> A;
    std::vector<BigInt> b;
    std::vector<std::string> var_names;
    // Columns [0, original) are the variables of the source system.
    std::size_t original = 0;

    std::size_t rows() const noexcept { return A.size(); }
    std::size_t cols() const noexcept { return var_names.size(); }
};

struct SolverOptions {
    std::size_t node_budget = 1'000'000;
    BigInt mod_cap = BigInt(1) << 16;
    std::size_t branch_cap = 1'000'000;
};

using Assignment = std::vector<BigInt>;

inline BigInt row_value(const Row& r, const Assignment& z) {
    BigInt s = 0;
    for (std::size_t j = 0; j < r.coeffs.size(); ++j) s += r.coeffs[j] * z[j];
    return s;
}

inline bool satisfies(const ConstraintSystem& sys, const Assignment& z) {
    if (z.size() != sys.vars()) return false;
    for (const auto& v : z)
        if (v < 0) return false;
    for (const auto& r : sys.rows)
        if (!compare(row_value(r, z), r.rel, r.modulus, r.rhs)) return false;
    return true;
}

inline bool satisfies(const EqSystem& eq, const Assignment& x) {
    if (x.size() != eq.cols()) return false;
    for (const auto& v : x)
        if (v < 0) return false;
    for (std::size_t i = 0; i < eq.rows(); ++i) {
        BigInt s = 0;
        for (std::size_t j = 0; j < eq.cols(); ++j) s += eq.A[i][j] * x[j];
        if (s != eq.b[i]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Bounds

// Largest s with 2^s ≤ (4dM)^{2d}, i.e. floor(2d·log2(4dM)), without floating point.
inline std::size_t sparsity_bound(std::size_t d, BigInt M) {
    if (d == 0) return 0;
    if (M < 1) M = 1;
    BigInt base = BigInt(4) * BigInt(d) * M;
    BigInt p = boost::multiprecision::pow(base, static_cast<unsigned>(2 * d));
    return bit_length(p) - 1;
}

// t·(d·M)^{2d+1}
inline BigInt magnitude_bound(std::size_t t, std::size_t d, BigInt M) {
    if (M < 1) M = 1;
    return BigInt(t) * boost::multiprecision::pow(BigInt(d) * M, static_cast<unsigned>(2 * d + 1));
}

inline BigInt max_entry(const EqSystem& eq) {
    BigInt M = 0;
    for (std::size_t i = 0; i < eq.rows(); ++i) {
        M = std::max(M, big_abs(eq.b[i]));
        for (const auto& a : eq.A[i]) M = std::max(M, big_abs(a));
    }
    return M;
}

// ---------------------------------------------------------------------------
// Equational branches

namespace detail {

struct Piece {
    std::vector<BigInt> coeffs;  // over the original variables
    BigInt rhs;
    int slack = 0;               // +1: Σ + s = rhs, -1: Σ − s = rhs
    BigInt modulus = 0;          // Σ = rhs + modulus·q (q ∈ ℕ) when non-zero
};

inline bool has_negative(const std::vector<BigInt>& c) {
    return std::any_of(c.begin(), c.end(), [](const BigInt& v) { return v < 0; });
}
inline bool all_zero(const std::vector<BigInt>& c) {
    return std::all_of(c.begin(), c.end(), [](const BigInt& v) { return v == 0; });
}

// The alternatives one row contributes; at least one must hold.
inline std::vector<Piece> row_options(const Row& r, const SolverOptions& opt) {
    std::vector<Piece> out;
    auto piece = [&](BigInt rhs, int slack, BigInt modulus = 0) {
        out.push_back(Piece{r.coeffs, std::move(rhs), slack, std::move(modulus)});
    };
    const bool nonneg = !has_negative(r.coeffs);
    switch (r.rel) {
        case Relation::Eq: piece(r.rhs, 0); break;
        case Relation::Le: piece(r.rhs, +1); break;
        case Relation::Ge: piece(r.rhs, -1); break;
        case Relation::Lt: piece(r.rhs - 1, +1); break;
        case Relation::Gt: piece(r.rhs + 1, -1); break;
        case Relation::Ne:
            if (!(nonneg && r.rhs <= 0)) piece(r.rhs - 1, +1);
            piece(r.rhs + 1, -1);
            break;
        case Relation::ModEq:
        case Relation::ModNe: {
            if (r.modulus <= 0) throw Error("congruence modulus must be positive");
            if (r.modulus > opt.mod_cap)
                throw CapExceeded("congruence modulus " + to_string(r.modulus) + " exceeds the cap " +
                                  to_string(opt.mod_cap));
            // Only residues matter, so the coefficients move into [0, d) and
            // Σ − r is never below −d: the quotient is a natural number.
            std::vector<BigInt> reduced;
            for (const auto& c : r.coeffs) reduced.push_back(mod_floor(c, r.modulus));
            BigInt res = mod_floor(r.rhs, r.modulus);
            for (BigInt k = 0; k < r.modulus; ++k) {
                if ((k == res) != (r.rel == Relation::ModEq)) continue;
                out.push_back(Piece{reduced, k, 0, r.modulus});
            }
            break;
        }
    }
    return out;
}

inline EqSystem assemble(const ConstraintSystem& sys, const std::vector<const Piece*>& pieces) {
    EqSystem eq;
    eq.var_names = sys.names;
    eq.original = sys.vars();
    const std::size_t t0 = sys.vars();
    std::vector<std::vector<BigInt>> extra_cols;  // one per added variable, indexed by row
    std::vector<std::string> extra_names;
    const std::size_t d = pieces.size();
    for (std::size_t i = 0; i < d; ++i) {
        const Piece& p = *pieces[i];
        auto add_col = [&](const BigInt& v, std::string name) {
            std::vector<BigInt> col(d, 0);
            col[i] = v;
            extra_cols.push_back(std::move(col));
            extra_names.push_back(std::move(name));
        };
        if (p.slack != 0) add_col(BigInt(p.slack), "s" + std::to_string(i + 1));
        if (p.modulus != 0) add_col(-p.modulus, "q" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<BigInt> row = pieces[i]->coeffs;
        row.resize(t0, 0);
        for (const auto& col : extra_cols) row.push_back(col[i]);
        eq.A.push_back(std::move(row));
        eq.b.push_back(pieces[i]->rhs);
    }
    for (auto& n : extra_names) eq.var_names.push_back(std::move(n));
    return eq;
}

// Calls visit(EqSystem) on each branch until it returns true.
template <class Visit>
bool for_each_branch(const ConstraintSystem& sys, const SolverOptions& opt, Visit&& visit) {
    std::vector<std::vector<Piece>> options;
    BigInt total = 1;
    for (const auto& r : sys.rows) {
        options.push_back(row_options(r, opt));
        if (options.back().empty()) return false;
        total *= options.back().size();
    }
    if (total > opt.branch_cap) throw ResourceLimit("too many equational branches (" + to_string(total) + ")");
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
        std::vector<const Piece*> pieces;
        for (std::size_t i = 0; i < options.size(); ++i) pieces.push_back(&options[i][pick[i]]);
        if (visit(assemble(sys, pieces))) return true;
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == pick.size()) return false;
    }
}

}  // namespace detail

inline std::vector<EqSystem> to_equational(const ConstraintSystem& sys, const SolverOptions& opt = {}) {
    std::vector<EqSystem> out;
    detail::for_each_branch(sys, opt, [&](EqSystem eq) {
        out.push_back(std::move(eq));
        return false;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Pruning tests

namespace detail {

// Is A·x = b solvable over ℤ?  Column operations bring A to lower echelon
// form H = A·U; then H·y = b is solved by forward substitution.
inline bool integer_feasible(std::vector<std::vector<BigInt>> A, std::vector<BigInt> b) {
    const std::size_t d = A.size();
    if (d == 0) return true;
    const std::size_t t = A[0].size();
    std::size_t col = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
    for (std::size_t i = 0; i < d && col < t; ++i) {
        // Euclid across columns col..t-1 of row i.
        while (true) {
            std::size_t best = t;
            for (std::size_t j = col; j < t; ++j)
                if (A[i][j] != 0 && (best == t || big_abs(A[i][j]) < big_abs(A[i][best]))) best = j;
            if (best == t) break;
            if (best != col)
                for (std::size_t r = 0; r < d; ++r) std::swap(A[r][best], A[r][col]);
            bool done = true;
            for (std::size_t j = col + 1; j < t; ++j) {
                if (A[i][j] == 0) continue;
                BigInt f = floor_div(A[i][j], A[i][col]);
                for (std::size_t r = 0; r < d; ++r) A[r][j] -= f * A[r][col];
                if (A[i][j] != 0) done = false;
            }
            if (done) break;
        }
        if (A[i][col] != 0) {
            pivots.emplace_back(i, col);
            ++col;
        }
    }
    // Forward substitution on the echelon form.
    std::vector<BigInt> y(t, 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < d; ++i) {
        BigInt s = 0;
        std::size_t limit = (next < pivots.size() && pivots[next].first == i) ? pivots[next].second : col;
        for (std::size_t j = 0; j < limit; ++j) s += A[i][j] * y[j];
        BigInt residual = b[i] - s;
        if (next < pivots.size() && pivots[next].first == i) {
            const BigInt& p = A[i][pivots[next].second];
            if (residual % p != 0) return false;
            y[pivots[next].second] = residual / p;
            ++next;
        } else if (residual != 0) {
            return false;
        }
    }
    return true;
}

// Is {A·x = b, lo ≤ x ≤ hi} feasible over ℚ?  Phase one of the simplex
// method on exact rationals with Bland's rule.
inline bool rational_feasible(const std::vector<std::vector<BigInt>>& A, const std::vector<BigInt>& b,
                              const std::vector<BigInt>& lo, const std::vector<BigInt>& hi) {
    const std::size_t d = A.size();
    const std::size_t t = lo.size();
    // x = lo + u, 0 ≤ u ≤ hi − lo.  Columns: u (t), w (t, upper-bound slacks), a (d, artificials).
    const std::size_t rows = d + t;
    const std::size_t cols = 2 * t + d;
    std::vector<std::vector<BigRational>> T(rows, std::vector<BigRational>(cols + 1, 0));
    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < d; ++i) {
        BigInt rhs = b[i];
        for (std::size_t j = 0; j < t; ++j) rhs -= A[i][j] * lo[j];
        const int sign = rhs < 0 ? -1 : 1;
        for (std::size_t j = 0; j < t; ++j) T[i][j] = BigRational(A[i][j] * sign);
        T[i][2 * t + i] = 1;
        T[i][cols] = BigRational(rhs * sign);
        basis[i] = 2 * t + i;
    }
    for (std::size_t j = 0; j < t; ++j) {
        const std::size_t i = d + j;
        T[i][j] = 1;
        T[i][t + j] = 1;
        T[i][cols] = BigRational(hi[j] - lo[j]);
        basis[i] = t + j;
    }
    // Objective: minimize Σ artificials, expressed in the non-basic columns.
    std::vector<BigRational> obj(cols + 1, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= cols; ++j)
            if (j < 2 * t || j == cols) obj[j] -= T[i][j];
    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (obj[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = rows;
        BigRational best;
        for (std::size_t i = 0; i < rows; ++i) {
            if (T[i][enter] <= 0) continue;
            BigRational ratio = T[i][cols] / T[i][enter];
            if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == rows) break;  // unbounded direction cannot lower a bounded objective
        BigRational piv = T[leave][enter];
        for (auto& v : T[leave]) v /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            BigRational f = T[i][enter];
            for (std::size_t j = 0; j <= cols; ++j)
                if (T[leave][j] != 0) T[i][j] -= f * T[leave][j];
        }
        if (obj[enter] != 0) {
            BigRational f = obj[enter];
            for (std::size_t j = 0; j <= cols; ++j)
                if (T[leave][j] != 0) obj[j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }
    return obj[cols] == 0;
}

class BranchAndBound {
public:
    BranchAndBound(const EqSystem& eq, const SolverOptions& opt) : eq_(eq), opt_(opt) {}

    std::optional<Assignment> run() {
        const std::size_t t = eq_.cols();
        const std::size_t d = eq_.rows();
        bound_ = magnitude_bound(std::max<std::size_t>(t, 1), std::max<std::size_t>(d, 1), max_entry(eq_));
        support_ = sparsity_bound(std::max<std::size_t>(d, 1), max_entry(eq_));
        std::vector<BigInt> lo(t, 0), hi(t, bound_);
        if (!integer_feasible(eq_.A, eq_.b)) return std::nullopt;
        if (search(lo, hi)) return solution_;
        return std::nullopt;
    }

    const BigInt& magnitude() const noexcept { return bound_; }
    std::size_t support() const noexcept { return support_; }

private:
    // Interval propagation over the equality rows.  False on a wipe-out.
    bool propagate(std::vector<BigInt>& lo, std::vector<BigInt>& hi) const {
        const std::size_t t = lo.size();
        for (int round = 0; round < 32; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < eq_.rows(); ++i) {
                const auto& a = eq_.A[i];
                BigInt smin = 0, smax = 0;
                for (std::size_t j = 0; j < t; ++j) {
                    if (a[j] > 0) {
                        smin += a[j] * lo[j];
                        smax += a[j] * hi[j];
                    } else if (a[j] < 0) {
                        smin += a[j] * hi[j];
                        smax += a[j] * lo[j];
                    }
                }
                if (smin > eq_.b[i] || smax < eq_.b[i]) return false;
                for (std::size_t j = 0; j < t; ++j) {
                    if (a[j] == 0 || lo[j] == hi[j]) continue;
                    // a_j·x_j = b − rest, rest ∈ [smin − own_min, smax − own_max].
                    BigInt own_min = a[j] > 0 ? a[j] * lo[j] : a[j] * hi[j];
                    BigInt own_max = a[j] > 0 ? a[j] * hi[j] : a[j] * lo[j];
                    BigInt rest_min = smin - own_min;
                    BigInt rest_max = smax - own_max;
                    BigInt vmin = eq_.b[i] - rest_max;  // range of a_j·x_j
                    BigInt vmax = eq_.b[i] - rest_min;
                    BigInt nlo, nhi;
                    if (a[j] > 0) {
                        nlo = ceil_div(vmin, a[j]);
                        nhi = floor_div(vmax, a[j]);
                    } else {
                        nlo = ceil_div(vmax, a[j]);
                        nhi = floor_div(vmin, a[j]);
                    }
                    if (nlo > lo[j]) {
                        lo[j] = nlo;
                        changed = true;
                    }
                    if (nhi < hi[j]) {
                        hi[j] = nhi;
                        changed = true;
                    }
                    if (lo[j] > hi[j]) return false;
                }
            }
            if (!changed) break;
        }
        return true;
    }

    bool lattice_ok(const std::vector<BigInt>& lo, const std::vector<BigInt>& hi) const {
        // Substitute fixed variables and test the rest over ℤ.
        std::vector<std::size_t> freev;
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (lo[j] != hi[j]) freev.push_back(j);
        std::vector<std::vector<BigInt>> A;
        std::vector<BigInt> b;
        for (std::size_t i = 0; i < eq_.rows(); ++i) {
            BigInt rhs = eq_.b[i];
            std::vector<BigInt> row;
            for (std::size_t j = 0; j < lo.size(); ++j) {
                if (lo[j] == hi[j])
                    rhs -= eq_.A[i][j] * lo[j];
                else
                    row.push_back(eq_.A[i][j]);
            }
            if (all_zero(row)) {
                if (rhs != 0) return false;
                continue;
            }
            A.push_back(std::move(row));
            b.push_back(std::move(rhs));
        }
        return integer_feasible(std::move(A), std::move(b));
    }

    bool search(std::vector<BigInt> lo, std::vector<BigInt> hi) {
        if (++nodes_ > opt_.node_budget)
            throw ResourceLimit("solver node budget of " + std::to_string(opt_.node_budget) + " exhausted");
        if (!propagate(lo, hi)) return false;
        const std::size_t t = lo.size();
        std::size_t positive = 0;
        for (std::size_t j = 0; j < t; ++j)
            if (lo[j] >= 1) ++positive;
        if (positive > support_) return false;
        // Pick the open variable with the largest coefficient magnitude.
        std::size_t pick = t;
        BigInt weight = -1;
        for (std::size_t j = 0; j < t; ++j) {
            if (lo[j] == hi[j]) continue;
            BigInt w = 0;
            for (std::size_t i = 0; i < eq_.rows(); ++i) w = std::max(w, big_abs(eq_.A[i][j]));
            if (w > weight) {
                weight = w;
                pick = j;
            }
        }
        if (pick == t) {
            if (!satisfies(eq_, lo)) return false;
            solution_ = lo;
            return true;
        }
        if (weight == 0) {
            // The variable occurs in no row; zero is as good as anything.
            hi[pick] = lo[pick];
            return search(std::move(lo), std::move(hi));
        }
        if (!lattice_ok(lo, hi)) return false;
        if (!rational_feasible(eq_.A, eq_.b, lo, hi)) return false;
        const BigInt width = hi[pick] - lo[pick];
        if (width < 8) {
            for (BigInt v = lo[pick]; v <= hi[pick]; ++v) {
                auto l2 = lo, h2 = hi;
                l2[pick] = h2[pick] = v;
                if (search(std::move(l2), std::move(h2))) return true;
            }
            return false;
        }
        {
            auto l2 = lo, h2 = hi;
            h2[pick] = lo[pick];
            if (search(std::move(l2), std::move(h2))) return true;
        }
        const BigInt mid = lo[pick] + 1 + (hi[pick] - lo[pick] - 1) / 2;
        {
            auto l2 = lo, h2 = hi;
            l2[pick] = lo[pick] + 1;
            h2[pick] = mid;
            if (search(std::move(l2), std::move(h2))) return true;
        }
        auto l2 = std::move(lo), h2 = std::move(hi);
        l2[pick] = mid + 1;
        return search(std::move(l2), std::move(h2));
    }

    const EqSystem& eq_;
    const SolverOptions& opt_;
    BigInt bound_;
    std::size_t support_ = 0;
    std::size_t nodes_ = 0;
    Assignment solution_;
};

}  // namespace detail

// A non-negative integer solution of A·x = b, or nullopt when none exists.
// Returned solutions have at most sparsity_bound non-zero entries, each at
// most magnitude_bound.
inline std::optional<Assignment> feasible(const EqSystem& eq, const SolverOptions& opt = {}) {
    // Zero rows are either trivially true or make the system infeasible.
    EqSystem reduced;
    reduced.var_names = eq.var_names;
    reduced.original = eq.original;
    for (std::size_t i = 0; i < eq.rows(); ++i) {
        if (detail::all_zero(eq.A[i])) {
            if (eq.b[i] != 0) return std::nullopt;
            continue;
        }
        reduced.A.push_back(eq.A[i]);
        reduced.b.push_back(eq.b[i]);
    }
    if (reduced.rows() == 0) return Assignment(eq.cols(), 0);
    auto sol = detail::BranchAndBound(reduced, opt).run();
    if (sol && !satisfies(eq, *sol)) throw InternalError("solver produced an assignment that fails a row");
    return sol;
}

namespace detail {

// Identical columns are interchangeable; merge them into one variable.
struct Compression {
    ConstraintSystem system;
    std::vector<std::size_t> representative;  // compressed column → first original column
    std::vector<std::size_t> group;           // original column → compressed column
};

inline Compression compress(const ConstraintSystem& sys) {
    Compression c;
    std::map<std::vector<BigInt>, std::size_t> seen;
    c.group.resize(sys.vars());
    for (std::size_t j = 0; j < sys.vars(); ++j) {
        std::vector<BigInt> col;
        for (const auto& r : sys.rows) col.push_back(r.coeffs[j]);
        auto [it, fresh] = seen.emplace(col, c.representative.size());
        if (fresh) {
            c.representative.push_back(j);
            c.system.names.push_back(sys.names[j]);
        }
        c.group[j] = it->second;
    }
    for (const auto& r : sys.rows) {
        Row nr{std::vector<BigInt>(c.representative.size()), r.rel, r.modulus, r.rhs};
        for (std::size_t k = 0; k < c.representative.size(); ++k) nr.coeffs[k] = r.coeffs[c.representative[k]];
        c.system.rows.push_back(std::move(nr));
    }
    return c;
}

}  // namespace detail

inline std::optional<Assignment> feasible_system(const ConstraintSystem& sys, const SolverOptions& opt = {}) {
    for (const auto& r : sys.rows)
        if (r.coeffs.size() != sys.vars()) throw Error("constraint row width does not match the variable count");
    auto comp = detail::compress(sys);
    std::optional<Assignment> found;
    detail::for_each_branch(comp.system, opt, [&](const EqSystem& eq) {
        auto sol = feasible(eq, opt);
        if (!sol) return false;
        found = Assignment(sys.vars(), 0);
        for (std::size_t k = 0; k < comp.representative.size(); ++k) (*found)[comp.representative[k]] = (*sol)[k];
        return true;
    });
    if (found && !satisfies(sys, *found)) throw InternalError("solver produced an assignment that fails a row");
    return found;
}

// ---------------------------------------------------------------------------
// ℕ ∪ {∞}

struct ExtNat {
    bool infinite = false;
    BigInt value = 0;

    static ExtNat inf() { return {true, 0}; }
    bool operator==(const ExtNat&) const = default;
};

inline std::string to_string(const ExtNat& v) { return v.infinite ? "inf" : to_string(v.value); }

// ∞ + a = ∞
inline ExtNat operator+(const ExtNat& a, const ExtNat& b) {
    if (a.infinite || b.infinite) return ExtNat::inf();
    return {false, a.value + b.value};
}

// c·∞ = ∞ for c ≥ 1 and 0·∞ = 0.
inline ExtNat scale(const BigInt& c, const ExtNat& a) {
    if (c < 0) throw Error("negative coefficient in extended arithmetic");
    if (a.infinite) return c == 0 ? ExtNat{} : ExtNat::inf();
    return {false, c * a.value};
}

// lhs ⊛ rhs over ℕ ∪ {∞}: a ≤ ∞, ∞ ≤ ∞, ∞ ≡_d ∞ and ∞ ≢_d a for finite a.
inline bool compare_ext(const ExtNat& lhs, Relation r, const BigInt& modulus, const ExtNat& rhs) {
    if (!lhs.infinite && !rhs.infinite) return compare(lhs.value, r, modulus, rhs.value);
    const bool both = lhs.infinite && rhs.infinite;
    switch (r) {
        case Relation::Eq: return both;
        case Relation::Ne: return !both;
        case Relation::Le: return rhs.infinite;
        case Relation::Ge: return lhs.infinite;
        case Relation::Lt: return !lhs.infinite;
        case Relation::Gt: return !rhs.infinite;
        case Relation::ModEq: return both;
        case Relation::ModNe: return !both;
    }
    return false;
}

// A row read with the negative terms moved across: Σ⁺ + max(0,−δ) ⊛ Σ⁻ + max(0,δ).
inline bool row_holds_ext(const Row& r, const std::vector<ExtNat>& z) {
    ExtNat left{false, r.rhs < 0 ? BigInt(-r.rhs) : BigInt(0)};
    ExtNat right{false, r.rhs > 0 ? r.rhs : BigInt(0)};
    for (std::size_t j = 0; j < r.coeffs.size(); ++j) {
        if (r.coeffs[j] > 0) left = left + scale(r.coeffs[j], z[j]);
        if (r.coeffs[j] < 0) right = right + scale(-r.coeffs[j], z[j]);
    }
    return compare_ext(left, r.rel, r.modulus, right);
}

inline bool satisfies_ext(const ConstraintSystem& sys, const std::vector<ExtNat>& z) {
    if (z.size() != sys.vars()) return false;
    for (const auto& r : sys.rows)
        if (!row_holds_ext(r, z)) return false;
    return true;
}

struct InfinityResult {
    std::vector<ExtNat> assignment;
    // Some ∞ variable met a zero coefficient, so the 0·∞ = 0 completion was used.
    bool used_zero_times_infinity = false;
};

// Guess the set S of variables that are ∞, decide the rows with an infinite
// side by the extended table, and solve the remaining rows over ℕ.  Sets are
// tried by increasing size, so finite solutions are preferred.
inline std::optional<InfinityResult> feasible_infinity(const ConstraintSystem& sys, const SolverOptions& opt = {}) {
    auto comp = detail::compress(sys);
    const ConstraintSystem& cs = comp.system;
    const std::size_t t = cs.vars();
    if (t > 20) throw ResourceLimit("too many distinct variables for the infinity guess");
    std::vector<std::uint32_t> masks;
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << t); ++s) masks.push_back(s);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    for (std::uint32_t S : masks) {
        std::vector<ExtNat> probe(t);
        for (std::size_t j = 0; j < t; ++j)
            if ((S >> j) & 1U) probe[j] = ExtNat::inf();
        ConstraintSystem rest;
        std::vector<std::size_t> finite_vars;
        for (std::size_t j = 0; j < t; ++j)
            if (!((S >> j) & 1U)) {
                finite_vars.push_back(j);
                rest.names.push_back(cs.names[j]);
            }
        bool ok = true;
        bool zero_inf = false;
        for (const auto& r : cs.rows) {
            bool touches = false;
            for (std::size_t j = 0; j < t; ++j)
                if ((S >> j) & 1U) {
                    if (r.coeffs[j] != 0)
                        touches = true;
                    else
                        zero_inf = true;
                }
            if (touches) {
                // The infinite side decides the row whatever the finite values are.
                if (!row_holds_ext(r, probe)) {
                    ok = false;
                    break;
                }
                continue;
            }
            Row nr{{}, r.rel, r.modulus, r.rhs};
            for (auto j : finite_vars) nr.coeffs.push_back(r.coeffs[j]);
            rest.rows.push_back(std::move(nr));
        }
        if (!ok) continue;
        auto sol = feasible_system(rest, opt);
        if (!sol) continue;
        InfinityResult res;
        res.assignment.assign(sys.vars(), ExtNat{});
        std::vector<ExtNat> compressed(t);
        for (std::size_t k = 0; k < finite_vars.size(); ++k) compressed[finite_vars[k]] = {false, (*sol)[k]};
        for (std::size_t j = 0; j < t; ++j)
            if ((S >> j) & 1U) compressed[j] = ExtNat::inf();
        for (std::size_t k = 0; k < t; ++k) res.assignment[comp.representative[k]] = compressed[k];
        res.used_zero_times_infinity = zero_inf;
        if (!satisfies_ext(sys, res.assignment))
            throw InternalError("infinity solver produced an assignment that fails a row");
        return res;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dump format and the external backend

inline std::string relation_dump_token(const Row& r) {
    switch (r.rel) {
        case Relation::ModEq: return "=mod:" + to_string(r.modulus);
        case Relation::ModNe: return "!=mod:" + to_string(r.modulus);
        default: return std::string(relation_token(r.rel));
    }
}

inline std::string dump(const ConstraintSystem& sys) {
    std::ostringstream os;
    os << "vars " << sys.vars();
    for (const auto& n : sys.names) os << ' ' << n;
    os << '\n';
    for (const auto& r : sys.rows) {
        for (const auto& c : r.coeffs) os << c << ' ';
        os << relation_dump_token(r) << ' ' << r.rhs << '\n';
    }
    return os.str();
}

// Parses one or more blank-line separated systems.
inline std::vector<ConstraintSystem> parse_dump(const std::string& text) {
    std::vector<ConstraintSystem> out;
    std::istringstream in(text);
    std::string line;
    ConstraintSystem* cur = nullptr;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> words;
        for (std::string w; ls >> w;) words.push_back(w);
        if (words.empty()) {
            cur = nullptr;
            continue;
        }
        if (words[0] == "vars") {
            out.emplace_back();
            cur = &out.back();
            if (words.size() < 2) throw Error("dump: missing variable count");
            std::size_t k = std::stoul(words[1]);
            if (words.size() != k + 2) throw Error("dump: variable count does not match the identifiers");
            cur->names.assign(words.begin() + 2, words.end());
            continue;
        }
        if (!cur) throw Error("dump: constraint outside a system");
        const std::size_t k = cur->vars();
        if (words.size() != k + 2) throw Error("dump: constraint has the wrong number of fields");
        Row r;
        for (std::size_t j = 0; j < k; ++j) r.coeffs.push_back(parse_bigint(words[j]));
        const std::string& rel = words[k];
        auto mod = [&](const std::string& prefix) { return parse_bigint(rel.substr(prefix.size())); };
        if (rel == "=") r.rel = Relation::Eq;
        else if (rel == "!=") r.rel = Relation::Ne;
        else if (rel == "<=") r.rel = Relation::Le;
        else if (rel == ">=") r.rel = Relation::Ge;
        else if (rel == "<") r.rel = Relation::Lt;
        else if (rel == ">") r.rel = Relation::Gt;
        else if (rel.rfind("=mod:", 0) == 0) {
            r.rel = Relation::ModEq;
            r.modulus = mod("=mod:");
        } else if (rel.rfind("!=mod:", 0) == 0) {
            r.rel = Relation::ModNe;
            r.modulus = mod("!=mod:");
        } else {
            throw Error("dump: unknown relation token '" + rel + "'");
        }
        r.rhs = parse_bigint(words[k + 1]);
        cur->rows.push_back(std::move(r));
    }
    return out;
}

// Runs `/bin/sh -c command` with the dump on standard input and reads the
// verdict from the first line of standard output.
inline bool external_feasible(const std::string& command, const ConstraintSystem& sys, int timeout_ms = 30000) {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0) throw SolverFailure("pipe failed: " + std::string(std::strerror(errno)));
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw SolverFailure("pipe failed: " + std::string(std::strerror(errno)));
    }
    pid_t pid = fork();
    if (pid < 0) throw SolverFailure("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    const std::string text = dump(sys);
    {
        // The child may exit without reading; ignore SIGPIPE for this write.
        struct sigaction ign {}, old {};
        ign.sa_handler = SIG_IGN;
        sigaction(SIGPIPE, &ign, &old);
        std::size_t off = 0;
        while (off < text.size()) {
            ssize_t n = write(in_pipe[1], text.data() + off, text.size() - off);
            if (n <= 0) break;
            off += static_cast<std::size_t>(n);
        }
        sigaction(SIGPIPE, &old, nullptr);
    }
    close(in_pipe[1]);
    std::string output;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    bool timed_out = false;
    char buf[4096];
    while (true) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd pfd{out_pipe[0], POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc == 0) {
            timed_out = true;
            break;
        }
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        ssize_t n = read(out_pipe[0], buf, sizeof buf);
        if (n <= 0) break;
        output.append(buf, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);
    if (timed_out) kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    if (timed_out) throw SolverFailure("external solver timed out");
    std::string first = output.substr(0, output.find('\n'));
    while (!first.empty() && (first.back() == '\r' || first.back() == ' ')) first.pop_back();
    if (first == "sat") return true;
    if (first == "unsat") return false;
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0 && first.empty())
        throw SolverFailure("external solver exited with status " + std::to_string(WEXITSTATUS(status)));
    throw SolverFailure("external solver answered '" + first + "' instead of sat or unsat");
}

}  // namespace gp2
