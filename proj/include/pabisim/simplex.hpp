#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pabisim/rational.hpp"

namespace pabisim {

/// Dense two-phase simplex over an exact or floating number field, for the
/// small equality-form programs this library produces:
///
///     min c.x   subject to   A x = b,  x >= 0.
///
/// Pivoting uses Bland's rule (lowest eligible variable index enters, lowest
/// basic index leaves among ratio ties), so runs are deterministic and, over
/// Rational, guaranteed to terminate. Problem sizes here are tiny (tens of
/// rows), so no effort is spent on sparsity.

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename T>
struct LpProblem {
    std::vector<std::vector<T>> a;  // m rows, n columns
    std::vector<T> b;               // m
    std::vector<T> c;               // n (empty means pure feasibility)
};

template <typename T>
struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    T value{};
    std::vector<T> x;
};

template <typename T>
struct SimplexTraits;

template <>
struct SimplexTraits<Rational> {
    static bool is_zero(const Rational& x) { return x.is_zero(); }
    static bool is_neg(const Rational& x) { return x.is_negative(); }
    static bool is_pos(const Rational& x) { return x.is_positive(); }
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
};

template <>
struct SimplexTraits<double> {
    static constexpr double eps = 1e-11;
    static bool is_zero(double x) { return std::fabs(x) <= eps; }
    static bool is_neg(double x) { return x < -eps; }
    static bool is_pos(double x) { return x > eps; }
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
};

template <typename T>
class SimplexSolver {
    using Tr = SimplexTraits<T>;

public:
    LpSolution<T> solve(const LpProblem<T>& p) {
        rows_ = p.a.size();
        n_ = rows_ ? p.a[0].size() : (p.c.empty() ? 0 : p.c.size());
        for (const auto& row : p.a)
            if (row.size() != n_) throw std::invalid_argument("simplex: ragged constraint matrix");
        if (p.b.size() != rows_) throw std::invalid_argument("simplex: rhs size mismatch");
        if (!p.c.empty() && p.c.size() != n_)
            throw std::invalid_argument("simplex: objective size mismatch");

        width_ = n_ + rows_;
        tab_.assign(rows_, std::vector<T>(width_ + 1, Tr::zero()));
        basis_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            bool flip = Tr::is_neg(p.b[i]);
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? -p.a[i][j] : p.a[i][j];
            tab_[i][n_ + i] = Tr::one();
            tab_[i][width_] = flip ? -p.b[i] : p.b[i];
            basis_[i] = n_ + i;
        }

        // Phase 1: minimize the sum of artificials.
        obj_.assign(width_ + 1, Tr::zero());
        for (std::size_t j = 0; j < n_; ++j) {
            T acc = Tr::zero();
            for (std::size_t i = 0; i < rows_; ++i) acc += tab_[i][j];
            obj_[j] = -acc;
        }
        {
            T acc = Tr::zero();
            for (std::size_t i = 0; i < rows_; ++i) acc += tab_[i][width_];
            obj_[width_] = -acc;  // negated objective value
        }
        run(width_);

        LpSolution<T> out;
        if (!Tr::is_zero(obj_[width_])) {
            out.status = LpStatus::Infeasible;
            return out;
        }

        drive_out_artificials();

        // Phase 2 with the real objective (skipped for pure feasibility).
        if (!p.c.empty()) {
            obj_.assign(width_ + 1, Tr::zero());
            std::vector<T> cost(width_, Tr::zero());
            for (std::size_t j = 0; j < n_; ++j) cost[j] = p.c[j];
            for (std::size_t j = 0; j < width_; ++j) obj_[j] = cost[j];
            obj_[width_] = Tr::zero();
            for (std::size_t i = 0; i < rows_; ++i) {
                const T& cb = cost[basis_[i]];
                if (Tr::is_zero(cb)) continue;
                for (std::size_t j = 0; j <= width_; ++j) obj_[j] -= cb * tab_[i][j];
            }
            if (!run(n_)) {
                out.status = LpStatus::Unbounded;
                return out;
            }
        }

        out.status = LpStatus::Optimal;
        out.x.assign(n_, Tr::zero());
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < n_) out.x[basis_[i]] = tab_[i][width_];
        if (!p.c.empty()) {
            T v = Tr::zero();
            for (std::size_t j = 0; j < n_; ++j) v += p.c[j] * out.x[j];
            out.value = v;
        }
        return out;
    }

private:
    // One simplex phase restricted to the first `limit` columns. Returns
    // false when a column proves the objective unbounded below.
    bool run(std::size_t limit) {
        const std::size_t max_pivots = 200000;
        for (std::size_t iter = 0;; ++iter) {
            if (iter > max_pivots) throw std::runtime_error("simplex: pivot limit exceeded");
            std::size_t enter = width_;
            for (std::size_t j = 0; j < limit; ++j) {
                if (Tr::is_neg(obj_[j])) {
                    enter = j;
                    break;  // Bland: lowest index
                }
            }
            if (enter == width_) return true;  // optimal

            std::size_t leave = rows_;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (!Tr::is_pos(tab_[i][enter])) continue;
                if (leave == rows_) {
                    leave = i;
                    continue;
                }
                T lhs = tab_[i][width_] * tab_[leave][enter];
                T rhs = tab_[leave][width_] * tab_[i][enter];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == rows_) return false;  // unbounded
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        T inv = tab_[r][c];
        for (std::size_t j = 0; j <= width_; ++j) tab_[r][j] /= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r || Tr::is_zero(tab_[i][c])) continue;
            T f = tab_[i][c];
            for (std::size_t j = 0; j <= width_; ++j) tab_[i][j] -= f * tab_[r][j];
            tab_[i][c] = Tr::zero();
        }
        if (!Tr::is_zero(obj_[c])) {
            T f = obj_[c];
            for (std::size_t j = 0; j <= width_; ++j) obj_[j] -= f * tab_[r][j];
            obj_[c] = Tr::zero();
        }
        basis_[r] = c;
    }

    // After phase 1, pivot artificial variables out of the basis; rows that
    // cannot be pivoted are redundant equations and get removed.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < rows_;) {
            if (basis_[i] < n_) {
                ++i;
                continue;
            }
            std::size_t col = width_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!Tr::is_zero(tab_[i][j])) {
                    col = j;
                    break;
                }
            }
            if (col == width_) {
                tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                --rows_;
            } else {
                pivot(i, col);
                ++i;
            }
        }
    }

    std::size_t rows_ = 0, n_ = 0, width_ = 0;
    std::vector<std::vector<T>> tab_;
    std::vector<T> obj_;
    std::vector<std::size_t> basis_;
};

template <typename T>
LpSolution<T> solve_lp(const LpProblem<T>& p) {
    SimplexSolver<T> s;
    return s.solve(p);
}

/// Exact feasibility: some x >= 0 with A x = b. Returns a witness.
inline std::optional<std::vector<Rational>> nonneg_solution(
    const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b) {
    LpProblem<Rational> p{a, b, {}};
    auto sol = solve_lp(p);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    return sol.x;
}

}  // namespace pabisim
