#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gpcap {

/// Dense two-phase primal simplex over an ordered field T, with Bland's rule
/// (guaranteed termination). T = double uses small tolerances; T = Rational
/// runs exactly with zero tolerance.
///
/// Solves: minimize c.x subject to A x = b, x >= 0.
template <typename T>
struct SimplexTraits {
  static T zero_tol() { return T(0); }
};
template <>
struct SimplexTraits<double> {
  static double zero_tol() { return 1e-11; }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <typename T>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  T objective{};
  std::vector<T> x;  // primal solution (size n) when optimal
};

template <typename T>
class SimplexSolver {
 public:
  /// a: m rows each of length n; b: length m; c: length n.
  LpResult<T> solve(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T> c) {
    const T tol = SimplexTraits<T>::zero_tol();
    std::size_t m = a.size();
    const std::size_t n = c.size();
    for (auto& row : a)
      if (row.size() != n) throw std::invalid_argument("simplex: ragged constraint matrix");
    if (b.size() != m) throw std::invalid_argument("simplex: rhs size mismatch");

    for (std::size_t i = 0; i < m; ++i) {
      if (b[i] < T(0)) {
        for (auto& v : a[i]) v = -v;
        b[i] = -b[i];
      }
    }

    // Tableau columns: n structural + m artificial, rhs kept separately.
    std::vector<std::vector<T>> tab(m, std::vector<T>(n + m, T(0)));
    std::vector<T> rhs = b;
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) tab[i][j] = a[i][j];
      tab[i][n + i] = T(1);
      basis[i] = n + i;
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<T> phase1_cost(n + m, T(0));
    for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = T(1);
    run(tab, rhs, basis, phase1_cost, n + m, tol);
    T art_sum = T(0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= n) art_sum += rhs[i];
    if (art_sum > tol) return {LpStatus::infeasible, T(0), {}};

    // Drive remaining artificials out of the basis (or drop redundant rows).
    for (std::size_t i = 0; i < m;) {
      if (basis[i] >= n) {
        std::size_t pivot_col = n + m;
        for (std::size_t j = 0; j < n; ++j) {
          if (abs_val(tab[i][j]) > tol) {
            pivot_col = j;
            break;
          }
        }
        if (pivot_col == n + m) {
          tab.erase(tab.begin() + static_cast<std::ptrdiff_t>(i));
          rhs.erase(rhs.begin() + static_cast<std::ptrdiff_t>(i));
          basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
          --m;
          continue;
        }
        pivot(tab, rhs, basis, i, pivot_col);
      }
      ++i;
    }

    // Phase 2 on the structural columns only.
    std::vector<T> cost(n + m, T(0));
    for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
    if (!run(tab, rhs, basis, cost, n, tol)) return {LpStatus::unbounded, T(0), {}};

    LpResult<T> res;
    res.status = LpStatus::optimal;
    res.x.assign(n, T(0));
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (basis[i] < n) res.x[basis[i]] = rhs[i];
    res.objective = T(0);
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    return res;
  }

 private:
  static T abs_val(const T& v) { return v < T(0) ? -v : v; }

  static void pivot(std::vector<std::vector<T>>& tab, std::vector<T>& rhs,
                    std::vector<std::size_t>& basis, std::size_t pr, std::size_t pc) {
    const T p = tab[pr][pc];
    for (auto& v : tab[pr]) v = v / p;
    rhs[pr] = rhs[pr] / p;
    for (std::size_t i = 0; i < tab.size(); ++i) {
      if (i == pr) continue;
      const T f = tab[i][pc];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < tab[i].size(); ++j) tab[i][j] = tab[i][j] - f * tab[pr][j];
      rhs[i] = rhs[i] - f * rhs[pr];
    }
    basis[pr] = pc;
  }

  /// Bland-rule iterations; returns false on unboundedness.
  static bool run(std::vector<std::vector<T>>& tab, std::vector<T>& rhs,
                  std::vector<std::size_t>& basis, const std::vector<T>& cost,
                  std::size_t active_cols, const T& tol) {
    const std::size_t m = tab.size();
    for (;;) {
      // Reduced costs: z_j = cost_j - cost_B . column_j.
      std::size_t enter = active_cols;
      for (std::size_t j = 0; j < active_cols; ++j) {
        T z = cost[j];
        for (std::size_t i = 0; i < m; ++i) {
          if (cost[basis[i]] != T(0)) z -= cost[basis[i]] * tab[i][j];
        }
        if (z < -tol) {
          enter = j;
          break;  // Bland: first improving index
        }
      }
      if (enter == active_cols) return true;  // optimal

      std::size_t leave = m;
      T best_ratio{};
      for (std::size_t i = 0; i < m; ++i) {
        if (tab[i][enter] > tol) {
          const T ratio = rhs[i] / tab[i][enter];
          if (leave == m || ratio < best_ratio ||
              (ratio == best_ratio && basis[i] < basis[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave == m) return false;  // unbounded
      pivot(tab, rhs, basis, leave, enter);
    }
  }
};

/// Convenience entry point.
template <typename T>
LpResult<T> solve_lp(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T> c) {
  return SimplexSolver<T>().solve(std::move(a), std::move(b), std::move(c));
}

}  // namespace gpcap
