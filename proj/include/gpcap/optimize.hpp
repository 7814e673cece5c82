#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gpcap/prob.hpp"

// Multi-start projected search over products of probability simplices: the
// generic engine behind every "sup over coding laws" in the discrete
// evaluators. Deterministic given the seed.

namespace gpcap {

/// Shape of a factored law: a list of blocks, each a (rows x cols) stochastic
/// table whose rows live on the (cols-1)-simplex.
struct LawShape {
  struct Block {
    std::size_t rows;
    std::size_t cols;
  };
  std::vector<Block> blocks;

  std::size_t coord_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.rows * b.cols;
    return n;
  }
  std::size_t row_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.rows;
    return n;
  }
};

/// A point in the product of simplices described by a LawShape.
class SimplexLaw {
 public:
  SimplexLaw(LawShape shape, std::vector<double> values)
      : shape_(std::move(shape)), v_(std::move(values)) {
    if (v_.size() != shape_.coord_count()) throw std::invalid_argument("SimplexLaw: size mismatch");
    offsets_.reserve(shape_.blocks.size());
    std::size_t off = 0;
    for (const auto& b : shape_.blocks) {
      offsets_.push_back(off);
      off += b.rows * b.cols;
    }
  }

  static SimplexLaw uniform(const LawShape& shape) {
    std::vector<double> v;
    v.reserve(shape.coord_count());
    for (const auto& b : shape.blocks) {
      for (std::size_t i = 0; i < b.rows * b.cols; ++i) {
        v.push_back(1.0 / static_cast<double>(b.cols));
      }
    }
    return SimplexLaw(shape, std::move(v));
  }

  static SimplexLaw random_interior(const LawShape& shape, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> v;
    v.reserve(shape.coord_count());
    for (const auto& b : shape.blocks) {
      for (std::size_t r = 0; r < b.rows; ++r) {
        double sum = 0.0;
        std::vector<double> row(b.cols);
        for (auto& x : row) {
          x = exp1(rng) + 1e-12;
          sum += x;
        }
        for (auto& x : row) v.push_back(x / sum);
      }
    }
    return SimplexLaw(shape, std::move(v));
  }

  const LawShape& shape() const { return shape_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  std::span<double> row(std::size_t block, std::size_t r) {
    const auto& b = shape_.blocks[block];
    return std::span<double>(v_.data() + offsets_[block] + r * b.cols, b.cols);
  }
  std::span<const double> row(std::size_t block, std::size_t r) const {
    const auto& b = shape_.blocks[block];
    return std::span<const double>(v_.data() + offsets_[block] + r * b.cols, b.cols);
  }

  /// Euclidean projection of every row back onto its simplex, then an exact
  /// renormalization so each row sums to one.
  void project() {
    for (std::size_t bi = 0; bi < shape_.blocks.size(); ++bi) {
      for (std::size_t r = 0; r < shape_.blocks[bi].rows; ++r) project_row(row(bi, r));
    }
  }

  bool rows_valid(double tol = kMassTol) const {
    for (std::size_t bi = 0; bi < shape_.blocks.size(); ++bi) {
      for (std::size_t r = 0; r < shape_.blocks[bi].rows; ++r) {
        double sum = 0.0;
        for (double x : row(bi, r)) {
          if (x < 0.0) return false;
          sum += x;
        }
        if (std::abs(sum - 1.0) > tol) return false;
      }
    }
    return true;
  }

 private:
  static void project_row(std::span<double> y) {
    // sort-based projection onto {x >= 0, sum x = 1}
    thread_local std::vector<double> u;
    u.assign(y.begin(), y.end());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      css += u[j];
      const double t = (css - 1.0) / static_cast<double>(j + 1);
      if (u[j] - t > 0.0) tau = t;
    }
    double sum = 0.0;
    for (auto& x : y) {
      x = std::max(0.0, x - tau);
      sum += x;
    }
    if (sum <= 0.0) {
      for (auto& x : y) x = 1.0 / static_cast<double>(y.size());
    } else {
      for (auto& x : y) x /= sum;
    }
  }

  LawShape shape_;
  std::vector<double> v_;
  std::vector<std::size_t> offsets_;
};

struct SearchConfig {
  int restarts = 16;
  int max_iters = 400;
  double step_init = 0.25;
  double step_decay = 0.5;
  std::uint64_t seed = 0;
  double grid_fallback = 0.0;  // 0 disables the exhaustive-lattice merge
  double tol = 1e-9;
  int tol_window = 50;
  bool polish = true;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("SearchConfig: restarts >= 1");
    if (grid_fallback < 0.0 || grid_fallback > 0.5) {
      throw std::invalid_argument("SearchConfig: grid_fallback resolution in (0, 0.5]");
    }
  }
};

struct SearchResult {
  double best_value = -std::numeric_limits<double>::infinity();
  SimplexLaw best_law{LawShape{}, {}};
  std::vector<double> trace;  // per-restart best values (plus lattice merge, if run)
  bool converged = false;
  std::size_t evals = 0;
};

using Objective = std::function<double(const SimplexLaw&)>;

namespace detail {

inline std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
  // splitmix-style stream separation per restart
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return std::mt19937_64(z ^ (z >> 31));
}

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol, double& best_x) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  best_x = 0.5 * (a + b);
  return f(best_x);
}

struct RestartOutcome {
  double value;
  SimplexLaw law;
  bool converged;
  std::size_t evals;
};

inline RestartOutcome run_restart(const Objective& exact, const Objective& smooth,
                                  const LawShape& shape, const SearchConfig& cfg,
                                  std::mt19937_64 rng) {
  SimplexLaw law = SimplexLaw::random_interior(shape, rng);
  std::size_t evals = 0;
  auto eval_exact = [&](const SimplexLaw& l) {
    ++evals;
    return exact(l);
  };
  auto eval_smooth_at = [&](std::vector<double> v) {
    SimplexLaw probe(shape, std::move(v));
    probe.project();
    ++evals;
    return smooth(probe);
  };

  double fval = eval_exact(law);
  double step = cfg.step_init;
  const double h = 1e-5;
  std::vector<double> history;
  history.push_back(fval);
  bool converged = false;

  const std::size_t n = law.values().size();
  std::vector<double> grad(n, 0.0);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // central finite differences of the smoothed objective
    double gnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> vp = law.values();
      vp[i] += h;
      std::vector<double> vm = law.values();
      vm[i] -= h;
      grad[i] = (eval_smooth_at(std::move(vp)) - eval_smooth_at(std::move(vm))) / (2.0 * h);
      gnorm = std::max(gnorm, std::abs(grad[i]));
    }
    if (gnorm < 1e-14) {
      converged = true;
      break;
    }
    std::vector<double> cand = law.values();
    for (std::size_t i = 0; i < n; ++i) cand[i] += (step / gnorm) * grad[i];
    SimplexLaw cand_law(shape, std::move(cand));
    cand_law.project();
    const double cf = eval_exact(cand_law);
    if (cf > fval) {
      law = std::move(cand_law);
      fval = cf;
      step = std::min(step * 1.3, 1.0);
    } else {
      step *= cfg.step_decay;
      if (step < 1e-12) {
        converged = true;
        break;
      }
    }
    history.push_back(fval);
    if (static_cast<int>(history.size()) > cfg.tol_window &&
        fval - history[history.size() - 1 - static_cast<std::size_t>(cfg.tol_window)] < cfg.tol) {
      converged = true;
      break;
    }
  }

  if (cfg.polish) {
    // cyclic pairwise mass exchanges, golden section along each segment
    for (int cycle = 0; cycle < 5; ++cycle) {
      bool improved = false;
      for (std::size_t bi = 0; bi < shape.blocks.size(); ++bi) {
        const auto& blk = shape.blocks[bi];
        for (std::size_t r = 0; r < blk.rows; ++r) {
          for (std::size_t i = 0; i < blk.cols; ++i) {
            for (std::size_t j = i + 1; j < blk.cols; ++j) {
              auto row = law.row(bi, r);
              const double pi = row[i], pj = row[j];
              if (pi + pj < 1e-14) continue;
              auto f = [&](double t) {
                SimplexLaw probe = law;
                auto pr = probe.row(bi, r);
                pr[i] = pi - t;
                pr[j] = pj + t;
                ++evals;
                return exact(probe);
              };
              double tbest = 0.0;
              const double fbest = golden_max(f, -pj, pi, 1e-12, tbest);
              if (fbest > fval + 1e-13) {
                auto pr = law.row(bi, r);
                pr[i] = pi - tbest;
                pr[j] = pj + tbest;
                fval = fbest;
                improved = true;
              }
            }
          }
        }
      }
      if (!improved) break;
    }
  }
  return {fval, std::move(law), converged, evals};
}

inline std::size_t lattice_rows_count(std::size_t m, std::size_t cols) {
  // compositions of m into cols parts: C(m + cols - 1, cols - 1)
  std::size_t n = 1;
  for (std::size_t i = 1; i < cols; ++i) {
    n = n * (m + i) / i;
    if (n > 100'000'000ULL) return n;  // early out, caller checks the cap
  }
  return n;
}

}  // namespace detail

inline std::size_t grid_point_count(const LawShape& shape, double resolution) {
  if (resolution <= 0.0 || resolution > 0.5) {
    throw std::invalid_argument("grid resolution must be in (0, 0.5]");
  }
  const std::size_t m = static_cast<std::size_t>(std::llround(1.0 / resolution));
  std::size_t total = 1;
  for (const auto& b : shape.blocks) {
    const std::size_t per_row = detail::lattice_rows_count(m, b.cols);
    for (std::size_t r = 0; r < b.rows; ++r) {
      if (total > kMaxTableSize / std::max<std::size_t>(per_row, 1)) {
        return kMaxTableSize + 1;  // saturated: over the cap
      }
      total *= per_row;
    }
  }
  return total;
}

/// Exhaustive evaluation over the product of per-row simplex lattices with
/// the given resolution; exact maximum over the lattice. The lattice size
/// must not exceed 1e7 points.
inline SearchResult grid_maximize(const Objective& exact, const LawShape& shape,
                                  double resolution) {
  const std::size_t total = grid_point_count(shape, resolution);
  if (total > kMaxTableSize) {
    throw std::invalid_argument("grid_maximize: lattice exceeds the 1e7-point cap");
  }
  const std::size_t m = static_cast<std::size_t>(std::llround(1.0 / resolution));

  // enumerate compositions of m into `cols` parts for each row
  struct RowState {
    std::vector<std::vector<double>> points;  // all lattice rows
    std::size_t index = 0;
  };
  std::vector<RowState> rows;
  for (const auto& b : shape.blocks) {
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> comp(b.cols, 0);
    // recursive enumeration, iterative stack
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
      if (pos + 1 == b.cols) {
        comp[pos] = left;
        std::vector<double> row(b.cols);
        for (std::size_t i = 0; i < b.cols; ++i) {
          row[i] = static_cast<double>(comp[i]) / static_cast<double>(m);
        }
        pts.push_back(std::move(row));
        return;
      }
      for (std::size_t take = 0; take <= left; ++take) {
        comp[pos] = take;
        rec(pos + 1, left - take);
      }
    };
    rec(0, m);
    for (std::size_t r = 0; r < b.rows; ++r) rows.push_back({pts, 0});
  }

  SearchResult res;
  res.best_law = SimplexLaw::uniform(shape);
  SimplexLaw law = SimplexLaw::uniform(shape);
  std::size_t evals = 0;
  for (;;) {
    // materialize current combination
    std::size_t row_cursor = 0;
    for (std::size_t bi = 0; bi < shape.blocks.size(); ++bi) {
      for (std::size_t r = 0; r < shape.blocks[bi].rows; ++r) {
        const auto& pt = rows[row_cursor].points[rows[row_cursor].index];
        auto dst = law.row(bi, r);
        std::copy(pt.begin(), pt.end(), dst.begin());
        ++row_cursor;
      }
    }
    const double v = exact(law);
    ++evals;
    if (v > res.best_value) {
      res.best_value = v;
      res.best_law = law;
    }
    // odometer
    std::size_t k = rows.size();
    while (k > 0) {
      auto& st = rows[k - 1];
      if (++st.index < st.points.size()) break;
      st.index = 0;
      --k;
    }
    if (k == 0) break;
  }
  res.trace = {res.best_value};
  res.converged = true;
  res.evals = evals;
  return res;
}

/// Multi-start projected ascent: per restart, a random interior law followed
/// by finite-difference gradient steps (on the smoothed objective) with
/// simplex projection, then pairwise golden-section polish on the exact
/// objective. Deterministic given (objective, shape, cfg). Ties across
/// restarts resolve to the lowest restart index.
inline SearchResult maximize(const Objective& exact, const Objective& smooth,
                             const LawShape& shape, const SearchConfig& cfg) {
  cfg.validate();
  SearchResult res;
  res.best_law = SimplexLaw::uniform(shape);
  for (int r = 0; r < cfg.restarts; ++r) {
    auto out = detail::run_restart(exact, smooth, shape, cfg, detail::restart_rng(cfg.seed, r));
    res.trace.push_back(out.value);
    res.evals += out.evals;
    if (out.value > res.best_value) {
      res.best_value = out.value;
      res.best_law = std::move(out.law);
      res.converged = out.converged;
    }
  }
  if (cfg.grid_fallback > 0.0 && grid_point_count(shape, cfg.grid_fallback) <= 1'000'000) {
    SearchResult grid = grid_maximize(exact, shape, cfg.grid_fallback);
    res.evals += grid.evals;
    res.trace.push_back(grid.best_value);
    if (grid.best_value > res.best_value) {
      res.best_value = grid.best_value;
      res.best_law = std::move(grid.best_law);
      res.converged = true;
    }
  }
  return res;
}

inline SearchResult maximize(const Objective& exact, const LawShape& shape,
                             const SearchConfig& cfg) {
  return maximize(exact, exact, shape, cfg);
}

/// Smoothed minimum (soft-min) used by objectives with min-over-components
/// kinks during ascent: -(1/beta) log sum exp(-beta x_i), exact min as
/// beta -> infinity.
inline double soft_min(std::span<const double> xs, double beta = 200.0) {
  double m = xs[0];
  for (double x : xs) m = std::min(m, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(-beta * (x - m));
  return m - std::log(acc) / beta;
}

}  // namespace gpcap
