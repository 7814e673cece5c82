#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

// Closed-form and numerically optimized capacity bounds for the compound
// Gaussian dirty-paper channel Y_theta = X + theta*S + Z with the
// interference S known non-causally at the transmitter only and the fading
// coefficient theta drawn from a finite real set (input fading fixed to 1).
// All rates are in bits.

namespace gpcap::gdp {

struct PowerSplit {
  double p_c = 0.0;      // common (cloud-center) power
  double p_delta = 0.0;  // private (time-shared) power
};

struct GdpParams {
  static constexpr double beta = 1.0;  // input fading, fixed

  double p;                   // input power
  double n;                   // noise power
  double q;                   // interference power
  std::vector<double> thetas; // finite fading set on S

  GdpParams(double p_, double n_, double q_, std::vector<double> thetas_)
      : p(p_), n(n_), q(q_), thetas(std::move(thetas_)) {
    if (!(p > 0.0)) throw std::invalid_argument("GdpParams: P > 0 required");
    if (!(n > 0.0)) throw std::invalid_argument("GdpParams: N > 0 required");
    if (q < 0.0) throw std::invalid_argument("GdpParams: Q >= 0 required");
    if (thetas.empty()) throw std::invalid_argument("GdpParams: theta set nonempty");
  }

  std::size_t k() const { return thetas.size(); }
  double theta_min() const { return *std::min_element(thetas.begin(), thetas.end()); }
  double theta_max() const { return *std::max_element(thetas.begin(), thetas.end()); }
  bool equal_extremes() const { return theta_min() == theta_max(); }
  bool symmetric_magnitudes() const {
    return std::abs(theta_min()) == std::abs(theta_max()) && !equal_extremes();
  }
  /// Branch selection is keyed on |theta_min| vs |theta_max| only; a set that
  /// additionally contains an interior +-pair (like {-1, 1, 2}) is flagged so
  /// outputs can carry the caveat.
  bool ambiguous_branch() const {
    if (symmetric_magnitudes() || equal_extremes()) return false;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      for (std::size_t j = i + 1; j < thetas.size(); ++j) {
        if (thetas[i] != thetas[j] && std::abs(thetas[i]) == std::abs(thetas[j])) return true;
      }
    }
    return false;
  }
};

inline double awgn_capacity(const GdpParams& g) { return 0.5 * std::log2(1.0 + g.p / g.n); }

/// Mismatch factor at total received signal-plus-noise power T = Pc+Pd+N.
/// Defined by the asymmetric-extremes branch; equal extremes give 0 exactly
/// and Q = 0 returns the T/Q -> infinity limit, which is 0.
inline double mismatch_factor_at(const GdpParams& g, double total_t) {
  const double tmin = g.theta_min(), tmax = g.theta_max();
  if (tmin == tmax) return 0.0;
  if (std::abs(tmin) == std::abs(tmax)) {
    throw std::invalid_argument(
        "mismatch_factor: undefined for symmetric extremes (theta_min = -theta_max)");
  }
  if (g.q == 0.0) return 0.0;
  const double t = total_t / g.q;
  const double d = std::sqrt(tmax * tmax + t) - std::sqrt(tmin * tmin + t);
  const double denom = (tmin + tmax) * (tmin + tmax);
  const double eps = d * d / denom;
  return std::clamp(eps, 0.0, 1.0);
}

inline double mismatch_factor(const GdpParams& g, const PowerSplit& split) {
  return mismatch_factor_at(g, split.p_c + split.p_delta + g.n);
}

/// Mismatch factor with the full power budget spent: T = P + N.
inline double mismatch_factor_full(const GdpParams& g) {
  return mismatch_factor_at(g, g.p + g.n);
}

inline void validate_split(const GdpParams& g, const PowerSplit& s) {
  if (s.p_c < 0.0 || s.p_delta < 0.0 || s.p_c + s.p_delta > g.p + 1e-12) {
    throw std::invalid_argument("PowerSplit: requires Pc, Pd >= 0 and Pc + Pd <= P");
  }
}

/// Achievable rate at a fixed power split: a 1/(2K)-weighted private term
/// plus a common term that treats the unresolved part of the interference as
/// noise (symmetric extremes) or pays the mismatch factor (otherwise).
inline double rate_lower_split(const GdpParams& g, const PowerSplit& s) {
  validate_split(g, s);
  const double kd = static_cast<double>(g.k());
  const double priv = std::log2(1.0 + s.p_delta / g.n) / (2.0 * kd);
  double common;
  if (g.symmetric_magnitudes()) {
    const double tm2 = g.theta_min() * g.theta_min();
    common = 0.5 * std::log2(1.0 + s.p_c / (s.p_delta + g.n + tm2 * g.q));
  } else {
    const double eps = mismatch_factor(g, s);
    common = 0.5 * std::log2(1.0 + s.p_c * (1.0 - eps) / (s.p_delta + g.n + eps * s.p_c));
  }
  return priv + common;
}

enum class LowerRegime { awgn, dpc, superposition, time_share };

inline const char* regime_name(LowerRegime r) {
  switch (r) {
    case LowerRegime::awgn: return "awgn";
    case LowerRegime::dpc: return "dpc";
    case LowerRegime::superposition: return "superposition";
    case LowerRegime::time_share: return "timeshare";
  }
  return "?";
}

struct LowerOpt {
  double bits = 0.0;
  LowerRegime regime = LowerRegime::dpc;
  PowerSplit split;
  double eps_star = 0.0;  // mismatch at full power (asymmetric branch only)
  bool ambiguous_set = false;
};

/// Power-split-optimized lower bound, piecewise over three regimes per
/// branch. Q = 0 short-circuits to the interference-free AWGN value.
inline LowerOpt rate_lower_opt(const GdpParams& g) {
  LowerOpt out;
  out.ambiguous_set = g.ambiguous_branch();
  const double kd = static_cast<double>(g.k());

  if (g.q == 0.0) {
    out.bits = awgn_capacity(g);
    out.regime = LowerRegime::awgn;
    out.split = {g.p, 0.0};
    return out;
  }
  if (g.equal_extremes()) {
    // single effective fading value: full dirty-paper cancellation
    out.bits = awgn_capacity(g);
    out.regime = LowerRegime::dpc;
    out.split = {g.p, 0.0};
    return out;
  }

  if (g.symmetric_magnitudes()) {
    const double tm2 = g.theta_min() * g.theta_min();
    const double lhs = tm2 / (kd - 1.0);  // kd >= 2 here (equal extremes handled above)
    if (lhs < g.n / g.q) {
      out.regime = LowerRegime::dpc;
      out.split = {g.p, 0.0};
      out.bits = 0.5 * std::log2(1.0 + g.p / (g.n + tm2 * g.q));
    } else if (lhs < (g.p + g.n) / g.q) {
      out.regime = LowerRegime::superposition;
      const double pd = tm2 * g.q / (kd - 1.0) - g.n;
      out.split = {g.p - pd, pd};
      out.bits = (1.0 / (2.0 * kd)) *
                 std::log2(std::pow(g.p + g.n + tm2 * g.q, kd) / (kd * g.n) *
                           std::pow((kd - 1.0) / (kd * tm2 * g.q), kd - 1.0));
    } else {
      out.regime = LowerRegime::time_share;
      out.split = {0.0, g.p};
      out.bits = (1.0 / (2.0 * kd)) * std::log2(1.0 + g.p / g.n);
    }
    return out;
  }

  const double eps = mismatch_factor_full(g);
  out.eps_star = eps;
  if (eps < g.n * (kd - 1.0) / (g.p + kd * g.n)) {
    out.regime = LowerRegime::dpc;
    out.split = {g.p, 0.0};
    out.bits = 0.5 * std::log2(1.0 + g.p * (1.0 - eps) / (g.n + eps * g.p));
  } else if (eps < (kd - 1.0) / kd) {
    out.regime = LowerRegime::superposition;
    const double pd =
        std::clamp(eps * (g.p + g.n) / ((kd - 1.0) * (1.0 - eps)) - g.n, 0.0, g.p);
    out.split = {g.p - pd, pd};
    out.bits = (1.0 / (2.0 * kd)) *
               std::log2((g.p + g.n) / (kd * g.n * (1.0 - eps)) *
                         std::pow((kd - 1.0) / (kd * eps), kd - 1.0));
  } else {
    out.regime = LowerRegime::time_share;
    out.split = {0.0, g.p};
    out.bits = (1.0 / (2.0 * kd)) * std::log2(1.0 + g.p / g.n);
  }
  return out;
}

/// Lattice oracle: exhaustive (Pc, Pd) search of rate_lower_split, including
/// the full-power diagonal. Independent check of the closed forms.
inline double rate_lower_opt_numeric(const GdpParams& g, double resolution) {
  if (resolution <= 0.0 || resolution > g.p / 10.0) {
    throw std::invalid_argument("rate_lower_opt_numeric: resolution in (0, P/10]");
  }
  if (g.q == 0.0) return awgn_capacity(g);
  double best = 0.0;
  const auto steps = static_cast<std::size_t>(std::floor(g.p / resolution + 1e-12));
  for (std::size_t j = 0; j <= steps; ++j) {
    const double pd = std::min(static_cast<double>(j) * resolution, g.p);
    for (std::size_t i = 0;; ++i) {
      double pc = static_cast<double>(i) * resolution;
      bool last = false;
      if (pc + pd >= g.p) {
        pc = g.p - pd;  // full-power diagonal point
        last = true;
      }
      best = std::max(best, rate_lower_split(g, {pc, pd}));
      if (last) break;
    }
  }
  return best;
}

struct UpperBound {
  double bits = 0.0;
  double rho = 0.0;  // achieving input-interference correlation
};

namespace detail {

inline double upper_objective(const GdpParams& g, double rho) {
  const double tmin = g.theta_min(), tmax = g.theta_max();
  const double first = 0.5 * std::log2(1.0 + g.p * (1.0 - rho * rho) / g.n);
  const double root = std::sqrt(g.p * g.q);
  const double denom = std::sqrt((tmax - tmin) * (tmax - tmin) * g.n * g.q);
  const double a = (g.p + g.n + tmax * tmax * g.q + 2.0 * tmax * rho * root) / denom;
  const double b = (g.p + g.n + tmin * tmin * g.q + 2.0 * tmin * rho * root) / denom;
  const double second = 0.25 * std::log2(a) + 0.25 * std::log2(b);
  return std::min(first, second);
}

inline double golden_max_1d(const std::function<double(double)>& f, double lo, double hi,
                            double tol, double& arg) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
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
  arg = 0.5 * (a + b);
  return f(arg);
}

}  // namespace detail

/// Worst-case converse bound: max over the input-interference correlation of
/// the min of the cut term and the two quarter-log terms. Grid at 1e-4 with
/// golden-section refinement (the objective is a min of smooth pieces;
/// unimodality is not assumed).
inline UpperBound rate_upper(const GdpParams& g) {
  if (g.k() < 2 || g.equal_extremes()) {
    throw std::invalid_argument("rate_upper: needs at least two distinct extreme fading values");
  }
  if (!(g.q > 0.0)) throw std::invalid_argument("rate_upper: Q > 0 required");
  const double step = 1e-4;
  double best_rho = -1.0;
  double best = -1.0;
  const auto npts = static_cast<std::size_t>(std::llround(2.0 / step)) + 1;
  for (std::size_t i = 0; i < npts; ++i) {
    const double rho = -1.0 + static_cast<double>(i) * step;
    const double v = detail::upper_objective(g, rho);
    if (v > best) {
      best = v;
      best_rho = rho;
    }
  }
  double refined_rho = best_rho;
  const double lo = std::max(-1.0, best_rho - step);
  const double hi = std::min(1.0, best_rho + step);
  const double refined = detail::golden_max_1d(
      [&](double r) { return detail::upper_objective(g, r); }, lo, hi, 1e-12, refined_rho);
  if (refined > best) {
    best = refined;
    best_rho = refined_rho;
  }
  return {best, best_rho};
}

// ---------------------------------------------------------------------------
// Gaussian layered-construction evaluator (covariance algebra)
// ---------------------------------------------------------------------------

struct GaussianCodingParams {
  double alpha_c = 0.0;
  std::vector<double> alphas;   // per-component private precoding coefficients
  std::vector<double> lambdas;  // time-sharing fractions, sum to 1
  std::vector<double> powers;   // per-component private powers
};

struct ConstructionTerm {
  double common_bits = 0.0;   // I(U;Yk) - I(U;S)
  double private_bits = 0.0;  // I(Vk;Yk|U) - I(Vk;S|U)
  double total_bits = 0.0;    // common + lambda_k * private
};

struct ConstructionRate {
  double bits = 0.0;
  std::vector<ConstructionTerm> per_k;
};

namespace detail {

/// Covariance of linear functionals over independent zero-mean Gaussians.
class GaussAlgebra {
 public:
  explicit GaussAlgebra(std::vector<double> variances) : var_(std::move(variances)) {}

  using Fn = std::vector<double>;  // coefficients over the base variables

  double cov(const Fn& a, const Fn& b) const {
    double c = 0.0;
    for (std::size_t i = 0; i < var_.size(); ++i) c += a[i] * b[i] * var_[i];
    return c;
  }

  double det(const std::vector<Fn>& set) const {
    const std::size_t n = set.size();
    if (n == 0) return 1.0;
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j] = cov(set[i], set[j]);
    // LU with partial pivoting
    double d = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
      if (piv != col) {
        std::swap(m[piv], m[col]);
        d = -d;
      }
      if (m[col][col] == 0.0) return 0.0;
      d *= m[col][col];
      for (std::size_t r = col + 1; r < n; ++r) {
        const double f = m[r][col] / m[col][col];
        for (std::size_t cc = col; cc < n; ++cc) m[r][cc] -= f * m[col][cc];
      }
    }
    return d;
  }

  /// I(A;B|C) in bits via log-det ratios. A side that is deterministic given
  /// C carries no information and yields 0; a deterministic dependence across
  /// the two sides (vanishing joint determinant) is rejected as non-PSD /
  /// infinite-information input.
  double mi(const std::vector<Fn>& a, const std::vector<Fn>& b, const std::vector<Fn>& c) const {
    auto join = [](std::vector<Fn> x, const std::vector<Fn>& y) {
      x.insert(x.end(), y.begin(), y.end());
      return x;
    };
    const double dc = c.empty() ? 1.0 : det(c);
    const double dac = det(join(a, c));
    const double dbc = det(join(b, c));
    if (dc < -1e-12 || dac < -1e-12 || dbc < -1e-12) {
      throw std::invalid_argument("gaussian mi: covariance not positive semidefinite");
    }
    const double scale = std::max(1.0, std::abs(dc));
    if (dac <= 1e-14 * scale || dbc <= 1e-14 * scale) return 0.0;
    const double dabc = det(join(a, join(b, c)));
    if (dabc <= 0.0) {
      throw std::invalid_argument("gaussian mi: degenerate joint covariance");
    }
    return 0.5 * std::log2(dac * dbc / (dc * dabc));
  }

 private:
  std::vector<double> var_;
};

}  // namespace detail

/// Rate achieved by the layered Gaussian construction: cloud center
/// U = Xc + alpha_c S against the full interference, per-component satellite
/// V_k = U + X_k + alpha_k (theta_k - alpha_c) S time-shared with fraction
/// lambda_k. Evaluated exactly by jointly-Gaussian covariance algebra.
inline ConstructionRate gaussian_construction_rate(const GdpParams& g,
                                                   const GaussianCodingParams& cp,
                                                   const PowerSplit& split) {
  const std::size_t k = g.k();
  if (cp.alphas.size() != k || cp.lambdas.size() != k || cp.powers.size() != k) {
    throw std::invalid_argument("gaussian_construction_rate: per-component vectors sized K");
  }
  double lambda_sum = 0.0;
  double private_power = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (cp.lambdas[i] < 0.0 || cp.powers[i] < 0.0) {
      throw std::invalid_argument("gaussian_construction_rate: lambdas and powers nonnegative");
    }
    lambda_sum += cp.lambdas[i];
    private_power += cp.lambdas[i] * cp.powers[i];
  }
  if (std::abs(lambda_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("gaussian_construction_rate: lambdas must sum to 1");
  }
  if (split.p_c < 0.0 || split.p_c + private_power > g.p + 1e-9) {
    throw std::invalid_argument("gaussian_construction_rate: power budget exceeded");
  }
  if (private_power > split.p_delta + 1e-9) {
    throw std::invalid_argument("gaussian_construction_rate: private power exceeds the split");
  }

  ConstructionRate out;
  out.per_k.resize(k);
  double best = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    // base variables: S, Xc, Xk, Z
    detail::GaussAlgebra ga({g.q, split.p_c, cp.powers[i], g.n});
    const double th = g.thetas[i];
    const detail::GaussAlgebra::Fn s_fn = {1, 0, 0, 0};
    const detail::GaussAlgebra::Fn u_fn = {cp.alpha_c, 1, 0, 0};
    const detail::GaussAlgebra::Fn v_fn = {cp.alpha_c + cp.alphas[i] * (th - cp.alpha_c), 1, 1, 0};
    const detail::GaussAlgebra::Fn y_fn = {th, 1, 1, 1};

    ConstructionTerm term;
    term.common_bits = ga.mi({u_fn}, {y_fn}, {}) - ga.mi({u_fn}, {s_fn}, {});
    term.private_bits = ga.mi({v_fn}, {y_fn}, {u_fn}) - ga.mi({v_fn}, {s_fn}, {u_fn});
    term.total_bits = term.common_bits + cp.lambdas[i] * term.private_bits;
    out.per_k[i] = term;
    if (i == 0 || term.total_bits < best) best = term.total_bits;
  }
  out.bits = best;
  return out;
}

struct Asymptotics {
  double eps_inf = 0.0;        // interference-dominant limit of the mismatch factor
  double rate_k_inf = 0.0;     // many-components limit of the optimized bound
  double rate_ratio_inf = 0.0; // widely spread extremes limit
};

/// Limits of the optimized bound. eps_inf uses the printed closed form
/// ((tmax - tmin)/(tmax + tmin))^2, which presumes same-sign extremes.
inline Asymptotics asymptotics(const GdpParams& g) {
  const double tmin = g.theta_min(), tmax = g.theta_max();
  if (tmin + tmax == 0.0) {
    throw std::invalid_argument("asymptotics: theta_min + theta_max must be nonzero");
  }
  Asymptotics out;
  const double r = (tmax - tmin) / (tmax + tmin);
  out.eps_inf = r * r;
  const double eps = (tmin == tmax) ? 0.0 : mismatch_factor_full(g);
  out.rate_k_inf = 0.5 * std::log2(1.0 + g.p * (1.0 - eps) / (g.n + eps * g.p));
  out.rate_ratio_inf = (1.0 / (2.0 * static_cast<double>(g.k()))) * std::log2(1.0 + g.p / g.n);
  return out;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepPoint {
  double q = 0.0;
  double inr = 0.0;
  LowerOpt lower;
  UpperBound upper;
  double awgn = 0.0;
};

inline SweepPoint sweep_point(double p, double n, const std::vector<double>& thetas, double q) {
  GdpParams g(p, n, q, thetas);
  SweepPoint pt;
  pt.q = q;
  pt.inr = q / n;
  pt.awgn = awgn_capacity(g);
  pt.lower = rate_lower_opt(g);
  if (q > 0.0 && g.theta_min() != g.theta_max()) {
    pt.upper = rate_upper(g);
  } else {
    // no compound uncertainty: both bounds collapse to the exact capacity
    pt.upper = {pt.awgn, 0.0};
  }
  return pt;
}

/// Log-spaced INR sweep; points are computed in parallel chunks but emitted
/// in grid order, so output is independent of the job count.
inline std::vector<SweepPoint> sweep(double p, double n, const std::vector<double>& thetas,
                                     double inr_min, double inr_max, std::size_t points,
                                     unsigned jobs = 1) {
  if (points < 2 || points > 100'000) {
    throw std::invalid_argument("sweep: point count must lie in [2, 1e5]");
  }
  if (!(inr_min > 0.0) || !(inr_max > inr_min)) {
    throw std::invalid_argument("sweep: need 0 < inr_min < inr_max");
  }
  std::vector<SweepPoint> out(points);
  const double lg0 = std::log10(inr_min);
  const double lg1 = std::log10(inr_max);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < points; i += stride) {
      const double lg = lg0 + (lg1 - lg0) * static_cast<double>(i) /
                                  static_cast<double>(points - 1);
      const double inr = std::pow(10.0, lg);
      out[i] = sweep_point(p, n, thetas, inr * n);
    }
  };
  if (jobs <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs);
    for (auto& th : pool) th.join();
  }
  return out;
}

inline std::string sweep_csv_header() {
  return "Q,INR,lower_bits,lower_regime,upper_bits,upper_rho,awgn_ref";
}

inline std::string sweep_csv_row(const SweepPoint& pt) {
  char buf[256];
  std::string regime = regime_name(pt.lower.regime);
  if (pt.lower.ambiguous_set) regime += "+ambiguous-branch";
  std::snprintf(buf, sizeof(buf), "%.9f,%.9f,%.9f,%s,%.9f,%.9f,%.9f", pt.q, pt.inr,
                pt.lower.bits, regime.c_str(), pt.upper.bits, pt.upper.rho, pt.awgn);
  return buf;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& pts) {
  std::string s = sweep_csv_header() + "\n";
  for (const auto& pt : pts) {
    s += sweep_csv_row(pt);
    s += "\n";
  }
  return s;
}

}  // namespace gpcap::gdp
