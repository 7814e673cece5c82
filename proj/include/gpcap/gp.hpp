#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gpcap/optimize.hpp"
#include "gpcap/prob.hpp"
#include "gpcap/simplex.hpp"

// Rate evaluators for compound state-dependent channels with the state known
// non-causally at the transmitter: the worst-case Gelfand-Pinsker bound, the
// layered (cloud center + per-receiver satellites) bounds, the degraded-chain
// capacity, the feedback capacity, and a degradedness feasibility test.

namespace gpcap {

/// Factored coding law: P(u|s), per-component P(vk|u,s), and P(x|u,v_1..K,s).
/// Only the factors are stored; joints are materialized on demand, so the
/// Markov requirement (U,V) - (X,S) - Y holds by construction.
struct CodingLaw {
  Channel u_given_s;                 // input {S}, output U
  std::vector<Channel> v_given_us;   // each: input {U, S}, output Vk
  Channel x_given_uvs;               // input {U, V1..VK, S}, output X

  std::size_t num_v() const { return v_given_us.size(); }
  std::size_t u_size() const { return u_given_s.output_size(); }
  std::size_t v_size(std::size_t k) const { return v_given_us[k].output_size(); }

  void validate(const CompoundDmc& dmc) const {
    if (u_given_s.input_shape() != std::vector<std::size_t>{dmc.s_size()}) {
      throw std::invalid_argument("CodingLaw: P(u|s) input must be the state alphabet");
    }
    for (const auto& v : v_given_us) {
      if (v.input_shape() != std::vector<std::size_t>{u_size(), dmc.s_size()}) {
        throw std::invalid_argument("CodingLaw: P(vk|u,s) input must be (U, S)");
      }
    }
    std::vector<std::size_t> want{u_size()};
    for (const auto& v : v_given_us) want.push_back(v.output_size());
    want.push_back(dmc.s_size());
    if (x_given_uvs.input_shape() != want) {
      throw std::invalid_argument("CodingLaw: P(x|u,v,s) input must be (U, V1..VK, S)");
    }
    if (x_given_uvs.output_size() != dmc.x_size()) {
      throw std::invalid_argument("CodingLaw: P(x|u,v,s) output must be the input alphabet");
    }
  }

  /// Law with every Vk forced equal to U (copy tables), same induced X law.
  static CodingLaw with_v_copies_of_u(const CodingLaw& u_only, std::size_t k) {
    CodingLaw law;
    law.u_given_s = u_only.u_given_s;
    const std::size_t nu = u_only.u_size();
    const std::size_t ns = u_only.x_given_uvs.input_shape().back();
    // P(v|u,s) = 1{v == u}
    std::vector<double> tab(nu * ns * nu, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t s = 0; s < ns; ++s) tab[(u * ns + s) * nu + u] = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      law.v_given_us.emplace_back(std::vector<std::size_t>{nu, ns}, nu, tab);
    }
    // X table: P(x|u,v..,s) = P0(x|u,s) regardless of v
    const Channel& x0 = u_only.x_given_uvs;  // input {U, S}
    const std::size_t nx = x0.output_size();
    std::vector<std::size_t> shape{nu};
    for (std::size_t i = 0; i < k; ++i) shape.push_back(nu);
    shape.push_back(ns);
    std::size_t rows = nu * ns;
    for (std::size_t i = 0; i < k; ++i) rows *= nu;
    std::vector<double> xtab;
    xtab.reserve(rows * nx);
    std::vector<std::size_t> idx(shape.size(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r;
      for (std::size_t d = shape.size(); d-- > 0;) {
        idx[d] = rem % shape[d];
        rem /= shape[d];
      }
      const std::size_t base[] = {idx.front(), idx.back()};
      auto row = x0.row(x0.row_index(base));
      xtab.insert(xtab.end(), row.begin(), row.end());
    }
    law.x_given_uvs = Channel(shape, nx, std::move(xtab));
    return law;
  }

  /// Marginalizes the satellites out of the X table: the induced U-only law.
  CodingLaw u_restriction(const CompoundDmc& dmc) const {
    CodingLaw out;
    out.u_given_s = u_given_s;
    const std::size_t nu = u_size(), ns = dmc.s_size(), nx = dmc.x_size();
    std::vector<double> xtab(nu * ns * nx, 0.0);
    const std::size_t kk = num_v();
    std::vector<std::size_t> vsz(kk);
    for (std::size_t k = 0; k < kk; ++k) vsz[k] = v_size(k);
    std::vector<std::size_t> v(kk, 0);
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t s = 0; s < ns; ++s) {
        std::fill(v.begin(), v.end(), 0);
        for (;;) {
          double pv = 1.0;
          for (std::size_t k = 0; k < kk; ++k) {
            const std::size_t in[] = {u, s};
            pv *= v_given_us[k].row(v_given_us[k].row_index(in))[v[k]];
          }
          std::vector<std::size_t> xin{u};
          xin.insert(xin.end(), v.begin(), v.end());
          xin.push_back(s);
          auto xrow = x_given_uvs.row(x_given_uvs.row_index(xin));
          for (std::size_t x = 0; x < nx; ++x) xtab[(u * ns + s) * nx + x] += pv * xrow[x];
          std::size_t d = kk;
          while (d > 0 && ++v[d - 1] == vsz[d - 1]) v[--d] = 0;
          if (d == 0) break;
        }
      }
    }
    if (kk == 0) {
      out.x_given_uvs = x_given_uvs;
    } else {
      out.x_given_uvs = Channel({nu, ns}, nx, std::move(xtab));
    }
    return out;
  }
};

/// Chain-factored law for degraded compounds:
/// P(v_K|s) P(v_{K-1}|s,v_K) ... P(v_1|s,v_2) P(x|s,v_1).
struct DegradedChainLaw {
  Channel vk_given_s;                        // input {S}, output V_K
  std::vector<Channel> v_given_s_vnext;      // index i: P(v_{K-1-i} | s, v_{K-i})
  Channel x_given_s_v1;                      // input {S, V1}, output X

  std::size_t num_v() const { return v_given_s_vnext.size() + 1; }
};

/// Rate value plus per-component diagnostics. The minimum is clamped to zero
/// (rate 0 is always achievable) with the raw value kept alongside.
struct RateReport {
  double value_bits = 0.0;
  double raw_min_bits = 0.0;
  bool clamped = false;
  bool converged = true;
  std::vector<std::pair<std::string, double>> terms;
  std::string min_label;
  std::optional<double> pair_term_alt;  // published composite form of the pair term
  bool pair_term_mismatch = false;
  std::optional<std::variant<CodingLaw, DegradedChainLaw>> achieving_law;

  void finish_from_terms() {
    raw_min_bits = terms.front().second;
    min_label = terms.front().first;
    for (const auto& [label, v] : terms) {
      if (v < raw_min_bits) {
        raw_min_bits = v;
        min_label = label;
      }
    }
    clamped = raw_min_bits < 0.0;
    value_bits = clamped ? 0.0 : raw_min_bits;
  }
};

namespace detail {

inline std::vector<std::string> v_axis_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("V" + std::to_string(i));
  return names;
}

}  // namespace detail

/// Joint table over (U, V1..VK, S, X, Y) induced by a coding law and one
/// channel component.
inline JointTable joint_for(const CompoundDmc& dmc, const CodingLaw& law, std::size_t theta) {
  law.validate(dmc);
  const Channel& w = dmc.channel(theta);
  const std::size_t kk = law.num_v();
  std::vector<std::string> axes{"U"};
  for (const auto& n : detail::v_axis_names(kk)) axes.push_back(n);
  axes.push_back("S");
  axes.push_back("X");
  axes.push_back("Y");
  std::vector<std::size_t> sizes{law.u_size()};
  for (std::size_t k = 0; k < kk; ++k) sizes.push_back(law.v_size(k));
  sizes.push_back(dmc.s_size());
  sizes.push_back(dmc.x_size());
  sizes.push_back(dmc.y_size());

  JointTable j(axes, sizes);
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<std::size_t> v(kk, 0);
  for (std::size_t s = 0; s < dmc.s_size(); ++s) {
    const double ps = dmc.state_law()[s];
    for (std::size_t u = 0; u < law.u_size(); ++u) {
      const std::size_t uin[] = {s};
      const double pu = law.u_given_s.row(law.u_given_s.row_index(uin))[u];
      if (ps * pu == 0.0) continue;
      std::fill(v.begin(), v.end(), 0);
      for (;;) {
        double pv = 1.0;
        for (std::size_t k = 0; k < kk; ++k) {
          const std::size_t in[] = {u, s};
          pv *= law.v_given_us[k].row(law.v_given_us[k].row_index(in))[v[k]];
        }
        if (pv > 0.0) {
          std::vector<std::size_t> xin{u};
          xin.insert(xin.end(), v.begin(), v.end());
          xin.push_back(s);
          auto xrow = law.x_given_uvs.row(law.x_given_uvs.row_index(xin));
          for (std::size_t x = 0; x < dmc.x_size(); ++x) {
            if (xrow[x] == 0.0) continue;
            const std::size_t win[] = {x, s};
            auto wrow = w.row(w.row_index(win));
            idx[0] = u;
            for (std::size_t k = 0; k < kk; ++k) idx[1 + k] = v[k];
            idx[1 + kk] = s;
            idx[2 + kk] = x;
            for (std::size_t y = 0; y < dmc.y_size(); ++y) {
              idx[3 + kk] = y;
              j.at(idx) += ps * pu * pv * xrow[x] * wrow[y];
            }
          }
        }
        std::size_t d = kk;
        while (d > 0 && ++v[d - 1] == law.v_size(d - 1)) v[--d] = 0;
        if (d == 0) break;
      }
    }
  }
  j.finalize();
  return j;
}

/// Joint table over (V1..VK, S, X, Y) induced by a chain law and one component.
inline JointTable joint_for_chain(const CompoundDmc& dmc, const DegradedChainLaw& law,
                                  std::size_t theta) {
  const std::size_t kk = law.num_v();
  const Channel& w = dmc.channel(theta);
  std::vector<std::string> axes = detail::v_axis_names(kk);
  axes.push_back("S");
  axes.push_back("X");
  axes.push_back("Y");
  std::vector<std::size_t> vsz(kk);
  vsz[kk - 1] = law.vk_given_s.output_size();
  for (std::size_t i = 0; i < law.v_given_s_vnext.size(); ++i) {
    vsz[kk - 2 - i] = law.v_given_s_vnext[i].output_size();
  }
  std::vector<std::size_t> sizes(vsz);
  sizes.push_back(dmc.s_size());
  sizes.push_back(dmc.x_size());
  sizes.push_back(dmc.y_size());

  JointTable j(axes, sizes);
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<std::size_t> v(kk, 0);
  for (std::size_t s = 0; s < dmc.s_size(); ++s) {
    const double ps = dmc.state_law()[s];
    std::fill(v.begin(), v.end(), 0);
    for (;;) {
      // chain: P(v_K|s) * prod_{k=K-1..1} P(v_k | s, v_{k+1})
      const std::size_t topin[] = {s};
      double pv = law.vk_given_s.row(law.vk_given_s.row_index(topin))[v[kk - 1]];
      for (std::size_t i = 0; i < law.v_given_s_vnext.size(); ++i) {
        const std::size_t pos = kk - 2 - i;  // index of v_k being generated
        const std::size_t in[] = {s, v[pos + 1]};
        const auto& ch = law.v_given_s_vnext[i];
        pv *= ch.row(ch.row_index(in))[v[pos]];
      }
      if (pv > 0.0) {
        const std::size_t xin[] = {s, v[0]};
        auto xrow = law.x_given_s_v1.row(law.x_given_s_v1.row_index(xin));
        for (std::size_t x = 0; x < dmc.x_size(); ++x) {
          if (xrow[x] == 0.0) continue;
          const std::size_t win[] = {x, s};
          auto wrow = w.row(w.row_index(win));
          for (std::size_t k = 0; k < kk; ++k) idx[k] = v[k];
          idx[kk] = s;
          idx[kk + 1] = x;
          for (std::size_t y = 0; y < dmc.y_size(); ++y) {
            idx[kk + 2] = y;
            j.at(idx) += ps * pv * xrow[x] * wrow[y];
          }
        }
      }
      std::size_t d = kk;
      while (d > 0 && ++v[d - 1] == vsz[d - 1]) v[--d] = 0;
      if (d == 0) break;
    }
  }
  j.finalize();
  return j;
}

/// Single-component Gelfand-Pinsker functional I(U;Y_theta) - I(U;S) for a
/// U-only law; may be negative.
inline double gp_rate(const CompoundDmc& dmc, std::size_t theta, const CodingLaw& law) {
  if (law.num_v() != 0) throw std::invalid_argument("gp_rate: law must use only U");
  const JointTable j = joint_for(dmc, law, theta);
  return mutual_information(j, {"U"}, {"Y"}) - mutual_information(j, {"U"}, {"S"});
}

/// Worst-case Gelfand-Pinsker bound: min over components of the GP functional.
inline RateReport worst_case_gp_bound(const CompoundDmc& dmc, const CodingLaw& law) {
  if (law.num_v() != 0) throw std::invalid_argument("worst_case_gp_bound: law must use only U");
  RateReport rep;
  for (std::size_t t = 0; t < dmc.k(); ++t) {
    rep.terms.emplace_back("theta" + std::to_string(t + 1), gp_rate(dmc, t, law));
  }
  rep.finish_from_terms();
  rep.achieving_law = law;
  return rep;
}

namespace detail {

struct SubsetTermContext {
  std::vector<double> i_uvk_yk;   // I(U,Vk;Yk) per component
  double i_us = 0.0;              // I(U;S)
  std::vector<double> h_vk_u;     // H(Vk|U)
  const JointTable* base = nullptr;  // any component's joint (V,U,S part is shared)
};

inline std::string subset_label(unsigned mask, std::size_t k) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 1; i <= k; ++i) {
    if (mask & (1u << (i - 1))) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
  }
  s += "}";
  return s;
}

inline double subset_term(const SubsetTermContext& ctx, unsigned mask, std::size_t k) {
  const int size = __builtin_popcount(mask);
  std::vector<std::string> vnames;
  double sum_i = 0.0, sum_h = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (mask & (1u << (i - 1))) {
      vnames.push_back("V" + std::to_string(i));
      sum_i += ctx.i_uvk_yk[i - 1];
      sum_h += ctx.h_vk_u[i - 1];
    }
  }
  std::vector<std::string> vus = vnames;
  vus.push_back("U");
  vus.push_back("S");
  const double h_joint_us = ctx.base->entropy_of(vus) - ctx.base->entropy_of({"U", "S"});
  return (sum_i - size * ctx.i_us + h_joint_us - sum_h) / size;
}

}  // namespace detail

/// Subset-minimum layered bound over all nonempty component subsets.
inline RateReport marton_subset_bound(const CompoundDmc& dmc, const CodingLaw& law) {
  const std::size_t k = dmc.k();
  if (law.num_v() != k) {
    throw std::invalid_argument("marton_subset_bound: law must provide one satellite per component");
  }
  if (k > 8) throw std::invalid_argument("marton_subset_bound: subset enumeration capped at K <= 8");

  detail::SubsetTermContext ctx;
  std::vector<JointTable> joints;
  joints.reserve(k);
  for (std::size_t t = 0; t < k; ++t) joints.push_back(joint_for(dmc, law, t));
  ctx.base = &joints.front();
  ctx.i_us = mutual_information(joints.front(), {"U"}, {"S"});
  for (std::size_t t = 0; t < k; ++t) {
    const std::string vt = "V" + std::to_string(t + 1);
    ctx.i_uvk_yk.push_back(mutual_information(joints[t], {"U", vt}, {"Y"}));
    ctx.h_vk_u.push_back(joints.front().entropy_of({vt, "U"}) - joints.front().entropy_of({"U"}));
  }

  RateReport rep;
  const unsigned full = (1u << k) - 1u;
  for (unsigned mask = 1; mask <= full; ++mask) {
    rep.terms.emplace_back(detail::subset_label(mask, k), detail::subset_term(ctx, mask, k));
  }
  rep.finish_from_terms();
  rep.achieving_law = law;
  return rep;
}

/// Two-component layered bound. The value follows the subset form; the
/// composite form of the pair term (with the conditional co-information
/// priced jointly) is reported alongside and flagged if the two ever differ
/// beyond numerics (they are equal by the chain rule).
inline RateReport marton_pair_bound(const CompoundDmc& dmc, const CodingLaw& law) {
  if (dmc.k() != 2) throw std::invalid_argument("marton_pair_bound: exactly two components");
  if (law.num_v() != 2) throw std::invalid_argument("marton_pair_bound: law must provide V1, V2");
  RateReport rep = marton_subset_bound(dmc, law);

  const JointTable j1 = joint_for(dmc, law, 0);
  const JointTable j2 = joint_for(dmc, law, 1);
  const double t1 = mutual_information(j1, {"U", "V1"}, {"Y"}) -
                    mutual_information(j1, {"U", "V1"}, {"S"});
  const double t2 = mutual_information(j2, {"U", "V2"}, {"Y"}) -
                    mutual_information(j2, {"U", "V2"}, {"S"});
  const double pair_published =
      0.5 * (t1 + t2 - conditional_mutual_information(j1, {"V1"}, {"V2"}, {"U", "S"}));
  rep.pair_term_alt = pair_published;
  for (const auto& [label, v] : rep.terms) {
    if (label == "{1,2}") rep.pair_term_mismatch = std::abs(v - pair_published) > 1e-9;
  }
  return rep;
}

/// Degradedness feasibility: least worst-case entry deviation between w2 and
/// w1 post-composed with an optimized stochastic map.
struct DegradednessResult {
  enum class Status { feasible, indeterminate, infeasible };
  Status status = Status::infeasible;
  bool feasible = false;
  double residual = 0.0;
  Channel w_tilde{{1}, 1, {1.0}};
};

inline DegradednessResult test_degraded(const Channel& w1, const Channel& w2) {
  if (w1.input_shape() != w2.input_shape()) {
    throw std::invalid_argument("test_degraded: channels must share input alphabets");
  }
  const std::size_t rows = w1.num_rows();
  const std::size_t n1 = w1.output_size();
  const std::size_t n2 = w2.output_size();

  // LP: minimize t subject to, for every input row r and output j,
  //   |sum_i w1(i|r) wt(j|i) - w2(j|r)| <= t, wt row-stochastic, wt >= 0.
  // Standard form variables: wt(n1*n2), t, slack per inequality (2*rows*n2).
  const std::size_t nw = n1 * n2;
  const std::size_t n_ineq = 2 * rows * n2;
  const std::size_t n = nw + 1 + n_ineq;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  auto wt_col = [&](std::size_t i, std::size_t j) { return i * n2 + j; };

  std::size_t slack = nw + 1;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n2; ++j) {
      std::vector<double> row_pos(n, 0.0), row_neg(n, 0.0);
      for (std::size_t i = 0; i < n1; ++i) {
        row_pos[wt_col(i, j)] = w1.row(r)[i];
        row_neg[wt_col(i, j)] = -w1.row(r)[i];
      }
      row_pos[nw] = -1.0;  // - t
      row_neg[nw] = -1.0;
      row_pos[slack++] = 1.0;
      row_neg[slack++] = 1.0;
      a.push_back(std::move(row_pos));
      b.push_back(w2.row(r)[j]);
      a.push_back(std::move(row_neg));
      b.push_back(-w2.row(r)[j]);
    }
  }
  for (std::size_t i = 0; i < n1; ++i) {
    std::vector<double> row(n, 0.0);
    for (std::size_t j = 0; j < n2; ++j) row[wt_col(i, j)] = 1.0;
    a.push_back(std::move(row));
    b.push_back(1.0);
  }
  std::vector<double> c(n, 0.0);
  c[nw] = 1.0;

  const auto lp = solve_lp<double>(a, b, c);
  DegradednessResult res;
  if (lp.status != LpStatus::optimal) {
    // row-stochastic wt with t = 1 is always feasible, so this cannot happen
    throw std::runtime_error("test_degraded: LP solver failed");
  }
  res.residual = std::max(lp.objective, 0.0);
  std::vector<double> wt(nw);
  for (std::size_t i = 0; i < nw; ++i) wt[i] = std::max(lp.x[i], 0.0);
  res.w_tilde = Channel({n1}, n2, std::move(wt));
  if (res.residual < 1e-9) {
    res.status = DegradednessResult::Status::feasible;
    res.feasible = true;
  } else if (res.residual > 1e-6) {
    res.status = DegradednessResult::Status::infeasible;
  } else {
    res.status = DegradednessResult::Status::indeterminate;
  }
  return res;
}

/// Chain bound for stochastically degraded compounds: min over components of
/// I(V_theta;Y_theta) - I(V_theta;S) under the chain-factored law. Components
/// must satisfy W_K degraded from W_{K-1} ... from W_1 unless waived.
inline RateReport degraded_chain_bound(const CompoundDmc& dmc, const DegradedChainLaw& law,
                                       bool skip_degradedness_check = false) {
  const std::size_t k = dmc.k();
  if (law.num_v() != k) {
    throw std::invalid_argument("degraded_chain_bound: chain length must match component count");
  }
  if (!skip_degradedness_check) {
    for (std::size_t t = 0; t + 1 < k; ++t) {
      const auto d = test_degraded(dmc.channel(t), dmc.channel(t + 1));
      if (!d.feasible) {
        throw std::invalid_argument("degraded_chain_bound: component " + std::to_string(t + 2) +
                                    " is not a degraded version of component " +
                                    std::to_string(t + 1) + " (residual " +
                                    std::to_string(d.residual) + "); pass the waiver to override");
      }
    }
  }
  RateReport rep;
  for (std::size_t t = 0; t < k; ++t) {
    const JointTable j = joint_for_chain(dmc, law, t);
    const std::string vt = "V" + std::to_string(t + 1);
    rep.terms.emplace_back("theta" + std::to_string(t + 1),
                           mutual_information(j, {vt}, {"Y"}) - mutual_information(j, {vt}, {"S"}));
  }
  rep.finish_from_terms();
  rep.achieving_law = law;
  return rep;
}

// ---------------------------------------------------------------------------
// Optimizer objectives
// ---------------------------------------------------------------------------

/// Objective adapter: exact and kink-smoothed views over a SimplexLaw, plus
/// the decoding of optimizer points into coding laws.
struct RateObjective {
  LawShape shape;
  Objective exact;
  Objective smooth;
  std::function<CodingLaw(const SimplexLaw&)> decode;
};

inline std::size_t default_u_size(const CompoundDmc& dmc) {
  return dmc.x_size() * dmc.s_size() + dmc.k();
}

namespace detail {

inline Channel channel_from_block(const SimplexLaw& law, std::size_t block,
                                  std::vector<std::size_t> shape, std::size_t out) {
  std::size_t rows = 1;
  for (auto s : shape) rows *= s;
  std::vector<double> p;
  p.reserve(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = law.row(block, r);
    p.insert(p.end(), row.begin(), row.end());
  }
  return Channel(std::move(shape), out, std::move(p));
}

}  // namespace detail

/// U-only law objective for the worst-case GP bound (raw minimum, no clamp;
/// the unclamped landscape keeps ascent directions visible below zero).
inline RateObjective make_worst_case_gp_objective(const CompoundDmc& dmc, std::size_t u_size,
                                                  double smooth_beta = 200.0) {
  RateObjective obj;
  obj.shape.blocks = {{dmc.s_size(), u_size}, {u_size * dmc.s_size(), dmc.x_size()}};
  auto decode = [&dmc, u_size](const SimplexLaw& l) {
    CodingLaw law;
    law.u_given_s = detail::channel_from_block(l, 0, {dmc.s_size()}, u_size);
    law.x_given_uvs = detail::channel_from_block(l, 1, {u_size, dmc.s_size()}, dmc.x_size());
    return law;
  };
  obj.decode = decode;
  auto per_theta = [&dmc, decode](const SimplexLaw& l) {
    const CodingLaw law = decode(l);
    std::vector<double> t(dmc.k());
    for (std::size_t i = 0; i < dmc.k(); ++i) t[i] = gp_rate(dmc, i, law);
    return t;
  };
  obj.exact = [per_theta](const SimplexLaw& l) {
    auto t = per_theta(l);
    double m = t[0];
    for (double x : t) m = std::min(m, x);
    return m;
  };
  obj.smooth = [per_theta, smooth_beta](const SimplexLaw& l) {
    auto t = per_theta(l);
    return soft_min(t, smooth_beta);
  };
  return obj;
}

/// Single-component GP objective (used per component by the feedback bound).
inline RateObjective make_single_gp_objective(const CompoundDmc& dmc, std::size_t theta,
                                              std::size_t u_size) {
  RateObjective obj;
  obj.shape.blocks = {{dmc.s_size(), u_size}, {u_size * dmc.s_size(), dmc.x_size()}};
  auto decode = [&dmc, u_size](const SimplexLaw& l) {
    CodingLaw law;
    law.u_given_s = detail::channel_from_block(l, 0, {dmc.s_size()}, u_size);
    law.x_given_uvs = detail::channel_from_block(l, 1, {u_size, dmc.s_size()}, dmc.x_size());
    return law;
  };
  obj.decode = decode;
  obj.exact = [&dmc, theta, decode](const SimplexLaw& l) { return gp_rate(dmc, theta, decode(l)); };
  obj.smooth = obj.exact;
  return obj;
}

/// Full layered-law objective for the subset-minimum bound.
inline RateObjective make_subset_bound_objective(const CompoundDmc& dmc, std::size_t u_size,
                                                 std::vector<std::size_t> v_sizes,
                                                 double smooth_beta = 200.0) {
  if (v_sizes.size() != dmc.k()) {
    throw std::invalid_argument("make_subset_bound_objective: one satellite size per component");
  }
  RateObjective obj;
  obj.shape.blocks.push_back({dmc.s_size(), u_size});
  for (std::size_t k = 0; k < dmc.k(); ++k) {
    obj.shape.blocks.push_back({u_size * dmc.s_size(), v_sizes[k]});
  }
  std::size_t xrows = u_size * dmc.s_size();
  for (auto v : v_sizes) xrows *= v;
  obj.shape.blocks.push_back({xrows, dmc.x_size()});

  auto decode = [&dmc, u_size, v_sizes](const SimplexLaw& l) {
    CodingLaw law;
    law.u_given_s = detail::channel_from_block(l, 0, {dmc.s_size()}, u_size);
    for (std::size_t k = 0; k < v_sizes.size(); ++k) {
      law.v_given_us.push_back(
          detail::channel_from_block(l, 1 + k, {u_size, dmc.s_size()}, v_sizes[k]));
    }
    std::vector<std::size_t> xshape{u_size};
    for (auto v : v_sizes) xshape.push_back(v);
    xshape.push_back(dmc.s_size());
    law.x_given_uvs =
        detail::channel_from_block(l, 1 + v_sizes.size(), std::move(xshape), dmc.x_size());
    return law;
  };
  obj.decode = decode;
  auto terms_of = [&dmc, decode](const SimplexLaw& l) {
    const RateReport rep = marton_subset_bound(dmc, decode(l));
    std::vector<double> t;
    t.reserve(rep.terms.size());
    for (const auto& [label, v] : rep.terms) {
      (void)label;
      t.push_back(v);
    }
    return t;
  };
  obj.exact = [terms_of](const SimplexLaw& l) {
    auto t = terms_of(l);
    double m = t[0];
    for (double x : t) m = std::min(m, x);
    return m;
  };
  obj.smooth = [terms_of, smooth_beta](const SimplexLaw& l) {
    auto t = terms_of(l);
    return soft_min(t, smooth_beta);
  };
  return obj;
}

/// Feedback capacity: each component's GP functional is maximized separately
/// (the encoder can learn the channel from feedback), then the worst
/// component decides. Per-component optima are reported; a budget-exhausted
/// search is flagged through `converged`, never silently.
inline RateReport feedback_capacity(const CompoundDmc& dmc, const SearchConfig& cfg,
                                    std::size_t u_size = 0) {
  if (u_size == 0) u_size = default_u_size(dmc);
  RateReport rep;
  rep.converged = true;
  std::optional<CodingLaw> min_law;
  double min_val = 0.0;
  for (std::size_t t = 0; t < dmc.k(); ++t) {
    const RateObjective obj = make_single_gp_objective(dmc, t, u_size);
    const SearchResult r = maximize(obj.exact, obj.smooth, obj.shape, cfg);
    rep.terms.emplace_back("theta" + std::to_string(t + 1), r.best_value);
    rep.converged = rep.converged && r.converged;
    if (!min_law || r.best_value < min_val) {
      min_val = r.best_value;
      min_law = obj.decode(r.best_law);
    }
  }
  rep.finish_from_terms();
  if (min_law) rep.achieving_law = *min_law;
  return rep;
}

}  // namespace gpcap
