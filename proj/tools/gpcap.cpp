// Command-line workbench for capacity bounds of compound state-dependent
// channels with transmitter side information: closed-form Gaussian
// dirty-paper sweeps, discrete rate evaluators and their optimizer, an exact
// inequality-projection verifier, and a degradedness tester.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcap/config.hpp"
#include "gpcap/fm_theorems.hpp"
#include "gpcap/gdp.hpp"
#include "gpcap/gp.hpp"
#include "gpcap/optimize.hpp"
#include "gpcap/prob.hpp"

namespace {

using gpcap::cfg::ConfigError;
using gpcap::cfg::Cursor;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitFinding = 3;  // fm-verify reported a mismatch

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::optional<json> maybe_load(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return gpcap::cfg::load_file(path);
}

// -------------------------------------------------------------------------
// gdp commands. Config file values apply only where the flag was not given
// (flags override file, file overrides defaults).
// -------------------------------------------------------------------------

struct GdpCommon {
  std::string config_path;
  double p = 1.0;
  double n = 0.1;
  std::vector<double> thetas = {-1.0, 1.0};
  CLI::Option* p_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* thetas_opt = nullptr;

  void register_options(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    p_opt = cmd->add_option("--p", p, "input power");
    n_opt = cmd->add_option("--n", n, "noise power");
    thetas_opt = cmd->add_option("--thetas", thetas, "fading set")->delimiter(',');
  }

  void apply_config(const std::optional<json>& j) {
    if (!j) return;
    Cursor root(*j, "");
    if (!root.has("gdp")) return;
    const Cursor g = root.at("gdp");
    if (!p_opt->count() && g.has("p")) p = g.at("p").as_double();
    if (!n_opt->count() && g.has("n")) n = g.at("n").as_double();
    if (!thetas_opt->count() && g.has("thetas")) thetas = g.at("thetas").as_double_array();
  }
};

struct SweepArgs {
  GdpCommon common;
  double inr_min = 0.1;
  double inr_max = 1000.0;
  double q_min = 0.0;
  double q_max = 0.0;
  std::size_t points = 200;
  std::string out = "gdp_sweep.csv";
  unsigned jobs = 1;
  bool self_check = false;
  CLI::Option* inr_min_opt = nullptr;
  CLI::Option* inr_max_opt = nullptr;
  CLI::Option* q_min_opt = nullptr;
  CLI::Option* q_max_opt = nullptr;
  CLI::Option* points_opt = nullptr;

  void register_options(CLI::App* cmd) {
    common.register_options(cmd);
    inr_min_opt = cmd->add_option("--inr-min", inr_min, "sweep start (INR = Q/N)");
    inr_max_opt = cmd->add_option("--inr-max", inr_max, "sweep end");
    q_min_opt = cmd->add_option("--q-min", q_min, "sweep start given as Q instead of INR");
    q_max_opt = cmd->add_option("--q-max", q_max, "sweep end given as Q");
    points_opt = cmd->add_option("--points", points, "number of log-spaced points");
    cmd->add_option("--out", out, "output CSV path");
    cmd->add_option("--jobs", jobs, "parallel evaluation threads");
    cmd->add_flag("--self-check", self_check, "re-validate invariants on the emitted rows");
  }

  void apply_config() {
    const auto j = maybe_load(common.config_path);
    common.apply_config(j);
    if (j) {
      Cursor root(*j, "");
      if (root.has("sweep")) {
        const Cursor s = root.at("sweep");
        if (!inr_min_opt->count() && s.has("inr_min")) inr_min = s.at("inr_min").as_double();
        if (!inr_max_opt->count() && s.has("inr_max")) inr_max = s.at("inr_max").as_double();
        if (!q_min_opt->count() && s.has("q_min")) q_min = s.at("q_min").as_double();
        if (!q_max_opt->count() && s.has("q_max")) q_max = s.at("q_max").as_double();
        if (!points_opt->count() && s.has("points")) points = s.at("points").as_size();
      }
    }
    // a Q range maps onto the INR axis (INR = Q/N)
    const bool have_q = q_min_opt->count() || q_max_opt->count() || q_min > 0.0 || q_max > 0.0;
    if (have_q) {
      if (!(q_min > 0.0) || !(q_max > q_min)) {
        throw ConfigError("config: field --q-min/--q-max must satisfy 0 < q_min < q_max");
      }
      inr_min = q_min / common.n;
      inr_max = q_max / common.n;
    }
  }
};

int run_sweep(SweepArgs& args) {
  args.apply_config();
  const auto pts = gpcap::gdp::sweep(args.common.p, args.common.n, args.common.thetas,
                                     args.inr_min, args.inr_max, args.points, args.jobs);
  const std::string csv = gpcap::gdp::sweep_csv(pts);
  write_file(args.out, csv);
  std::cout << "wrote " << pts.size() << " sweep rows to " << args.out << "\n";

  if (args.self_check) {
    std::ifstream in(args.out, std::ios::binary);
    std::string line;
    if (!std::getline(in, line) || line != gpcap::gdp::sweep_csv_header()) {
      std::cerr << "self-check: header mismatch in " << args.out << "\n";
      return kExitRuntime;
    }
    const double awgn_expect = 0.5 * std::log2(1.0 + args.common.p / args.common.n);
    double prev_q = -1.0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() != 7) {
        std::cerr << "self-check: row " << row << ": expected 7 columns\n";
        return kExitRuntime;
      }
      const double q = std::stod(fields[0]);
      const double lower = std::stod(fields[2]);
      const double upper = std::stod(fields[4]);
      const double awgn = std::stod(fields[6]);
      if (!(q > prev_q)) {
        std::cerr << "self-check: row " << row << ": field Q not increasing\n";
        return kExitRuntime;
      }
      prev_q = q;
      if (lower < -1e-12 || lower > upper + 1e-9) {
        std::cerr << "self-check: row " << row << ": field lower_bits violates bounds\n";
        return kExitRuntime;
      }
      if (std::abs(awgn - awgn_expect) > 1e-8) {
        std::cerr << "self-check: row " << row << ": field awgn_ref mismatch\n";
        return kExitRuntime;
      }
    }
    std::cout << "self-check passed (" << row << " rows)\n";
  }
  return kExitOk;
}

int run_point(GdpCommon& common, double q, double inr, bool have_q, bool have_inr,
              const std::string& csv_out) {
  common.apply_config(maybe_load(common.config_path));
  if (have_inr && !have_q) q = inr * common.n;
  if (!have_q && !have_inr) throw ConfigError("config: missing field --q (or --inr)");

  gpcap::gdp::GdpParams g(common.p, common.n, q, common.thetas);
  const auto pt = gpcap::gdp::sweep_point(common.p, common.n, common.thetas, q);

  std::cout << "P=" << fmt(common.p) << " N=" << fmt(common.n) << " Q=" << fmt(q)
            << " INR=" << fmt(pt.inr) << " thetas=[";
  for (std::size_t i = 0; i < common.thetas.size(); ++i) {
    std::cout << (i ? "," : "") << common.thetas[i];
  }
  std::cout << "]\n";
  std::cout << "lower_bits   = " << fmt(pt.lower.bits) << "  (regime "
            << gpcap::gdp::regime_name(pt.lower.regime) << ", split Pc=" << fmt(pt.lower.split.p_c)
            << " Pd=" << fmt(pt.lower.split.p_delta) << ")\n";
  if (q > 0.0 && g.theta_min() != g.theta_max()) {
    std::cout << "upper_bits   = " << fmt(pt.upper.bits) << "  (rho " << fmt(pt.upper.rho)
              << ")\n";
  } else {
    std::cout << "upper_bits   = " << fmt(pt.upper.bits) << "  (exact: no compound penalty)\n";
  }
  std::cout << "awgn_ref     = " << fmt(pt.awgn) << "\n";
  if (!g.symmetric_magnitudes() && !g.equal_extremes() && q > 0.0) {
    std::cout << "mismatch*    = " << fmt(gpcap::gdp::mismatch_factor_full(g)) << "\n";
  }
  if (g.theta_min() + g.theta_max() != 0.0) {
    const auto as = gpcap::gdp::asymptotics(g);
    std::cout << "eps_inf      = " << fmt(as.eps_inf) << "\n";
    std::cout << "rate_K_inf   = " << fmt(as.rate_k_inf) << "\n";
    std::cout << "rate_spread  = " << fmt(as.rate_ratio_inf) << "\n";
  }
  if (pt.lower.ambiguous_set) {
    std::cout << "note: theta set mixes symmetric and asymmetric magnitudes; the\n"
                 "      |min| != |max| branch was applied\n";
  }
  if (!csv_out.empty()) {
    write_file(csv_out, gpcap::gdp::sweep_csv({pt}));
    std::cout << "wrote 1 row to " << csv_out << "\n";
  }
  return kExitOk;
}

// -------------------------------------------------------------------------
// discrete commands
// -------------------------------------------------------------------------

std::string report_text(const std::string& name, const gpcap::RateReport& rep) {
  std::string s = name + ": value = " + fmt(rep.value_bits) + " bits";
  if (rep.clamped) s += " (clamped from " + fmt(rep.raw_min_bits) + ")";
  if (!rep.converged) s += " [search budget exhausted: best-so-far]";
  s += "\n";
  for (const auto& [label, v] : rep.terms) {
    s += "  term " + label + " = " + fmt(v);
    if (label == rep.min_label) s += "  <- min";
    s += "\n";
  }
  if (rep.pair_term_alt) {
    s += "  pair term (composite form) = " + fmt(*rep.pair_term_alt) +
         (rep.pair_term_mismatch ? "  MISMATCH vs split form\n" : "  (matches split form)\n");
  }
  return s;
}

void append_report_csv(std::string& csv, const std::string& name, const gpcap::RateReport& rep) {
  for (const auto& [label, v] : rep.terms) {
    csv += name + "," + label + "," + fmt(v) + "," + fmt(rep.value_bits) + "," +
           (rep.clamped ? "1" : "0") + "\n";
  }
}

/// Re-asserts the reported-value invariant on an emitted report.
void self_check_report(const gpcap::RateReport& rep) {
  double mn = rep.terms.front().second;
  for (const auto& [l, v] : rep.terms) {
    (void)l;
    mn = std::min(mn, v);
  }
  if (std::abs(rep.value_bits - std::max(0.0, mn)) > 1e-12) {
    throw std::runtime_error("self-check: field value_bits is not max(0, min terms)");
  }
}

int run_discrete_eval(const std::string& config_path, const std::string& out,
                      bool skip_degraded_check, bool self_check) {
  const json j = gpcap::cfg::load_file(config_path);
  const Cursor root(j, "");
  const gpcap::CompoundDmc dmc = gpcap::cfg::parse_dmc(root.at("dmc"));

  std::string csv = "bound,term,term_bits,value_bits,clamped\n";
  bool any = false;

  if (root.has("law")) {
    any = true;
    const gpcap::CodingLaw law = gpcap::cfg::parse_coding_law(root.at("law"), dmc);
    if (law.num_v() == 0) {
      const auto rep = gpcap::worst_case_gp_bound(dmc, law);
      std::cout << report_text("worst-case-gp", rep);
      append_report_csv(csv, "worst-case-gp", rep);
      if (self_check) self_check_report(rep);
    } else {
      const auto sub = gpcap::marton_subset_bound(dmc, law);
      std::cout << report_text("subset", sub);
      append_report_csv(csv, "subset", sub);
      if (self_check) self_check_report(sub);
      if (dmc.k() == 2 && law.num_v() == 2) {
        const auto pair = gpcap::marton_pair_bound(dmc, law);
        std::cout << report_text("pair", pair);
        append_report_csv(csv, "pair", pair);
        if (self_check) self_check_report(pair);
      }
      const auto gp = gpcap::worst_case_gp_bound(dmc, law.u_restriction(dmc));
      std::cout << report_text("worst-case-gp (U restriction)", gp);
      append_report_csv(csv, "worst-case-gp-restriction", gp);
      if (self_check) self_check_report(gp);
    }
  }
  if (root.has("chain_law")) {
    any = true;
    const gpcap::DegradedChainLaw chain = gpcap::cfg::parse_chain_law(root.at("chain_law"));
    const auto rep = gpcap::degraded_chain_bound(dmc, chain, skip_degraded_check);
    std::cout << report_text("chain", rep);
    append_report_csv(csv, "chain", rep);
    if (self_check) self_check_report(rep);
  }
  if (!any) throw ConfigError("config: missing field /law (or /chain_law)");
  if (!out.empty()) {
    write_file(out, csv);
    std::cout << "wrote report rows to " << out << "\n";
  }
  return kExitOk;
}

gpcap::SearchConfig search_from(const json* j, std::optional<int> restarts,
                                std::optional<int> iters, std::optional<std::uint64_t> seed,
                                std::optional<double> grid_fallback) {
  gpcap::SearchConfig cfg;
  if (j) {
    const Cursor root(*j, "");
    if (root.has("search")) cfg = gpcap::cfg::parse_search(root.at("search"));
    if (root.has("seed")) cfg.seed = static_cast<std::uint64_t>(root.at("seed").as_int());
  }
  if (restarts) cfg.restarts = *restarts;
  if (iters) cfg.max_iters = *iters;
  if (seed) cfg.seed = *seed;
  if (grid_fallback) cfg.grid_fallback = *grid_fallback;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: /search: ") + e.what());
  }
  return cfg;
}

int run_discrete_maximize(const std::string& config_path, const std::string& objective,
                          std::size_t u_size, std::vector<std::size_t> v_sizes,
                          std::optional<int> restarts, std::optional<int> iters,
                          std::optional<std::uint64_t> seed, std::optional<double> grid_fallback,
                          const std::string& trace_out, const std::string& law_out) {
  const json j = gpcap::cfg::load_file(config_path);
  const Cursor root(j, "");
  const gpcap::CompoundDmc dmc = gpcap::cfg::parse_dmc(root.at("dmc"));
  const gpcap::SearchConfig cfg = search_from(&j, restarts, iters, seed, grid_fallback);

  if (u_size == 0) u_size = gpcap::default_u_size(dmc);

  gpcap::RateObjective obj;
  if (objective == "worst-gp") {
    obj = gpcap::make_worst_case_gp_objective(dmc, u_size);
  } else if (objective == "subset") {
    if (v_sizes.empty()) v_sizes.assign(dmc.k(), u_size);
    obj = gpcap::make_subset_bound_objective(dmc, u_size, v_sizes);
  } else {
    throw ConfigError("config: field --objective must be 'worst-gp' or 'subset'");
  }

  const gpcap::SearchResult res = gpcap::maximize(obj.exact, obj.smooth, obj.shape, cfg);
  std::cout << "objective " << objective << ": best = " << fmt(res.best_value) << " bits ("
            << (res.converged ? "converged" : "budget exhausted") << ", " << res.evals
            << " evaluations)\n";
  std::cout << "clamped value = " << fmt(std::max(0.0, res.best_value)) << " bits\n";

  if (!trace_out.empty()) {
    std::string csv = "restart,best_bits\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      csv += std::to_string(i) + "," + fmt(res.trace[i]) + "\n";
    }
    write_file(trace_out, csv);
    std::cout << "wrote trace to " << trace_out << "\n";
  }
  if (!law_out.empty()) {
    const json law_json = {{"law", gpcap::cfg::law_to_json(obj.decode(res.best_law))},
                           {"dmc", gpcap::cfg::dmc_to_json(dmc)}};
    write_file(law_out, law_json.dump(2) + "\n");
    std::cout << "wrote achieving law to " << law_out << "\n";
  }
  return kExitOk;
}

int run_feedback(const std::string& config_path, std::size_t u_size, std::optional<int> restarts,
                 std::optional<int> iters, std::optional<std::uint64_t> seed,
                 const std::string& out) {
  const json j = gpcap::cfg::load_file(config_path);
  const Cursor root(j, "");
  const gpcap::CompoundDmc dmc = gpcap::cfg::parse_dmc(root.at("dmc"));
  const gpcap::SearchConfig cfg = search_from(&j, restarts, iters, seed, std::nullopt);
  if (u_size == 0) u_size = gpcap::default_u_size(dmc);

  const gpcap::RateReport rep = gpcap::feedback_capacity(dmc, cfg, u_size);
  std::cout << report_text("feedback", rep);
  if (!out.empty()) {
    std::string csv = "bound,term,term_bits,value_bits,clamped\n";
    append_report_csv(csv, "feedback", rep);
    write_file(out, csv);
  }
  return kExitOk;
}

int run_degraded_test(const std::string& config_path, std::size_t first, std::size_t second) {
  const json j = gpcap::cfg::load_file(config_path);
  const Cursor root(j, "");
  gpcap::Channel w1, w2;
  if (root.has("w1") && root.has("w2")) {
    w1 = gpcap::cfg::detail::parse_table(root.at("w1"), 2);
    w2 = gpcap::cfg::detail::parse_table(root.at("w2"), 2);
  } else {
    const gpcap::CompoundDmc dmc = gpcap::cfg::parse_dmc(root.at("dmc"));
    if (first >= dmc.k() || second >= dmc.k()) {
      throw ConfigError("config: field --first/--second out of range for /dmc/channels");
    }
    w1 = dmc.channel(first);
    w2 = dmc.channel(second);
  }
  const auto res = gpcap::test_degraded(w1, w2);
  const char* status = res.status == gpcap::DegradednessResult::Status::feasible
                           ? "feasible"
                           : (res.status == gpcap::DegradednessResult::Status::infeasible
                                  ? "infeasible"
                                  : "indeterminate");
  std::cout << "degradedness: " << status << " (residual " << fmt(res.residual) << ")\n";
  if (res.feasible) {
    std::cout << "mediating map rows:\n";
    for (std::size_t r = 0; r < res.w_tilde.num_rows(); ++r) {
      std::cout << " ";
      for (double v : res.w_tilde.row(r)) std::cout << " " << fmt(v);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int run_fm_project(const std::string& system_path, const std::vector<std::string>& eliminate,
                   const std::string& out) {
  std::ifstream in(system_path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + system_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  gpcap::fm::System sys;
  try {
    sys = gpcap::fm::System::from_text(ss.str());
  } catch (const gpcap::fm::ParseError& e) {
    throw ConfigError("config: " + system_path + ": " + e.what());
  }
  const gpcap::fm::System proj = sys.eliminate(eliminate);
  const std::string text = proj.to_text();
  std::cout << text;
  if (!out.empty()) write_file(out, text);
  return kExitOk;
}

int run_fm_verify(int k, bool drop_marton, bool reduce, const std::string& out) {
  std::string text;
  bool ok = true;
  if (reduce) {
    const auto rep = gpcap::fm::verify_pair_reduction_to_common();
    text += "== two-component projection with satellites collapsed onto the cloud center ==\n";
    text += rep.render();
    ok = ok && rep.equivalent() && rep.core_matches_targets;
  } else if (k == 2) {
    const auto rep = gpcap::fm::verify_pair_projection(!drop_marton);
    text += drop_marton ? "== two-component projection without the covering-sum constraint ==\n"
                        : "== two-component projection ==\n";
    text += rep.render();
    ok = ok && rep.targets_implied && rep.core_matches_targets;
    if (!drop_marton) ok = ok && rep.projection_implied;
    if (drop_marton) {
      // the 2R bound must no longer follow
      std::vector<gpcap::fm::LinForm> forms;
      for (const auto& r : rep.projection.rows()) forms.push_back(r.form);
      const bool two_r_gone =
          !gpcap::fm::implied_by(gpcap::fm::pair_targets()[2].form, forms,
                                 gpcap::fm::pair_facts())
               .has_value();
      text += std::string("2R bound removed: ") + (two_r_gone ? "yes" : "NO") + "\n";
      ok = ok && two_r_gone;
    }
  } else {
    const auto rep = gpcap::fm::verify_layered_projection(k);
    text += "== " + std::to_string(k) + "-component projection ==\n";
    text += rep.render();
    ok = ok && rep.targets_implied && rep.projection_implied && rep.core_matches_targets;
  }
  std::cout << text;
  if (!out.empty()) write_file(out, text);
  return ok ? kExitOk : kExitFinding;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity-bound workbench for compound state-dependent channels"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand(
      "gdp-sweep", "log-spaced INR sweep of the Gaussian dirty-paper bounds (CSV)");
  sweep_args.register_options(sweep_cmd);

  GdpCommon point_common;
  double point_q = 0.0, point_inr = 0.0;
  std::string point_csv;
  auto* point_cmd =
      app.add_subcommand("gdp-point", "evaluate the Gaussian dirty-paper bounds at one Q");
  point_common.register_options(point_cmd);
  auto* qopt = point_cmd->add_option("--q", point_q, "interference power");
  auto* iopt = point_cmd->add_option("--inr", point_inr, "interference-to-noise ratio");
  point_cmd->add_option("--csv", point_csv, "also write a one-row CSV");

  std::string eval_config, eval_out;
  bool eval_skip_check = false, eval_self_check = false;
  auto* eval_cmd =
      app.add_subcommand("discrete-eval", "evaluate discrete bounds for a configured law");
  eval_cmd->add_option("--config", eval_config, "JSON config with dmc and law/chain_law")
      ->required();
  eval_cmd->add_option("--out", eval_out, "CSV report path");
  eval_cmd->add_flag("--skip-degraded-check", eval_skip_check,
                     "waive the degradedness precheck for the chain bound");
  eval_cmd->add_flag("--self-check", eval_self_check,
                     "re-assert report invariants on emitted rows");

  std::string max_config, max_objective = "worst-gp", max_trace, max_law_out;
  std::size_t max_u_size = 0;
  std::vector<std::size_t> max_v_sizes;
  std::optional<int> max_restarts, max_iters;
  std::optional<std::uint64_t> max_seed;
  std::optional<double> max_grid;
  auto* max_cmd =
      app.add_subcommand("discrete-maximize", "optimize a discrete bound over coding laws");
  max_cmd->add_option("--config", max_config, "JSON config with dmc (and search)")->required();
  max_cmd->add_option("--objective", max_objective, "worst-gp | subset");
  max_cmd->add_option("--u-size", max_u_size, "cloud-center alphabet size (0 = default rule)");
  max_cmd->add_option("--v-sizes", max_v_sizes, "satellite alphabet sizes")->delimiter(',');
  max_cmd->add_option("--restarts", max_restarts, "multi-start count");
  max_cmd->add_option("--iters", max_iters, "max iterations per restart");
  max_cmd->add_option("--seed", max_seed, "search seed");
  max_cmd->add_option("--grid-fallback", max_grid, "lattice resolution merged into the search");
  max_cmd->add_option("--trace", max_trace, "per-restart trace CSV path");
  max_cmd->add_option("--law-out", max_law_out, "write the achieving law as JSON");

  std::string fb_config, fb_out;
  std::size_t fb_u_size = 0;
  std::optional<int> fb_restarts, fb_iters;
  std::optional<std::uint64_t> fb_seed;
  auto* fb_cmd = app.add_subcommand(
      "feedback", "feedback capacity: per-component optimum, then the worst component");
  fb_cmd->add_option("--config", fb_config, "JSON config with dmc (and search)")->required();
  fb_cmd->add_option("--u-size", fb_u_size, "auxiliary alphabet size (0 = default rule)");
  fb_cmd->add_option("--restarts", fb_restarts, "multi-start count");
  fb_cmd->add_option("--iters", fb_iters, "max iterations per restart");
  fb_cmd->add_option("--seed", fb_seed, "search seed");
  fb_cmd->add_option("--out", fb_out, "CSV report path");

  std::string deg_config;
  std::size_t deg_first = 0, deg_second = 1;
  auto* deg_cmd =
      app.add_subcommand("degraded-test", "test stochastic degradedness between two channels");
  deg_cmd->add_option("--config", deg_config, "JSON config with w1/w2 tables or a dmc")
      ->required();
  deg_cmd->add_option("--first", deg_first, "index of the stronger channel in /dmc/channels");
  deg_cmd->add_option("--second", deg_second, "index of the candidate degraded channel");

  int fm_k = 2;
  bool fm_drop = false, fm_reduce = false;
  std::string fm_out, fm_system;
  std::vector<std::string> fm_eliminate;
  auto* fm_cmd = app.add_subcommand(
      "fm-verify", "project the coding constraint systems and verify the rate bounds");
  fm_cmd->add_option("--k", fm_k, "component count (1..6); 2 uses the two-component system")
      ->check(CLI::Range(1, 6));
  fm_cmd->add_flag("--drop-marton", fm_drop, "drop the covering-sum constraint (K=2 only)");
  fm_cmd->add_flag("--reduce", fm_reduce, "collapse satellites onto the cloud center (K=2)");
  fm_cmd->add_option("--system", fm_system,
                     "project a user system from a text file instead of the built-ins");
  fm_cmd->add_option("--eliminate", fm_eliminate, "variables to eliminate (with --system)")
      ->delimiter(',');
  fm_cmd->add_option("--out", fm_out, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help/version
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    if (point_cmd->parsed()) {
      return run_point(point_common, point_q, point_inr, qopt->count() > 0, iopt->count() > 0,
                       point_csv);
    }
    if (eval_cmd->parsed()) {
      return run_discrete_eval(eval_config, eval_out, eval_skip_check, eval_self_check);
    }
    if (max_cmd->parsed()) {
      return run_discrete_maximize(max_config, max_objective, max_u_size, max_v_sizes,
                                   max_restarts, max_iters, max_seed, max_grid, max_trace,
                                   max_law_out);
    }
    if (fb_cmd->parsed()) {
      return run_feedback(fb_config, fb_u_size, fb_restarts, fb_iters, fb_seed, fb_out);
    }
    if (deg_cmd->parsed()) return run_degraded_test(deg_config, deg_first, deg_second);
    if (fm_cmd->parsed()) {
      if (!fm_system.empty()) return run_fm_project(fm_system, fm_eliminate, fm_out);
      return run_fm_verify(fm_k, fm_drop, fm_reduce, fm_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
