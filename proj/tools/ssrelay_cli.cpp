// Command-line driver: single-point Monte Carlo checks against the closed
// forms, threshold/source-power optimizers, generic parameter sweeps, the
// alternating relay protocol, and the preset sweeps behind the study figures.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ssrelay/ssrelay.hpp"

namespace {

using namespace ssrelay;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  int trials = 0;  // 0: subcommand default
  std::string out = "-";
  std::string format = "csv";
  int threads = 0;
  NetworkConfig overrides;  // populated by per-field flags
  bool has_override[12] = {};
};

enum OverrideField {
  kN, kM, kNp, kSigmaS2, kSigmaD2, kSigmaP2, kSigmaSp2, kSigmaR2, kGamma, kPsMax, kAlpha,
  kLogBase
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value scenario file");
  cmd->add_option("--seed", args.seed, "master seed for all random streams");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials (or cycles)");
  cmd->add_option("--out", args.out, "output path, '-' for stdout");
  cmd->add_option("--format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", args.threads,
                  "worker threads (default: SSRELAY_THREADS or hardware)");
  auto field = [&args, cmd](const char* flag, auto member, OverrideField id,
                            const char* help) {
    cmd->add_option_function<double>(
        flag,
        [&args, member, id](double v) {
          args.overrides.*member = static_cast<std::decay_t<decltype(args.overrides.*member)>>(v);
          args.has_override[id] = true;
        },
        help);
  };
  field("--n", &NetworkConfig::n, kN, "relay count");
  field("--antennas", &NetworkConfig::M, kM, "antennas per terminal (M)");
  field("--primaries", &NetworkConfig::Np, kNp, "primary node count (N_p)");
  field("--sigma-s2", &NetworkConfig::sigma_s2, kSigmaS2, "source->relay variance");
  field("--sigma-d2", &NetworkConfig::sigma_d2, kSigmaD2, "relay->destination variance");
  field("--sigma-p2", &NetworkConfig::sigma_p2, kSigmaP2, "relay->primary variance");
  field("--sigma-sp2", &NetworkConfig::sigma_sp2, kSigmaSp2, "source->primary variance");
  field("--sigma-r2", &NetworkConfig::sigma_r2, kSigmaR2, "relay->relay variance");
  field("--gamma", &NetworkConfig::gamma, kGamma, "per-primary interference cap");
  field("--ps-max", &NetworkConfig::ps_max, kPsMax, "source power cap");
  field("--alpha", &NetworkConfig::alpha, kAlpha, "eligibility threshold");
}

NetworkConfig resolve_config(const CommonArgs& args) {
  NetworkConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  if (args.has_override[kN]) cfg.n = args.overrides.n;
  if (args.has_override[kM]) cfg.M = args.overrides.M;
  if (args.has_override[kNp]) cfg.Np = args.overrides.Np;
  if (args.has_override[kSigmaS2]) cfg.sigma_s2 = args.overrides.sigma_s2;
  if (args.has_override[kSigmaD2]) cfg.sigma_d2 = args.overrides.sigma_d2;
  if (args.has_override[kSigmaP2]) cfg.sigma_p2 = args.overrides.sigma_p2;
  if (args.has_override[kSigmaSp2]) cfg.sigma_sp2 = args.overrides.sigma_sp2;
  if (args.has_override[kSigmaR2]) cfg.sigma_r2 = args.overrides.sigma_r2;
  if (args.has_override[kGamma]) cfg.gamma = args.overrides.gamma;
  if (args.has_override[kPsMax]) cfg.ps_max = args.overrides.ps_max;
  if (args.has_override[kAlpha]) cfg.alpha = args.overrides.alpha;
  cfg.validate();
  return cfg;
}

int trials_or(const CommonArgs& args, int fallback) {
  return args.trials > 0 ? args.trials : fallback;
}

const char* mode_name(Clustering m) { return m == Clustering::fixed ? "fixed" : "gain"; }

void emit(const OutputTable& table, const CommonArgs& args) {
  write_table(table, args.out, args.format);
}

int cmd_rate(const CommonArgs& args, const std::string& mode_str, double ps) {
  NetworkConfig cfg = resolve_config(args);
  const Clustering mode = mode_str == "gain" ? Clustering::gain : Clustering::fixed;
  const auto m = run_trials_measured(cfg, mode, ps, trials_or(args, 500), SeedPath(args.seed),
                                     args.threads);
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.add_meta("mode", std::string(mode_name(mode)));
  t.columns = {"trials", "ps", "pr", "mc_rate", "mc_stderr", "closed_form", "relative_gap"};
  t.add_row({static_cast<long long>(m.report.n_trials), m.report.ps, m.report.pr,
             m.report.mean_rate, m.report.stderr_mean, m.report.closed_form,
             m.report.relative_gap});
  emit(t, args);
  return 0;
}

int cmd_optimize_alpha(const CommonArgs& args, double ps) {
  NetworkConfig cfg = resolve_config(args);
  const double alpha_opt = optimal_alpha(cfg, ps);
  const auto budget =
      relay_power_budget(alpha_opt, ps, cfg.gamma, cfg.sigma_sp2, cfg.n, cfg.sigma_p2);
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("ps", ps);
  t.columns = {"alpha_opt", "pr", "rate_fixed_closed", "rate_gain_closed"};
  NetworkConfig at = cfg;
  at.alpha = alpha_opt;
  t.add_row({alpha_opt, budget.pr, rate_fixed_clustering(at, budget.pr, ps),
             rate_gain_clustering(at, budget.pr, ps)});
  std::cout << "alpha_opt = " << format_double(alpha_opt) << "\n";
  if (args.out != "-") emit(t, args);
  return 0;
}

int cmd_optimize_ps(const CommonArgs& args, std::optional<double> f_alpha,
                    std::optional<double> alpha) {
  NetworkConfig cfg = resolve_config(args);
  double f = 0.8;  // reference curve value; --alpha or --f-alpha replace it
  if (alpha) f = exponential_partial_mean(*alpha, cfg.sigma_p2);
  if (f_alpha) f = *f_alpha;
  const double ps_opt = optimal_source_power_given_f(cfg.gamma, cfg.sigma_sp2, cfg.sigma_s2,
                                                     cfg.sigma_d2, cfg.ps_max, f);
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("f_alpha", f);
  t.columns = {"ps_opt", "gamma_r"};
  t.add_row({ps_opt, cfg.residual_relay_budget(ps_opt)});
  std::cout << "ps_opt = " << format_double(ps_opt) << "\n";
  if (args.out != "-") emit(t, args);
  return 0;
}

void append_sweep_rows(OutputTable& t, const SweepResult& result, bool with_mc) {
  for (const auto& p : result.points) {
    if (p.failed) {
      t.add_row({p.axis_value, std::string("error"), std::string(p.error), 0.0, 0.0, 0.0, 0.0});
      continue;
    }
    const double imean = p.interference_mean.size() > 0 ? p.interference_mean.maxCoeff() : 0.0;
    t.add_row({p.axis_value, std::string("ok"), std::string(""), p.rate_fixed_closed,
               p.rate_gain_closed, with_mc ? p.report.mean_rate : 0.0,
               with_mc ? p.report.stderr_mean : 0.0, p.report.pr, p.report.ps, imean});
  }
}

int cmd_sweep(const CommonArgs& args, const std::string& axis_str,
              std::vector<double> values, double from, double to, int points, bool log_axis,
              const std::string& mode_str, double ps, bool closed_form_only,
              std::optional<double> delta, double c0) {
  NetworkConfig cfg = resolve_config(args);
  const SweepAxis axis = sweep_axis_from_name(axis_str);
  if (values.empty()) {
    if (points < 2 || !(to > from))
      throw std::invalid_argument("sweep: give --values or a valid --from/--to/--points");
    for (int k = 0; k < points; ++k) {
      const double u = static_cast<double>(k) / (points - 1);
      values.push_back(log_axis ? from * std::pow(to / from, u) : from + u * (to - from));
    }
  }
  SweepOptions opt;
  opt.mode = mode_str == "gain" ? Clustering::gain : Clustering::fixed;
  opt.ps = ps;
  opt.trials = trials_or(args, 200);
  opt.seed = args.seed;
  opt.threads = args.threads;
  opt.monte_carlo = !closed_form_only;
  opt.schedule_delta = delta;
  opt.schedule_c0 = c0;
  const auto result = sweep(cfg, axis, values, opt);

  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("axis", result.axis_name);
  t.add_meta("mode", std::string(mode_name(opt.mode)));
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.add_meta("trials", static_cast<long long>(opt.trials));
  t.columns = {result.axis_name, "status", "error", "rate_fixed_closed", "rate_gain_closed",
               "mc_rate", "mc_stderr", "pr", "ps", "interference_max"};
  append_sweep_rows(t, result, opt.monte_carlo);
  emit(t, args);
  return 0;
}

int cmd_arp(const CommonArgs& args, int L, double ps, std::optional<double> eta_arg,
            int cycles_default, bool no_cancel) {
  NetworkConfig cfg = resolve_config(args);
  if (L != 3) throw std::invalid_argument("arp: closed forms cover L = 3 only");
  const double eta = eta_arg ? *eta_arg : arp_power_coefficient(cfg, L, ps);
  const auto run = arp_run(cfg, eta, ps, trials_or(args, cycles_default), SeedPath(args.seed),
                           args.threads, !no_cancel);
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("L", static_cast<long long>(L));
  t.add_meta("eta", eta);
  t.add_meta("ps", ps);
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.add_meta("cancellation", std::string(no_cancel ? "off" : "on"));
  t.columns = {"cycles",   "r1_mc",     "r1_stderr", "r2_mc",     "r2_stderr",
               "overall_mc", "overall_stderr", "r1_closed", "r2_closed", "overall_closed"};
  t.add_row({static_cast<long long>(run.cycles), run.r1_mean, run.r1_stderr, run.r2_mean,
             run.r2_stderr, run.overall_mean, run.overall_stderr, run.r1_closed,
             run.r2_closed, run.overall_closed});
  emit(t, args);
  return 0;
}

// Preset sweeps behind the study figures. Paper-style defaults: M = 2,
// N_p = 1, gamma = 5, Ps_max = 10, unit variances.

int cmd_fig2(const CommonArgs& args) {
  NetworkConfig cfg = resolve_config(args);
  const double ps = 5.0;
  std::vector<double> alphas;
  for (double a = 0.2; a <= 4.0 + 1e-9; a += 0.2) alphas.push_back(a);
  SweepOptions opt;
  opt.mode = Clustering::fixed;
  opt.ps = ps;
  opt.trials = trials_or(args, 200);
  opt.seed = args.seed;
  opt.threads = args.threads;
  const auto result = sweep(cfg, SweepAxis::alpha, alphas, opt);

  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("figure", std::string("fig2"));
  t.add_meta("ps", ps);
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.add_meta("trials", static_cast<long long>(opt.trials));
  t.columns = {"alpha", "closed_form_rate_fixed", "closed_form_rate_gain", "mc_rate",
               "mc_stderr"};
  for (const auto& p : result.points)
    t.add_row({p.axis_value, p.rate_fixed_closed, p.rate_gain_closed, p.report.mean_rate,
               p.report.stderr_mean});
  emit(t, args);
  return 0;
}

int cmd_fig3(const CommonArgs& args) {
  NetworkConfig cfg = resolve_config(args);
  const auto trends = qualitative_ps_trends(cfg, 0.8);
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("figure", std::string("fig3"));
  t.add_meta("f_alpha", 0.8);
  t.columns = {"parameter", "value", "ps_opt"};
  for (std::size_t i = 0; i < trends.grid.size(); ++i)
    t.add_row({std::string("sigma_sp2"), trends.grid[i], trends.ps_vs_sigma_sp2[i]});
  for (std::size_t i = 0; i < trends.grid.size(); ++i)
    t.add_row({std::string("sigma_s2"), trends.grid[i], trends.ps_vs_sigma_s2[i]});
  for (std::size_t i = 0; i < trends.grid.size(); ++i)
    t.add_row({std::string("sigma_d2"), trends.grid[i], trends.ps_vs_sigma_d2[i]});
  emit(t, args);
  return 0;
}

int cmd_fig4(const CommonArgs& args) {
  NetworkConfig base = resolve_config(args);
  base.alpha = 5.0;  // threshold pinned to the cap for this preset
  const double ps = 5.0;
  const std::vector<double> ns = {50, 100, 200, 400, 700, 1000};
  OutputTable t;
  add_config_meta(t, base);
  t.add_meta("figure", std::string("fig4"));
  t.add_meta("ps", ps);
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.columns = {"sigma_p2", "mode", "n", "closed_form", "mc_rate", "mc_stderr",
               "relative_gap"};
  for (double sp2 : {0.5, 1.0, 2.0}) {
    for (Clustering mode : {Clustering::fixed, Clustering::gain}) {
      NetworkConfig cfg = base;
      cfg.sigma_p2 = sp2;
      SweepOptions opt;
      opt.mode = mode;
      opt.ps = ps;
      opt.trials = trials_or(args, 200);
      opt.seed = args.seed;
      opt.threads = args.threads;
      const auto result = sweep(cfg, SweepAxis::n, ns, opt);
      for (const auto& p : result.points)
        t.add_row({sp2, std::string(mode_name(mode)), p.axis_value, p.report.closed_form,
                   p.report.mean_rate, p.report.stderr_mean, p.report.relative_gap});
    }
  }
  emit(t, args);
  return 0;
}

int cmd_fig6(const CommonArgs& args) {
  NetworkConfig cfg = resolve_config(args);
  const std::vector<double> ns = {1000, 3162, 10000, 31623, 100000};
  OutputTable t;
  add_config_meta(t, cfg);
  t.add_meta("figure", std::string("fig6"));
  t.add_meta("c0", 5.0);
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.columns = {"delta", "n", "gamma_n", "ps_n", "pr_n", "rate_fixed_closed", "mc_rate",
               "mc_stderr", "interference", "interference_stderr"};
  for (double delta : {0.1, 0.2}) {
    SweepOptions opt;
    opt.mode = Clustering::fixed;
    opt.trials = trials_or(args, 50);
    opt.seed = args.seed;
    opt.threads = args.threads;
    opt.schedule_delta = delta;
    opt.schedule_c0 = 5.0;
    const auto result = sweep(cfg, SweepAxis::n, ns, opt);
    for (const auto& p : result.points) {
      const double imean =
          p.interference_mean.size() > 0 ? p.interference_mean.maxCoeff() : 0.0;
      const double ise =
          p.interference_stderr.size() > 0 ? p.interference_stderr.maxCoeff() : 0.0;
      t.add_row({delta, p.axis_value, p.gamma_n, p.report.ps, p.report.pr,
                 p.rate_fixed_closed, p.report.mean_rate, p.report.stderr_mean, imean, ise});
    }
  }
  emit(t, args);
  return 0;
}

int cmd_fig7(const CommonArgs& args) {
  NetworkConfig base = resolve_config(args);
  base.alpha = 1e9;  // every relay eligible, as in the protocol study
  const double ps = 5.0;
  const std::vector<int> ns = {40, 100, 200, 400, 800};
  OutputTable t;
  add_config_meta(t, base);
  t.add_meta("figure", std::string("fig7"));
  t.add_meta("ps", ps);
  t.add_meta("L", static_cast<long long>(3));
  t.add_meta("seed", static_cast<long long>(args.seed));
  t.columns = {"sigma_r2", "n",          "eta",        "r1_closed",  "r2_closed",
               "overall_closed", "overall_mc", "overall_stderr"};
  for (double sr2 : {0.5, 1.0}) {
    for (int n : ns) {
      NetworkConfig cfg = base;
      cfg.sigma_r2 = sr2;
      cfg.n = n;
      const double eta = arp_power_coefficient(cfg, 3, ps);
      const auto run = arp_run(cfg, eta, ps, trials_or(args, 200),
                               SeedPath(args.seed).child(static_cast<std::uint64_t>(n)),
                               args.threads);
      t.add_row({sr2, static_cast<double>(n), eta, run.r1_closed, run.r2_closed,
                 run.overall_closed, run.overall_mean, run.overall_stderr});
    }
  }
  emit(t, args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum-sharing relay network simulator and analysis engine"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* rate_cmd = app.add_subcommand("rate", "Monte Carlo rate vs. the closed form");
  std::string rate_mode = "fixed";
  double rate_ps = 5.0;
  rate_cmd->add_option("--mode", rate_mode, "clustering: fixed or gain")
      ->check(CLI::IsMember({"fixed", "gain"}));
  rate_cmd->add_option("--ps", rate_ps, "source power");
  add_common(rate_cmd, args);

  auto* oa_cmd = app.add_subcommand("optimize-alpha", "rate-maximizing eligibility threshold");
  double oa_ps = 5.0;
  oa_cmd->add_option("--ps", oa_ps, "source power");
  add_common(oa_cmd, args);

  auto* ops_cmd = app.add_subcommand("optimize-ps", "rate-maximizing source power");
  std::optional<double> ops_f_alpha;
  std::optional<double> ops_alpha;
  ops_cmd->add_option("--f-alpha", ops_f_alpha, "use this f(alpha) value (default 0.8)");
  ops_cmd->add_option("--opt-alpha", ops_alpha, "derive f(alpha) from this threshold");
  add_common(ops_cmd, args);

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter axis");
  std::string sweep_axis = "alpha";
  std::vector<double> sweep_values;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_points = 0;
  bool sweep_log = false, sweep_cf_only = false;
  std::string sweep_mode = "fixed";
  double sweep_ps = 5.0;
  std::optional<double> sweep_delta;
  double sweep_c0 = 5.0;
  sweep_cmd->add_option("--axis", sweep_axis,
                        "alpha|ps|n|sigma_sp2|sigma_s2|sigma_d2|sigma_r2|delta");
  sweep_cmd->add_option("--values", sweep_values, "explicit axis values");
  sweep_cmd->add_option("--from", sweep_from, "axis start");
  sweep_cmd->add_option("--to", sweep_to, "axis end");
  sweep_cmd->add_option("--points", sweep_points, "number of axis points");
  sweep_cmd->add_flag("--log", sweep_log, "geometric axis spacing");
  sweep_cmd->add_flag("--closed-form-only", sweep_cf_only, "skip Monte Carlo");
  sweep_cmd->add_option("--mode", sweep_mode, "clustering: fixed or gain")
      ->check(CLI::IsMember({"fixed", "gain"}));
  sweep_cmd->add_option("--ps", sweep_ps, "source power");
  sweep_cmd->add_option("--delta", sweep_delta, "interference-decay schedule exponent");
  sweep_cmd->add_option("--c0", sweep_c0, "interference-decay schedule scale");
  add_common(sweep_cmd, args);

  auto* arp_cmd = app.add_subcommand("arp", "alternating relay protocol, MC vs. closed form");
  int arp_l = 3;
  double arp_ps = 5.0;
  std::optional<double> arp_eta;
  bool arp_no_cancel = false;
  arp_cmd->add_option("--L", arp_l, "frames per cycle");
  arp_cmd->add_option("--ps", arp_ps, "source power");
  arp_cmd->add_option("--eta", arp_eta, "relay power coefficient (default: budget)");
  arp_cmd->add_flag("--no-cancel", arp_no_cancel, "keep inter-relay interference");
  add_common(arp_cmd, args);

  auto* fig2_cmd = app.add_subcommand("fig2", "threshold sweep preset");
  add_common(fig2_cmd, args);
  auto* fig3_cmd = app.add_subcommand("fig3", "optimal source power curves preset");
  add_common(fig3_cmd, args);
  auto* fig4_cmd = app.add_subcommand("fig4", "rate vs. relay count preset");
  add_common(fig4_cmd, args);
  auto* fig6_cmd = app.add_subcommand("fig6", "rate/interference tradeoff preset");
  add_common(fig6_cmd, args);
  auto* fig7_cmd = app.add_subcommand("fig7", "alternating protocol preset");
  add_common(fig7_cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (rate_cmd->parsed()) return cmd_rate(args, rate_mode, rate_ps);
    if (oa_cmd->parsed()) return cmd_optimize_alpha(args, oa_ps);
    if (ops_cmd->parsed()) return cmd_optimize_ps(args, ops_f_alpha, ops_alpha);
    if (sweep_cmd->parsed())
      return cmd_sweep(args, sweep_axis, sweep_values, sweep_from, sweep_to, sweep_points,
                       sweep_log, sweep_mode, sweep_ps, sweep_cf_only, sweep_delta, sweep_c0);
    if (arp_cmd->parsed()) return cmd_arp(args, arp_l, arp_ps, arp_eta, 500, arp_no_cancel);
    if (fig2_cmd->parsed()) return cmd_fig2(args);
    if (fig3_cmd->parsed()) return cmd_fig3(args);
    if (fig4_cmd->parsed()) return cmd_fig4(args);
    if (fig6_cmd->parsed()) return cmd_fig6(args);
    if (fig7_cmd->parsed()) return cmd_fig7(args);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleDesign& e) {
    std::cerr << "infeasible design: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
