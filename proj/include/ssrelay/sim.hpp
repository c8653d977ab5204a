#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ssrelay/arp.hpp"
#include "ssrelay/channel.hpp"
#include "ssrelay/config.hpp"
#include "ssrelay/optimize.hpp"
#include "ssrelay/rate.hpp"
#include "ssrelay/relay_control.hpp"

namespace ssrelay {

/// Worker count: explicit value, else SSRELAY_THREADS, else the hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SSRELAY_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, count) across a worker pool. Work items are
/// claimed by atomic index, so any partition is valid: every item writes only
/// its own slot and reductions happen later in index order, which keeps
/// results identical for every thread count.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::min(resolve_threads(threads), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Average interference at each primary node for one realization/plan:
/// the relay sum plus the source term, each halved for the two-hop duty
/// cycle. Length Np.
inline Eigen::VectorXd measure_interference(const ChannelRealization& real,
                                            const RelayPlan& plan,
                                            const NetworkConfig& cfg) {
  Eigen::VectorXd out(cfg.Np);
  for (int l = 0; l < cfg.Np; ++l) {
    double relays = 0.0;
    for (int i = 0; i < cfg.n; ++i)
      if (plan.eligible[static_cast<std::size_t>(i)]) relays += std::norm(real.G(l, i));
    out(l) = 0.5 * plan.pr * relays +
             plan.ps / (2.0 * cfg.M) * real.Hp.col(l).squaredNorm();
  }
  return out;
}

/// Monte Carlo rate summary for one operating point.
struct RateReport {
  int n_trials = 0;
  double mean_rate = 0.0;
  double stderr_mean = 0.0;
  double closed_form = 0.0;
  double relative_gap = 0.0;
  Clustering mode = Clustering::fixed;
  double ps = 0.0;
  double pr = 0.0;
  std::uint64_t master_seed = 0;
};

struct TrialMeasurement {
  RateReport report;
  Eigen::VectorXd interference_mean;
  Eigen::VectorXd interference_stderr;
};

namespace detail {

inline void mean_stderr(const std::vector<double>& xs, double& mean, double& se) {
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / n;
  if (xs.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1) / n);
}

}  // namespace detail

/// Averages the instantaneous rate over independent realizations and attaches
/// the matching closed-form prediction. Deterministic in (config, seed path,
/// trials) for any worker count. `pr_override` substitutes scheduled powers
/// for the budgeted relay power.
inline TrialMeasurement run_trials_measured(
    const NetworkConfig& cfg, Clustering mode, double ps, int trials, SeedPath path,
    int threads = 0, std::optional<double> pr_override = std::nullopt) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("run_trials: need at least one trial");

  std::vector<double> rates(static_cast<std::size_t>(trials));
  std::vector<Eigen::VectorXd> interference(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    const auto real = sample_channels(cfg, path.child(static_cast<std::uint64_t>(t)));
    const auto plan = build_relay_plan(
        cfg, real, mode, ps,
        pr_override ? *pr_override : std::numeric_limits<double>::quiet_NaN());
    const auto h_tilde = equivalent_channel(real, plan);
    const auto w = noise_covariance(real, plan);
    rates[static_cast<std::size_t>(t)] =
        instantaneous_rate(ps, cfg.M, h_tilde, w, cfg.rate_unit);
    interference[static_cast<std::size_t>(t)] = measure_interference(real, plan, cfg);
  });

  TrialMeasurement out;
  out.report.n_trials = trials;
  out.report.mode = mode;
  out.report.ps = ps;
  out.report.master_seed = path.key();
  detail::mean_stderr(rates, out.report.mean_rate, out.report.stderr_mean);

  const auto budget =
      relay_power_budget(cfg.alpha, ps, cfg.gamma, cfg.sigma_sp2, cfg.n, cfg.sigma_p2);
  out.report.pr = pr_override ? *pr_override : budget.pr;
  out.report.closed_form = mode == Clustering::fixed
                               ? rate_fixed_clustering(cfg, out.report.pr, ps)
                               : rate_gain_clustering(cfg, out.report.pr, ps);
  out.report.relative_gap = std::abs(out.report.mean_rate - out.report.closed_form) /
                            std::max(out.report.closed_form, 1e-12);

  out.interference_mean.resize(cfg.Np);
  out.interference_stderr.resize(cfg.Np);
  for (int l = 0; l < cfg.Np; ++l) {
    std::vector<double> per_trial(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t)
      per_trial[static_cast<std::size_t>(t)] = interference[static_cast<std::size_t>(t)](l);
    detail::mean_stderr(per_trial, out.interference_mean(l), out.interference_stderr(l));
  }
  return out;
}

inline RateReport run_trials(const NetworkConfig& cfg, Clustering mode, double ps, int trials,
                             std::uint64_t master_seed, int threads = 0) {
  auto m = run_trials_measured(cfg, mode, ps, trials, SeedPath(master_seed), threads);
  m.report.master_seed = master_seed;
  return m.report;
}

/// Monte Carlo summary of the alternating relay protocol (L = 3 closed forms;
/// general L simulated segment by segment is not needed here, the cycle
/// simulator covers the protocol's substance).
struct ArpRunResult {
  int cycles = 0;
  double r1_mean = 0.0, r1_stderr = 0.0;
  double r2_mean = 0.0, r2_stderr = 0.0;
  double overall_mean = 0.0, overall_stderr = 0.0;
  double r1_closed = 0.0, r2_closed = 0.0, overall_closed = 0.0;
};

inline ArpRunResult arp_run(const NetworkConfig& cfg, double eta, double ps, int cycles,
                            SeedPath path, int threads = 0, bool cancel_interference = true) {
  cfg.validate();
  if (cycles < 1) throw std::invalid_argument("arp_run: need at least one cycle");
  std::vector<double> r1(static_cast<std::size_t>(cycles));
  std::vector<double> r2(static_cast<std::size_t>(cycles));
  parallel_for(cycles, threads, [&](int c) {
    const auto frames = sample_arp_cycle(cfg, path.child(static_cast<std::uint64_t>(c)));
    const auto rates = arp_simulate_cycle(cfg, frames, eta, ps, cancel_interference);
    r1[static_cast<std::size_t>(c)] = rates.r1;
    r2[static_cast<std::size_t>(c)] = rates.r2;
  });
  ArpRunResult out;
  out.cycles = cycles;
  detail::mean_stderr(r1, out.r1_mean, out.r1_stderr);
  detail::mean_stderr(r2, out.r2_mean, out.r2_stderr);
  std::vector<double> overall(static_cast<std::size_t>(cycles));
  for (int c = 0; c < cycles; ++c)
    overall[static_cast<std::size_t>(c)] =
        (r1[static_cast<std::size_t>(c)] + r2[static_cast<std::size_t>(c)]) / 3.0;
  detail::mean_stderr(overall, out.overall_mean, out.overall_stderr);
  out.r1_closed = arp_rate_group1(cfg, eta, ps);
  out.r2_closed = arp_rate_group2(cfg, eta, ps);
  out.overall_closed = arp_overall_rate(cfg, eta, ps);
  return out;
}

enum class SweepAxis { alpha, ps, n, sigma_sp2, sigma_s2, sigma_d2, sigma_r2, delta };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::ps: return "ps";
    case SweepAxis::n: return "n";
    case SweepAxis::sigma_sp2: return "sigma_sp2";
    case SweepAxis::sigma_s2: return "sigma_s2";
    case SweepAxis::sigma_d2: return "sigma_d2";
    case SweepAxis::sigma_r2: return "sigma_r2";
    case SweepAxis::delta: return "delta";
  }
  return "?";
}

inline SweepAxis sweep_axis_from_name(const std::string& name) {
  for (SweepAxis a : {SweepAxis::alpha, SweepAxis::ps, SweepAxis::n, SweepAxis::sigma_sp2,
                      SweepAxis::sigma_s2, SweepAxis::sigma_d2, SweepAxis::sigma_r2,
                      SweepAxis::delta})
    if (name == sweep_axis_name(a)) return a;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

struct SweepOptions {
  Clustering mode = Clustering::fixed;
  double ps = 5.0;
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 0;
  bool monte_carlo = true;
  /// When set, powers at each point come from the interference-decay schedule
  /// with this delta (axis n or delta sweeps).
  std::optional<double> schedule_delta;
  double schedule_c0 = 5.0;
};

struct SweepPoint {
  double axis_value = 0.0;
  bool failed = false;
  std::string error;
  RateReport report;
  double rate_fixed_closed = 0.0;
  double rate_gain_closed = 0.0;
  double gamma_n = 0.0;  ///< interference cap in effect (schedule sweeps)
  Eigen::VectorXd interference_mean;
  Eigen::VectorXd interference_stderr;
};

struct SweepResult {
  std::string axis_name;
  std::vector<SweepPoint> points;
};

/// Evaluates one operating point per axis value; a failing point is recorded
/// with its error and the sweep continues.
inline SweepResult sweep(const NetworkConfig& base, SweepAxis axis,
                         const std::vector<double>& values, const SweepOptions& opt) {
  if (values.empty()) throw std::invalid_argument("sweep: need at least one axis value");
  SweepResult out;
  out.axis_name = sweep_axis_name(axis);
  const SeedPath root(opt.seed);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    SweepPoint point;
    point.axis_value = values[idx];
    try {
      NetworkConfig cfg = base;
      double ps = opt.ps;
      std::optional<double> pr_override;
      std::optional<double> delta = opt.schedule_delta;
      switch (axis) {
        case SweepAxis::alpha: cfg.alpha = values[idx]; break;
        case SweepAxis::ps: ps = values[idx]; break;
        case SweepAxis::n: cfg.n = static_cast<int>(values[idx]); break;
        case SweepAxis::sigma_sp2: cfg.sigma_sp2 = values[idx]; break;
        case SweepAxis::sigma_s2: cfg.sigma_s2 = values[idx]; break;
        case SweepAxis::sigma_d2: cfg.sigma_d2 = values[idx]; break;
        case SweepAxis::sigma_r2: cfg.sigma_r2 = values[idx]; break;
        case SweepAxis::delta: delta = values[idx]; break;
      }
      point.gamma_n = cfg.gamma;
      if (delta) {
        const auto sched = interference_decay_schedule(cfg, *delta, opt.schedule_c0, cfg.n);
        cfg.gamma = sched.gamma_n;
        ps = sched.ps_n;
        pr_override = sched.pr_n;
        point.gamma_n = sched.gamma_n;
      }
      const double pr =
          pr_override ? *pr_override
                      : relay_power_budget(cfg.alpha, ps, cfg.gamma, cfg.sigma_sp2, cfg.n,
                                           cfg.sigma_p2)
                            .pr;
      point.rate_fixed_closed = rate_fixed_clustering(cfg, pr, ps);
      point.rate_gain_closed = rate_gain_clustering(cfg, pr, ps);
      if (opt.monte_carlo) {
        auto m = run_trials_measured(cfg, opt.mode, ps, opt.trials,
                                     root.child(static_cast<std::uint64_t>(idx)),
                                     opt.threads, pr_override);
        point.report = m.report;
        point.interference_mean = m.interference_mean;
        point.interference_stderr = m.interference_stderr;
      } else {
        point.report.mode = opt.mode;
        point.report.ps = ps;
        point.report.pr = pr;
        point.report.closed_form = opt.mode == Clustering::fixed ? point.rate_fixed_closed
                                                                 : point.rate_gain_closed;
      }
    } catch (const std::exception& e) {
      point.failed = true;
      point.error = e.what();
    }
    out.points.push_back(std::move(point));
  }
  return out;
}

}  // namespace ssrelay
