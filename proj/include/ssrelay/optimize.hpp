#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ssrelay/config.hpp"
#include "ssrelay/rate.hpp"
#include "ssrelay/relay_control.hpp"

namespace ssrelay {

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
};

/// Bounded 1-D maximization: a coarse grid scan locates the best bracket,
/// golden-section refinement shrinks it to rel_tol of the original interval.
/// Derivative-free and robust to flat plateaus.
template <class F>
ScalarMax maximize_scalar(F&& f, double lo, double hi, double rel_tol = 1e-6,
                          int coarse_points = 512) {
  if (!(hi > lo)) throw std::invalid_argument("maximize_scalar: empty interval");
  if (coarse_points < 3) coarse_points = 3;

  const double step = (hi - lo) / (coarse_points - 1);
  int best = 0;
  double best_val = f(lo);
  for (int k = 1; k < coarse_points; ++k) {
    const double x = (k == coarse_points - 1) ? hi : lo + k * step;
    const double v = f(x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(coarse_points - 1, best + 1) * step;
  b = std::min(b, hi);

  const double inv_phi = 0.6180339887498948482;
  const double tol = rel_tol * (hi - lo);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

namespace detail {

/// The alpha-dependent factor of the budgeted closed-form rate; maximizing it
/// maximizes both clustering rates, independently of n.
inline double alpha_objective(const NetworkConfig& cfg, double ps, double gamma_r,
                              double alpha) {
  const double p = eligibility_probability(alpha, cfg.sigma_p2, cfg.Np);
  const double f = exponential_partial_mean(alpha, cfg.sigma_p2);
  return gamma_r * ps * p / (gamma_r * cfg.sigma_d2 + (cfg.sigma_s2 * ps + 1.0) * f);
}

/// The Ps-dependent factor of the budgeted closed-form rate.
inline double ps_objective(double gamma, double sigma_sp2, double sigma_s2, double sigma_d2,
                           double f_alpha, double ps) {
  const double gamma_r = 2.0 * gamma - sigma_sp2 * ps;
  return gamma_r * ps / (gamma_r * sigma_d2 + (sigma_s2 * ps + 1.0) * f_alpha);
}

}  // namespace detail

/// Eligibility threshold maximizing the budgeted closed-form rate at source
/// power ps. The objective does not depend on n. The search interval is
/// (0, 20 sigma_p2]; beyond that both the eligibility probability and the
/// interference factor are flat to machine precision.
inline double optimal_alpha(const NetworkConfig& cfg, double ps) {
  cfg.validate();
  const double gamma_r = cfg.residual_relay_budget(ps);
  if (gamma_r <= 0)
    throw InfeasibleDesign("optimal_alpha: source power saturates the interference cap");
  const double hi = 20.0 * cfg.sigma_p2;
  const auto res = maximize_scalar(
      [&](double a) { return detail::alpha_objective(cfg, ps, gamma_r, a); }, 0.0, hi);
  return res.x;
}

/// Rate-maximizing source power for a given value of f(alpha), on the
/// feasible interval (0, min(Ps_max, 2 gamma / sigma_sp2)).
///
/// The stationarity condition is the quadratic
///   a k Ps^2 + 2 a c Ps - 2 gamma c = 0,
/// with a = sigma_sp2, k = sigma_s2 f - sigma_sp2 sigma_d2 and
/// c = 2 gamma sigma_d2 + f. Its maximizing root, rationalized to avoid
/// cancellation, is
///   Po = 2 gamma c / (a c + sqrt(a c f (a + 2 gamma sigma_s2))),
/// which also covers k = 0 (where Po = gamma / sigma_sp2) without a branch.
/// The result is clamped to Ps_max and cross-checked at run time against the
/// numeric maximizer of the same objective; disagreement is a hard error.
inline double optimal_source_power_given_f(double gamma, double sigma_sp2, double sigma_s2,
                                           double sigma_d2, double ps_max, double f_alpha) {
  if (!(gamma > 0) || !(sigma_sp2 > 0) || !(sigma_s2 > 0) || !(sigma_d2 > 0))
    throw std::domain_error("optimal_source_power: parameters must be > 0");
  if (!(f_alpha > 0)) throw std::domain_error("optimal_source_power: f(alpha) must be > 0");
  const double upper = std::min(ps_max, 2.0 * gamma / sigma_sp2);
  if (!(upper > 0)) throw InfeasibleDesign("optimal_source_power: empty feasible interval");

  const double a = sigma_sp2;
  const double c = 2.0 * gamma * sigma_d2 + f_alpha;
  const double root = std::sqrt(a * c * f_alpha * (a + 2.0 * gamma * sigma_s2));
  const double po = 2.0 * gamma * c / (a * c + root);
  const double closed = std::min(po, ps_max);

  const auto numeric = maximize_scalar(
      [&](double ps) {
        return detail::ps_objective(gamma, sigma_sp2, sigma_s2, sigma_d2, f_alpha, ps);
      },
      0.0, upper);
  if (std::abs(closed - numeric.x) > 1e-3 * std::max(std::abs(closed), 1e-12))
    throw NumericError("optimal_source_power: closed form and numeric maximizer disagree");
  return closed;
}

/// Rate-maximizing source power at the config's threshold alpha.
inline double optimal_source_power(const NetworkConfig& cfg, double alpha) {
  cfg.validate();
  if (!(alpha > 0)) throw std::domain_error("optimal_source_power: alpha must be > 0");
  const double f = exponential_partial_mean(alpha, cfg.sigma_p2);
  return optimal_source_power_given_f(cfg.gamma, cfg.sigma_sp2, cfg.sigma_s2, cfg.sigma_d2,
                                      cfg.ps_max, f);
}

/// Monotonicity of the optimal source power along each channel-variance axis,
/// holding the others at unity. sign = -1: nonincreasing, +1: nondecreasing,
/// 0: mixed.
struct PsTrendReport {
  std::vector<double> grid;
  std::vector<double> ps_vs_sigma_sp2;
  std::vector<double> ps_vs_sigma_s2;
  std::vector<double> ps_vs_sigma_d2;
  int sign_sp2 = 0;
  int sign_s2 = 0;
  int sign_d2 = 0;
};

inline PsTrendReport qualitative_ps_trends(const NetworkConfig& cfg,
                                           std::optional<double> f_alpha = std::nullopt) {
  cfg.validate();
  const double f = f_alpha.value_or(exponential_partial_mean(cfg.alpha, cfg.sigma_p2));
  PsTrendReport report;
  for (double v = 0.5; v <= 3.0 + 1e-9; v += 0.25) report.grid.push_back(v);

  auto trend_sign = [](const std::vector<double>& ys) {
    bool up = false, down = false;
    for (std::size_t i = 1; i < ys.size(); ++i) {
      const double d = ys[i] - ys[i - 1];
      if (d > 1e-9) up = true;
      if (d < -1e-9) down = true;
    }
    if (up && down) return 0;
    return down ? -1 : +1;
  };

  for (double v : report.grid) {
    report.ps_vs_sigma_sp2.push_back(
        optimal_source_power_given_f(cfg.gamma, v, 1.0, 1.0, cfg.ps_max, f));
    report.ps_vs_sigma_s2.push_back(
        optimal_source_power_given_f(cfg.gamma, 1.0, v, 1.0, cfg.ps_max, f));
    report.ps_vs_sigma_d2.push_back(
        optimal_source_power_given_f(cfg.gamma, 1.0, 1.0, v, cfg.ps_max, f));
  }
  report.sign_sp2 = trend_sign(report.ps_vs_sigma_sp2);
  report.sign_s2 = trend_sign(report.ps_vs_sigma_s2);
  report.sign_d2 = trend_sign(report.ps_vs_sigma_d2);
  return report;
}

/// One point of the interference-decay schedule gamma_n = c0 n^{-delta}.
///
/// Powers keep fixed unit coefficients, Ps_n = n^{-delta} and
/// Pr_n = n^{-(1+delta)}, capped by the per-n interference budget (and by
/// Ps_max). Unit coefficients keep both powers well inside the budget, so the
/// rate-growth asymptote M(1-2 delta)/2 is visible already at moderate n;
/// budget-saturating coefficients would push that regime beyond reach of any
/// finite sweep.
struct DecaySchedulePoint {
  double gamma_n = 0.0;
  double pr_n = 0.0;
  double ps_n = 0.0;
  double predicted_slope = 0.0;  ///< rate gain per factor-of-base of n
  bool bounded_rate = false;     ///< delta >= 1/2: the rate no longer grows
};

inline constexpr double kDecayPsCoefficient = 1.0;
inline constexpr double kDecayPrCoefficient = 1.0;

inline DecaySchedulePoint interference_decay_schedule(const NetworkConfig& cfg, double delta,
                                                      double c0, int n) {
  cfg.validate();
  if (!(delta >= 0)) throw std::domain_error("interference_decay_schedule: delta must be >= 0");
  if (!(c0 > 0)) throw std::domain_error("interference_decay_schedule: c0 must be > 0");
  if (n < 1) throw std::domain_error("interference_decay_schedule: n must be >= 1");

  DecaySchedulePoint out;
  out.gamma_n = c0 * std::pow(static_cast<double>(n), -delta);
  out.ps_n = std::min(cfg.ps_max, kDecayPsCoefficient * std::pow(static_cast<double>(n), -delta));
  double gamma_r = 2.0 * out.gamma_n - cfg.sigma_sp2 * out.ps_n;
  if (gamma_r <= 0) {
    // keep half the cap for the relays when the unit source coefficient is
    // too large for this c0
    out.ps_n = out.gamma_n / cfg.sigma_sp2;
    gamma_r = out.gamma_n;
  }
  const double f = exponential_partial_mean(cfg.alpha, cfg.sigma_p2);
  const double budget_pr = f > 0 ? gamma_r / (n * f) : 0.0;
  const double scheduled_pr =
      kDecayPrCoefficient * std::pow(static_cast<double>(n), -(1.0 + delta));
  out.pr_n = f > 0 ? std::min(scheduled_pr, budget_pr) : 0.0;
  out.bounded_rate = delta >= 0.5;
  out.predicted_slope = out.bounded_rate ? 0.0 : 0.5 * cfg.M * (1.0 - 2.0 * delta);
  return out;
}

/// Jointly reported design point: threshold from the alpha optimizer, source
/// power from the Ps optimizer at that threshold, relay power from the budget.
struct DesignPoint {
  double alpha_opt = 0.0;
  double ps_opt = 0.0;
  double pr_opt = 0.0;
  double objective_value = 0.0;
};

inline DesignPoint design_point(const NetworkConfig& cfg, double ps_hint) {
  DesignPoint out;
  out.alpha_opt = optimal_alpha(cfg, ps_hint);
  out.ps_opt = optimal_source_power(cfg, out.alpha_opt);
  const auto budget = relay_power_budget(out.alpha_opt, out.ps_opt, cfg.gamma, cfg.sigma_sp2,
                                         cfg.n, cfg.sigma_p2);
  out.pr_opt = budget.pr;
  out.objective_value = detail::ps_objective(
      cfg.gamma, cfg.sigma_sp2, cfg.sigma_s2, cfg.sigma_d2,
      exponential_partial_mean(out.alpha_opt, cfg.sigma_p2), out.ps_opt);
  return out;
}

}  // namespace ssrelay
