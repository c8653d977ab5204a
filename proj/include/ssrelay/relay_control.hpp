#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ssrelay/channel.hpp"
#include "ssrelay/config.hpp"

namespace ssrelay {

/// E[X 1{X <= alpha}] for X ~ Exp(mean sigma_p2): the contribution of one
/// cross-link gain to the expected interference of an eligible relay.
/// Monotone nondecreasing in alpha, from 0 at alpha=0 towards sigma_p2.
inline double exponential_partial_mean(double alpha, double sigma_p2) {
  if (!(alpha >= 0)) throw std::domain_error("exponential_partial_mean: alpha must be >= 0");
  if (!(sigma_p2 > 0)) throw std::domain_error("exponential_partial_mean: sigma_p2 must be > 0");
  if (std::isinf(alpha)) return sigma_p2;
  return sigma_p2 - std::exp(-alpha / sigma_p2) * (alpha + sigma_p2);
}

/// Probability that one relay passes the threshold test on all Np of its
/// cross links: (1 - e^{-alpha/sigma_p2})^Np.
inline double eligibility_probability(double alpha, double sigma_p2, int n_primaries) {
  if (!(alpha >= 0)) throw std::domain_error("eligibility_probability: alpha must be >= 0");
  if (!(sigma_p2 > 0)) throw std::domain_error("eligibility_probability: sigma_p2 must be > 0");
  if (n_primaries < 1) throw std::domain_error("eligibility_probability: N_p must be >= 1");
  return std::pow(-std::expm1(-alpha / sigma_p2), n_primaries);
}

/// Relay i is eligible iff |g(l,i)|^2 <= alpha for every primary l. Each
/// relay's decision reads only its own column of G.
inline std::vector<std::uint8_t> select_eligible(const Eigen::MatrixXcd& G, double alpha) {
  std::vector<std::uint8_t> eligible(static_cast<std::size_t>(G.cols()), 1);
  for (Eigen::Index i = 0; i < G.cols(); ++i)
    for (Eigen::Index l = 0; l < G.rows(); ++l)
      if (std::norm(G(l, i)) > alpha) {
        eligible[static_cast<std::size_t>(i)] = 0;
        break;
      }
  return eligible;
}

/// Outcome of the average-interference power budget.
///
/// Degenerate corners are flags, not failures, so parameter sweeps can walk
/// into them: `source_saturated` means the source alone consumes the cap
/// (residual budget <= 0); `vacuous_constraint` means alpha admits no relay
/// (the budget constraint holds trivially but no relay ever transmits).
struct RelayPowerBudget {
  double pr = 0.0;
  bool source_saturated = false;
  bool vacuous_constraint = false;
};

/// Largest per-relay average power such that the expected interference at
/// every primary stays within gamma once the source transmits at `ps`.
inline RelayPowerBudget relay_power_budget(double alpha, double ps, double gamma,
                                           double sigma_sp2, int n, double sigma_p2) {
  if (n < 1) throw std::domain_error("relay_power_budget: n must be >= 1");
  const double gamma_r = 2.0 * gamma - sigma_sp2 * ps;
  if (gamma_r <= 0.0) return {0.0, true, false};
  const double f = exponential_partial_mean(alpha, sigma_p2);
  if (f <= 0.0) return {0.0, false, true};
  return {gamma_r / (n * f), false, false};
}

/// Budget under cross-link CSI uncertainty: the true gain may exceed the
/// estimate by a factor up to (1+epsilon), so the threshold is effectively
/// widened to alpha + epsilon when converting power to interference.
inline RelayPowerBudget robust_relay_power(double alpha, double epsilon, double ps,
                                           double gamma, double sigma_sp2, int n,
                                           double sigma_p2) {
  if (!(epsilon >= 0)) throw std::domain_error("robust_relay_power: epsilon must be >= 0");
  return relay_power_budget(alpha + epsilon, ps, gamma, sigma_sp2, n, sigma_p2);
}

/// Per-relay power coefficient xi (so Pr = xi/n) under a peak interference
/// budget gamma_r for the relays: the instantaneous relay interference
/// concentrates at xi * E[T |g|^2], which is pinned to gamma_r.
/// E[T |g|^2] factorizes exactly over the independent cross links.
inline double peak_power_scale(double alpha, double sigma_p2, int n_primaries,
                               double gamma_r) {
  if (!(alpha > 0)) throw std::domain_error("peak_power_scale: alpha must be > 0");
  if (!(gamma_r > 0)) throw InfeasibleDesign("peak_power_scale: relay budget must be > 0");
  const double f = exponential_partial_mean(alpha, sigma_p2);
  const double others = std::pow(-std::expm1(-alpha / sigma_p2), n_primaries - 1);
  const double mean_selected_gain = f * others;
  if (mean_selected_gain <= 0.0)
    throw InfeasibleDesign("peak_power_scale: undefined budget, no relay ever transmits");
  return gamma_r / mean_selected_gain;
}

/// Pre-defined contiguous blocks; when M does not divide n the first
/// (n mod M) groups take one extra relay. Group ids are 1-based.
inline std::vector<int> assign_clusters_fixed(int n, int M) {
  if (M < 1) throw std::invalid_argument("assign_clusters_fixed: M must be >= 1");
  if (n < M) throw std::invalid_argument("assign_clusters_fixed: need n >= M");
  std::vector<int> group(static_cast<std::size_t>(n));
  const int base = n / M;
  const int extra = n % M;
  int idx = 0;
  for (int m = 1; m <= M; ++m) {
    const int size = base + (m <= extra ? 1 : 0);
    for (int k = 0; k < size; ++k) group[static_cast<std::size_t>(idx++)] = m;
  }
  return group;
}

/// Each relay joins the source antenna it hears best; ties go to the
/// smallest antenna index (probability zero under continuous fading).
inline std::vector<int> assign_clusters_gain(const Eigen::MatrixXcd& H) {
  std::vector<int> group(static_cast<std::size_t>(H.rows()));
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    int best = 0;
    double best_gain = std::norm(H(i, 0));
    for (Eigen::Index m = 1; m < H.cols(); ++m) {
      const double gain = std::norm(H(i, m));
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<int>(m);
      }
    }
    group[static_cast<std::size_t>(i)] = best + 1;
  }
  return group;
}

/// Rotation angles aligning each relay's composite pipe: with m the relay's
/// group, e^{j theta_i} f(m,i) h(i,m) = |f(m,i)| |h(i,m)|. A zero-magnitude
/// product gets theta = 0 (the phase is irrelevant there). Angles are
/// normalized to [0, 2*pi).
inline std::vector<double> rotation_phases(const Eigen::MatrixXcd& F,
                                           const Eigen::MatrixXcd& H,
                                           const std::vector<int>& group_of) {
  const Eigen::Index n = H.rows();
  if (F.cols() != n || group_of.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("rotation_phases: dimension mismatch");
  constexpr double two_pi = 6.283185307179586476925286766559;
  std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int m = group_of[static_cast<std::size_t>(i)] - 1;
    if (m < 0 || m >= F.rows()) throw std::invalid_argument("rotation_phases: bad group id");
    const std::complex<double> prod = F(m, i) * H(i, m);
    if (prod == std::complex<double>(0.0, 0.0)) continue;
    double t = -std::arg(prod);
    if (t < 0) t += two_pi;
    if (t >= two_pi) t -= two_pi;
    theta[static_cast<std::size_t>(i)] = t;
  }
  return theta;
}

/// Everything a relay realization needs to forward: eligibility indicators,
/// cluster assignment, rotation phases and the common scaling magnitude.
struct RelayPlan {
  std::vector<std::uint8_t> eligible;
  std::vector<int> group_of;
  std::vector<double> theta;
  double c_mag = 0.0;      ///< common amplitude of the relay gain c_i
  double pr = 0.0;         ///< average per-relay transmit power
  double ps = 0.0;         ///< source transmit power
  double p_eligible = 0.0; ///< eligibility probability used in the scaling
  bool source_saturated = false;
  bool zero_rate = false;  ///< no relay power available; the rate is zero
};

/// Composes selection, clustering, rotation design and the power budget for
/// one realization. `pr_override`, when given, replaces the budgeted relay
/// power (used by decay schedules and peak-mode studies).
inline RelayPlan build_relay_plan(const NetworkConfig& cfg, const ChannelRealization& real,
                                  Clustering mode, double ps,
                                  double pr_override = std::numeric_limits<double>::quiet_NaN()) {
  cfg.validate();
  if (!(ps > 0) || ps > cfg.ps_max)
    throw std::invalid_argument("build_relay_plan: need 0 < Ps <= Ps_max");
  if (real.H.rows() != cfg.n || real.H.cols() != cfg.M)
    throw std::invalid_argument("build_relay_plan: realization does not match config");

  RelayPlan plan;
  plan.ps = ps;
  plan.eligible = select_eligible(real.G, cfg.alpha);
  plan.group_of = mode == Clustering::fixed ? assign_clusters_fixed(cfg.n, cfg.M)
                                            : assign_clusters_gain(real.H);
  plan.theta = rotation_phases(real.F, real.H, plan.group_of);
  plan.p_eligible = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);

  const auto budget = relay_power_budget(cfg.alpha, ps, cfg.gamma, cfg.sigma_sp2, cfg.n,
                                         cfg.sigma_p2);
  plan.source_saturated = budget.source_saturated;
  plan.pr = std::isnan(pr_override) ? budget.pr : pr_override;
  plan.zero_rate = plan.pr <= 0.0 || plan.p_eligible <= 0.0;
  plan.c_mag = plan.zero_rate
                   ? 0.0
                   : std::sqrt(plan.pr / (plan.p_eligible * (ps * cfg.sigma_s2 + 1.0)));
  return plan;
}

}  // namespace ssrelay
