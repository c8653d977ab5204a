#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ssrelay/channel.hpp"
#include "ssrelay/config.hpp"
#include "ssrelay/relay_control.hpp"

namespace ssrelay {

inline constexpr double kPi = 3.14159265358979323846;

/// Diagonal of the relay processing matrix: d_i = T_i c_i with
/// c_i = e^{j theta_i} c_mag.
inline Eigen::VectorXcd relay_weights(const RelayPlan& plan) {
  const auto n = static_cast<Eigen::Index>(plan.eligible.size());
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    d(i) = plan.eligible[k]
               ? std::polar(plan.c_mag, plan.theta[k])
               : std::complex<double>(0.0, 0.0);
  }
  return d;
}

/// Equivalent end-to-end channel: entry (m, q) sums T_i c_i f(m,i) h(i,q)
/// over all relays.
inline Eigen::MatrixXcd equivalent_channel(const ChannelRealization& real,
                                           const RelayPlan& plan) {
  const Eigen::VectorXcd d = relay_weights(plan);
  return real.F * d.asDiagonal() * real.H;
}

/// Autocorrelation of the equivalent noise at the destination:
/// W = I + (F D)(F D)^H with D = diag(T_i c_i). Hermitian, W - I PSD.
inline Eigen::MatrixXcd noise_covariance(const ChannelRealization& real,
                                         const RelayPlan& plan) {
  const Eigen::VectorXcd d = relay_weights(plan);
  const Eigen::MatrixXcd fd = real.F * d.asDiagonal();
  Eigen::MatrixXcd w = fd * fd.adjoint();
  w += Eigen::MatrixXcd::Identity(w.rows(), w.cols());
  return w;
}

/// log det(I + (ps/M) Ht Ht^H W^{-1}) in the requested unit, via Cholesky
/// factorizations of the M x M matrices (M is small; no eigen solves).
inline double mimo_log_det_rate(double ps, int M, const Eigen::MatrixXcd& h_tilde,
                                const Eigen::MatrixXcd& w, RateUnit unit) {
  if (!(ps >= 0)) throw std::domain_error("mimo_log_det_rate: ps must be >= 0");
  Eigen::LLT<Eigen::MatrixXcd> w_llt(w);
  if (w_llt.info() != Eigen::Success)
    throw NumericError("mimo_log_det_rate: noise covariance is not positive definite");
  // B = L^{-1} Ht, so det(I + (ps/M) Ht Ht^H W^{-1}) = det(I + (ps/M) B B^H).
  const Eigen::MatrixXcd b =
      w_llt.matrixL().solve(h_tilde);
  Eigen::MatrixXcd k = (ps / M) * (b * b.adjoint());
  k += Eigen::MatrixXcd::Identity(k.rows(), k.cols());
  Eigen::LLT<Eigen::MatrixXcd> k_llt(k);
  if (k_llt.info() != Eigen::Success)
    throw NumericError("mimo_log_det_rate: degenerate rate matrix");
  double log_det_nats = 0.0;
  const auto& lk = k_llt.matrixLLT();
  for (Eigen::Index i = 0; i < lk.rows(); ++i)
    log_det_nats += 2.0 * std::log(lk(i, i).real());
  return unit == RateUnit::bits ? log_det_nats / std::log(2.0) : log_det_nats;
}

/// Instantaneous secondary rate of one realization/plan: half the log-det
/// rate (the relays are half-duplex; the 1/2 prefactor is mandatory).
inline double instantaneous_rate(double ps, int M, const Eigen::MatrixXcd& h_tilde,
                                 const Eigen::MatrixXcd& w,
                                 RateUnit unit = RateUnit::bits) {
  return 0.5 * mimo_log_det_rate(ps, M, h_tilde, w, unit);
}

/// Mean of the largest of M i.i.d. Rayleigh magnitudes with E x^2 = sigma_s2,
/// by the alternating binomial expansion of the max CDF. Scales as
/// sqrt(sigma_s2); reduces to sqrt(pi)/2 * sigma_s for M = 1.
inline double max_rayleigh_mean(int M, double sigma_s2) {
  if (M < 1) throw std::domain_error("max_rayleigh_mean: M must be >= 1");
  if (!(sigma_s2 > 0)) throw std::domain_error("max_rayleigh_mean: sigma_s2 must be > 0");
  const double gamma_3_2 = std::sqrt(kPi) / 2.0;
  double binom = 1.0;  // C(M-1, m), updated incrementally
  double sum = 0.0;
  for (int m = 0; m <= M - 1; ++m) {
    const double sign = ((M - m - 1) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * M * gamma_3_2 / std::pow(static_cast<double>(M - m), 1.5);
    binom *= static_cast<double>(M - 1 - m) / static_cast<double>(m + 1);
  }
  return std::sqrt(sigma_s2) * sum;
}

/// Per-pipe channel coefficients and noise levels of the diagonalized
/// large-n channel: Ht/n -> diag(a), W/n -> diag(b).
struct AsymptoticCoefficients {
  std::vector<double> a;
  std::vector<double> b;
};

inline AsymptoticCoefficients asymptotic_coefficients(const NetworkConfig& cfg, double pr,
                                                      double ps, Clustering mode) {
  cfg.validate();
  if (!(pr >= 0)) throw std::domain_error("asymptotic_coefficients: Pr must be >= 0");
  const double p = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);
  const double x1 = cfg.sigma_s2 * ps + 1.0;
  const double sigma_s = std::sqrt(cfg.sigma_s2);
  const double sigma_d = std::sqrt(cfg.sigma_d2);
  double a = 0.0;
  if (mode == Clustering::fixed) {
    a = kPi * sigma_s * sigma_d / (4.0 * cfg.M) * std::sqrt(p * pr / x1);
  } else {
    const double mu_h = max_rayleigh_mean(cfg.M, cfg.sigma_s2);
    a = sigma_d * mu_h / (2.0 * cfg.M) * std::sqrt(p * kPi * pr / x1);
  }
  const double b = cfg.sigma_d2 * pr / x1 + 1.0 / cfg.n;
  AsymptoticCoefficients out;
  out.a.assign(static_cast<std::size_t>(cfg.M), a);
  out.b.assign(static_cast<std::size_t>(cfg.M), b);
  return out;
}

/// Capacity of the M parallel pipes with coefficients (a, b):
/// (1/2) sum log(1 + n ps a_m^2 / (M b_m)).
inline double parallel_pipe_rate(const NetworkConfig& cfg, const AsymptoticCoefficients& co,
                                 double ps) {
  double sum = 0.0;
  for (std::size_t m = 0; m < co.a.size(); ++m)
    sum += rate_log(cfg.rate_unit,
                    1.0 + cfg.n * ps * co.a[m] * co.a[m] / (cfg.M * co.b[m]));
  return 0.5 * sum;
}

/// Closed-form large-n secondary rate under fixed clustering.
inline double rate_fixed_clustering(const NetworkConfig& cfg, double pr, double ps) {
  cfg.validate();
  if (!(pr >= 0)) throw std::domain_error("rate_fixed_clustering: Pr must be >= 0");
  const double p = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);
  const double m3 = 16.0 * std::pow(static_cast<double>(cfg.M), 3);
  const double denom = cfg.sigma_d2 * pr + (cfg.sigma_s2 * ps + 1.0) / cfg.n;
  const double arg =
      cfg.n * p * kPi * kPi * cfg.sigma_s2 * cfg.sigma_d2 * pr * ps / (m3 * denom);
  return 0.5 * cfg.M * rate_log(cfg.rate_unit, 1.0 + arg);
}

/// Closed-form large-n secondary rate under gain clustering; equals the
/// fixed-clustering rate exactly at M = 1.
inline double rate_gain_clustering(const NetworkConfig& cfg, double pr, double ps) {
  cfg.validate();
  if (!(pr >= 0)) throw std::domain_error("rate_gain_clustering: Pr must be >= 0");
  const double p = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);
  const double mu_h = max_rayleigh_mean(cfg.M, cfg.sigma_s2);
  const double m3 = 4.0 * std::pow(static_cast<double>(cfg.M), 3);
  const double denom = cfg.sigma_d2 * pr + (cfg.sigma_s2 * ps + 1.0) / cfg.n;
  const double arg =
      cfg.n * p * kPi * mu_h * mu_h * cfg.sigma_d2 * pr * ps / (m3 * denom);
  return 0.5 * cfg.M * rate_log(cfg.rate_unit, 1.0 + arg);
}

/// n-independent terms of the log n growth law when the relay power rides
/// the budget (Pr = gamma_r / (n f(alpha))):
///   rate_fixed(n) -> (M/2) log n + c1,  rate_gain(n) -> (M/2) log n + c1 + c2.
///
/// c1 comes from substituting the budgeted power into the fixed-clustering
/// rate and keeping the n-free factor; c2 is the selection gain of gain
/// clustering over fixed clustering, (M/2) log(4 mu_h^2 / (pi sigma_s2)).
struct GrowthConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

inline GrowthConstants growth_constants(const NetworkConfig& cfg, double ps, double alpha) {
  cfg.validate();
  if (!(alpha > 0)) throw std::domain_error("growth_constants: alpha must be > 0");
  const double gamma_r = cfg.residual_relay_budget(ps);
  if (gamma_r <= 0)
    throw InfeasibleDesign("growth_constants: undefined, source saturates the budget");
  const double f = exponential_partial_mean(alpha, cfg.sigma_p2);
  const double p = eligibility_probability(alpha, cfg.sigma_p2, cfg.Np);
  const double m3 = 16.0 * std::pow(static_cast<double>(cfg.M), 3);
  const double x1 = cfg.sigma_s2 * ps + 1.0;
  GrowthConstants out;
  out.c1 = 0.5 * cfg.M *
           rate_log(cfg.rate_unit, p * kPi * kPi * cfg.sigma_s2 * cfg.sigma_d2 * gamma_r *
                                       ps / (m3 * (cfg.sigma_d2 * gamma_r + f * x1)));
  const double mu_h = max_rayleigh_mean(cfg.M, cfg.sigma_s2);
  out.c2 = 0.5 * cfg.M *
           rate_log(cfg.rate_unit, 4.0 * mu_h * mu_h / (kPi * cfg.sigma_s2));
  return out;
}

}  // namespace ssrelay
