#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssrelay/channel.hpp"
#include "ssrelay/config.hpp"
#include "ssrelay/rate.hpp"
#include "ssrelay/relay_control.hpp"

namespace ssrelay {

/// One frame of the alternating relay protocol.
struct ArpFrame {
  bool source_active = false;
  int tx_group = 0;  ///< 0: no group transmits to the destination
  bool g1_listens = false;
  bool g2_listens = false;
};

/// L-frame cycle: the source talks in frames 1..L-1 and rests in frame L;
/// the two relay groups strictly alternate between listening and relaying,
/// group 1 delivering during even frames. Duty factor (L-1)/L.
struct ArpSchedule {
  int frames = 0;
  std::vector<ArpFrame> roles;
  double duty_factor = 0.0;
};

inline ArpSchedule arp_schedule(int L, int n) {
  if (L < 2) throw std::invalid_argument("arp_schedule: need L >= 2");
  if (n % 2 != 0) throw std::invalid_argument("arp_schedule: relay count must be even");
  ArpSchedule s;
  s.frames = L;
  s.duty_factor = static_cast<double>(L - 1) / L;
  s.roles.resize(static_cast<std::size_t>(L));
  s.roles[0] = {true, 0, true, true};
  for (int k = 2; k <= L; ++k) {
    ArpFrame f;
    f.source_active = k <= L - 1;
    f.tx_group = (k % 2 == 0) ? 1 : 2;
    if (f.source_active) {
      f.g1_listens = f.tx_group == 2;
      f.g2_listens = f.tx_group == 1;
    }
    s.roles[static_cast<std::size_t>(k - 1)] = f;
  }
  return s;
}

/// Relay interference budget of the L-frame cycle:
/// gamma_L = (2L/(L-1)) gamma - 2 sigma_sp2 Ps. The relay power coefficient
/// eta (Pr = eta/n) must satisfy eta f(alpha) <= max(gamma_L, 0).
inline double arp_interference_budget(int L, double gamma, double ps, double sigma_sp2) {
  if (L < 2) throw std::domain_error("arp_interference_budget: need L >= 2");
  return (2.0 * L / (L - 1)) * gamma - 2.0 * sigma_sp2 * ps;
}

/// Largest feasible eta for the cycle budget.
inline double arp_power_coefficient(const NetworkConfig& cfg, int L, double ps) {
  const double gamma_l = arp_interference_budget(L, cfg.gamma, ps, cfg.sigma_sp2);
  const double f = exponential_partial_mean(cfg.alpha, cfg.sigma_p2);
  if (gamma_l <= 0 || f <= 0) return 0.0;
  return gamma_l / f;
}

/// Asymptotic per-pipe coefficients of one delivered segment:
/// Ht/sqrt(n) -> rho I and W -> lambda I.
struct ArpPipeCoefficients {
  double rho = 0.0;
  double lambda = 1.0;
};

/// Segment k of the L-frame cycle (k = 1 is the only interference-free
/// segment; every later listener also hears the other group's forwarding).
/// The q recursion tracks how forwarded noise compounds through the relay
/// chain; the normalization of c_i keeps each relay's transmit power at
/// eta/n, so the per-entry interference power is eta sigma_r2 / 2 for every
/// k >= 2 and the received-power normalizers are x1 and x2 below.
inline ArpPipeCoefficients arp_pipe_coefficients(const NetworkConfig& cfg, double eta,
                                                 double ps, int segment) {
  cfg.validate();
  if (!(eta >= 0)) throw std::domain_error("arp_pipe_coefficients: eta must be >= 0");
  if (segment < 1) throw std::domain_error("arp_pipe_coefficients: segment must be >= 1");
  const double p = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);
  const double x1 = cfg.sigma_s2 * ps + 1.0;
  const double x2 = x1 + eta * cfg.sigma_r2 / 2.0;
  double q = 1.0;
  for (int k = 2; k <= segment; ++k) {
    const double x_prev = (k - 1 == 1) ? x1 : x2;
    q = 1.0 + q * eta * cfg.sigma_r2 / (2.0 * x_prev);
  }
  const double x = (segment == 1) ? x1 : x2;
  ArpPipeCoefficients out;
  out.rho = kPi * std::sqrt(cfg.sigma_s2 * cfg.sigma_d2) / (8.0 * cfg.M) *
            std::sqrt(p * eta / x);
  out.lambda = 1.0 + q * eta * cfg.sigma_d2 / (2.0 * x);
  return out;
}

namespace detail {

inline double arp_segment_rate(const NetworkConfig& cfg, double eta, double ps, int segment) {
  if (eta <= 0) return 0.0;
  const auto co = arp_pipe_coefficients(cfg, eta, ps, segment);
  return cfg.M *
         rate_log(cfg.rate_unit, 1.0 + cfg.n * ps * co.rho * co.rho / (cfg.M * co.lambda));
}

}  // namespace detail

/// Closed-form rate delivered by group 1 during frame 2 (L = 3 cycle).
inline double arp_rate_group1(const NetworkConfig& cfg, double eta, double ps) {
  return detail::arp_segment_rate(cfg, eta, ps, 1);
}

/// Closed-form rate delivered by group 2 during frame 3 (L = 3 cycle); the
/// group listened under inter-relay interference, so both the received-power
/// normalizer and the forwarded noise carry the eta sigma_r2 / 2 term.
/// Equals the group-1 rate exactly when sigma_r2 = 0.
inline double arp_rate_group2(const NetworkConfig& cfg, double eta, double ps) {
  return detail::arp_segment_rate(cfg, eta, ps, 2);
}

/// Cycle-averaged closed-form rate of the L = 3 protocol, (R1 + R2) / 3.
inline double arp_overall_rate(const NetworkConfig& cfg, double eta, double ps) {
  return (arp_rate_group1(cfg, eta, ps) + arp_rate_group2(cfg, eta, ps)) / 3.0;
}

/// Cycle-averaged rate for a general L-frame cycle: segment 1 is clean, all
/// later segments see inter-relay interference. Reduces to the L = 3 form;
/// the growth slope approaches (L-1) M / L per factor of n.
inline double arp_overall_rate_general(const NetworkConfig& cfg, double eta, double ps,
                                       int L) {
  if (L < 2) throw std::domain_error("arp_overall_rate_general: need L >= 2");
  double sum = 0.0;
  for (int k = 1; k <= L - 1; ++k) sum += detail::arp_segment_rate(cfg, eta, ps, k);
  return sum / L;
}

/// Channel draws backing one L = 3 cycle, one independent realization per
/// frame. Only disjoint blocks of each draw are consumed:
///   frame 1: top half of H        (source -> group 1)
///   frame 2: left half of F, bottom half of H, Hr, left G columns
///   frame 3: right half of F, right G columns
struct ArpFrameChannels {
  ChannelRealization frame1;
  ChannelRealization frame2;
  ChannelRealization frame3;
};

inline ArpFrameChannels sample_arp_cycle(const NetworkConfig& cfg, SeedPath cycle_path) {
  ArpFrameChannels out;
  out.frame1 = sample_channels(cfg, cycle_path.child(1), false);
  out.frame2 = sample_channels(cfg, cycle_path.child(2), true);
  out.frame3 = sample_channels(cfg, cycle_path.child(3), false);
  return out;
}

/// Per-cycle Monte Carlo rates of the two delivered segments.
struct ArpCycleRates {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Simulates one L = 3 cycle: group 1 forwards segment 1 during frame 2;
/// group 2, which received segment 2 together with group 1's forwarding,
/// delivers it during frame 3. With `cancel_interference` the destination
/// removes the decoded segment-1 component from frame 3 (it knows Hr);
/// without it that component stays as additional noise.
inline ArpCycleRates arp_simulate_cycle(const NetworkConfig& cfg,
                                        const ArpFrameChannels& frames, double eta, double ps,
                                        bool cancel_interference = true) {
  cfg.validate();
  if (!(eta >= 0)) throw std::domain_error("arp_simulate_cycle: eta must be >= 0");
  if (cfg.n % 2 != 0)
    throw std::invalid_argument("arp_simulate_cycle: relay count must be even");
  const int half = cfg.n / 2;
  if (half % cfg.M != 0)
    throw std::invalid_argument("arp_simulate_cycle: need n/2 divisible by M");
  if (frames.frame2.Hr.rows() != half || frames.frame2.Hr.cols() != half)
    throw std::invalid_argument("arp_simulate_cycle: realization lacks ARP relay links");

  const double p = eligibility_probability(cfg.alpha, cfg.sigma_p2, cfg.Np);
  if (eta <= 0 || p <= 0) return {0.0, 0.0};

  const double x1 = cfg.sigma_s2 * ps + 1.0;
  const double x2 = x1 + eta * cfg.sigma_r2 / 2.0;
  const double c1_mag = std::sqrt(eta / (cfg.n * p * x1));
  const double c2_mag = std::sqrt(eta / (cfg.n * p * x2));

  const auto groups = assign_clusters_fixed(half, cfg.M);

  // Group 1: heard the source in frame 1, forwards in frame 2.
  const Eigen::MatrixXcd h1 = frames.frame1.H.topRows(half);
  const Eigen::MatrixXcd f1 = frames.frame2.F.leftCols(half);
  const auto t1 = select_eligible(frames.frame2.G.leftCols(half), cfg.alpha);
  const auto theta1 = rotation_phases(f1, h1, groups);
  Eigen::VectorXcd d1(half);
  for (int i = 0; i < half; ++i) {
    const auto k = static_cast<std::size_t>(i);
    d1(i) = t1[k] ? std::polar(c1_mag, theta1[k]) : std::complex<double>(0.0, 0.0);
  }

  const Eigen::MatrixXcd h_tilde1 = f1 * d1.asDiagonal() * h1;
  const Eigen::MatrixXcd f1d1 = f1 * d1.asDiagonal();
  Eigen::MatrixXcd w1 = f1d1 * f1d1.adjoint();
  w1 += Eigen::MatrixXcd::Identity(cfg.M, cfg.M);

  // Group 2: heard the source plus group 1's forwarding in frame 2,
  // delivers in frame 3.
  const Eigen::MatrixXcd h2 = frames.frame2.H.bottomRows(half);
  const Eigen::MatrixXcd f2 = frames.frame3.F.rightCols(half);
  const auto t2 = select_eligible(frames.frame3.G.rightCols(half), cfg.alpha);
  const auto theta2 = rotation_phases(f2, h2, groups);
  Eigen::VectorXcd d2(half);
  for (int i = 0; i < half; ++i) {
    const auto k = static_cast<std::size_t>(i);
    d2(i) = t2[k] ? std::polar(c2_mag, theta2[k]) : std::complex<double>(0.0, 0.0);
  }

  const Eigen::MatrixXcd h_tilde2 = f2 * d2.asDiagonal() * h2;
  const Eigen::MatrixXcd f2d2 = f2 * d2.asDiagonal();
  const Eigen::MatrixXcd via_relays = f2d2 * frames.frame2.Hr * d1.asDiagonal();
  Eigen::MatrixXcd w2 = via_relays * via_relays.adjoint() + f2d2 * f2d2.adjoint();
  w2 += Eigen::MatrixXcd::Identity(cfg.M, cfg.M);
  if (!cancel_interference) {
    const Eigen::MatrixXcd leak = via_relays * h1;
    w2 += (ps / cfg.M) * (leak * leak.adjoint());
  }

  ArpCycleRates out;
  out.r1 = mimo_log_det_rate(ps, cfg.M, h_tilde1, w1, cfg.rate_unit);
  out.r2 = mimo_log_det_rate(ps, cfg.M, h_tilde2, w2, cfg.rate_unit);
  return out;
}

/// Cycle-averaged interference at each primary node for one simulated L = 3
/// cycle: the source is on for two of three frames, each group's relays for
/// one, with per-relay power eta/n while active.
inline Eigen::VectorXd arp_measure_interference(const NetworkConfig& cfg,
                                                const ArpFrameChannels& frames, double eta,
                                                double ps) {
  const int half = cfg.n / 2;
  const double pr = eta / cfg.n;
  const auto t1 = select_eligible(frames.frame2.G.leftCols(half), cfg.alpha);
  const auto t2 = select_eligible(frames.frame3.G.rightCols(half), cfg.alpha);
  Eigen::VectorXd out(cfg.Np);
  for (int l = 0; l < cfg.Np; ++l) {
    double source = (ps / cfg.M) * (frames.frame1.Hp.col(l).squaredNorm() +
                                    frames.frame2.Hp.col(l).squaredNorm());
    double relays = 0.0;
    for (int i = 0; i < half; ++i) {
      if (t1[static_cast<std::size_t>(i)]) relays += pr * std::norm(frames.frame2.G(l, i));
      if (t2[static_cast<std::size_t>(i)])
        relays += pr * std::norm(frames.frame3.G(l, half + i));
    }
    out(l) = (source + relays) / 3.0;
  }
  return out;
}

}  // namespace ssrelay
