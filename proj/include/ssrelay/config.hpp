#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssrelay {

/// Rate unit used everywhere a rate is produced (default: bits/channel use).
enum class RateUnit { bits, nats };

/// How relays are assigned to antenna pipes.
enum class Clustering { fixed, gain };

/// A requested operating point cannot exist (e.g. the source power alone
/// exhausts the interference budget).
class InfeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric factorization degenerated (e.g. a noise covariance that is not
/// positive definite).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario parameters for the two-hop spectrum-sharing relay network.
///
/// All variances are linear power units: a link with variance v has complex
/// Gaussian gains with E|g|^2 = v. `gamma` is the per-primary average
/// interference cap, `ps_max` the source power cap, and `alpha` the
/// eligibility threshold applied to every cross-link gain of a relay.
struct NetworkConfig {
  int n = 100;             ///< relay count
  int M = 2;               ///< antennas per secondary terminal
  int Np = 1;              ///< primary node count
  double sigma_s2 = 1.0;   ///< source -> relay
  double sigma_d2 = 1.0;   ///< relay -> destination
  double sigma_p2 = 1.0;   ///< relay -> primary
  double sigma_sp2 = 1.0;  ///< source -> primary
  double sigma_r2 = 1.0;   ///< relay -> relay (alternating protocol only)
  double gamma = 5.0;
  double ps_max = 10.0;
  double alpha = 1.7;
  RateUnit rate_unit = RateUnit::bits;

  void validate() const {
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (M < 1) throw std::invalid_argument("config: M must be >= 1");
    if (Np < 1) throw std::invalid_argument("config: N_p must be >= 1");
    if (!(sigma_s2 > 0) || !(sigma_d2 > 0) || !(sigma_p2 > 0) ||
        !(sigma_sp2 > 0) || !(sigma_r2 > 0))
      throw std::invalid_argument("config: all variances must be > 0");
    if (!(gamma > 0)) throw std::invalid_argument("config: gamma must be > 0");
    if (!(ps_max > 0)) throw std::invalid_argument("config: Ps_max must be > 0");
    if (!(alpha >= 0)) throw std::invalid_argument("config: alpha must be >= 0");
  }

  /// Interference budget left for the relays once the source transmits at
  /// power `ps`; the design is infeasible when this is <= 0.
  double residual_relay_budget(double ps) const { return 2.0 * gamma - sigma_sp2 * ps; }
};

/// log in the configured rate unit.
inline double rate_log(RateUnit unit, double x) {
  return unit == RateUnit::bits ? std::log2(x) : std::log(x);
}

}  // namespace ssrelay
