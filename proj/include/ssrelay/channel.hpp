#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "ssrelay/config.hpp"
#include "ssrelay/rng.hpp"

namespace ssrelay {

/// Per-matrix stream ids inside one realization's seed path.
enum class LinkStream : std::uint64_t {
  source_relay = 1,
  relay_dest = 2,
  relay_primary = 3,
  source_primary = 4,
  relay_relay = 5,
};

/// One block-fading draw of every channel matrix in the scenario.
///
/// Conventions (relay-major source side):
///   H(i, m)  gain from source antenna m to relay i            [n x M]
///   F(m, i)  gain from relay i to destination antenna m       [M x n]
///   G(l, i)  gain from relay i to primary node l              [Np x n]
///   Hp(:, l) gains from the source array to primary node l    [M x Np]
///   Hr(j, i) gain from relay i (group 1) to relay j (group 2) [n/2 x n/2]
///
/// Hr is empty unless ARP links were requested.
struct ChannelRealization {
  Eigen::MatrixXcd H;
  Eigen::MatrixXcd F;
  Eigen::MatrixXcd G;
  Eigen::MatrixXcd Hp;
  Eigen::MatrixXcd Hr;
  std::uint64_t seed_key = 0;
};

namespace detail {

inline void fill_cgauss(Eigen::MatrixXcd& a, Eigen::Index rows, Eigen::Index cols,
                        double variance, Rng rng) {
  a.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = rng.cgauss(variance);
}

}  // namespace detail

/// Draws all channel matrices for one block-fading realization. Pure in
/// (config, path): the same arguments reproduce the matrices bit-exactly,
/// and distinct paths give independent streams.
inline ChannelRealization sample_channels(const NetworkConfig& cfg, SeedPath path,
                                          bool with_arp_links = false) {
  cfg.validate();
  if (with_arp_links && cfg.n % 2 != 0)
    throw std::invalid_argument("sample_channels: ARP links require an even relay count");

  ChannelRealization out;
  out.seed_key = path.key();
  auto stream = [&](LinkStream s) { return Rng(path.child(static_cast<std::uint64_t>(s))); };
  detail::fill_cgauss(out.H, cfg.n, cfg.M, cfg.sigma_s2, stream(LinkStream::source_relay));
  detail::fill_cgauss(out.F, cfg.M, cfg.n, cfg.sigma_d2, stream(LinkStream::relay_dest));
  detail::fill_cgauss(out.G, cfg.Np, cfg.n, cfg.sigma_p2, stream(LinkStream::relay_primary));
  detail::fill_cgauss(out.Hp, cfg.M, cfg.Np, cfg.sigma_sp2, stream(LinkStream::source_primary));
  if (with_arp_links)
    detail::fill_cgauss(out.Hr, cfg.n / 2, cfg.n / 2, cfg.sigma_r2,
                        stream(LinkStream::relay_relay));
  return out;
}

}  // namespace ssrelay
