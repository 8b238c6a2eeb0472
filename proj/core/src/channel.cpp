#include "fbqos/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbqos/rng.hpp"

namespace fbqos {

void ChannelConfig::validate() const {
  if (n_tx < 1 || n_rx < 1)
    throw std::invalid_argument("ChannelConfig: antenna counts must be >= 1");
  if (!(power >= 0.0) || !std::isfinite(power))
    throw std::invalid_argument("ChannelConfig: power must be a finite nonnegative value");
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw std::invalid_argument("ChannelConfig: distance must be positive");
  if (!(path_exponent >= 0.0) || !std::isfinite(path_exponent))
    throw std::invalid_argument("ChannelConfig: path_exponent must be nonnegative");
  if (!(noise_power > 0.0) || !std::isfinite(noise_power))
    throw std::invalid_argument("ChannelConfig: noise_power must be positive");
  if (!(large_scale > 0.0) || !std::isfinite(large_scale))
    throw std::invalid_argument("ChannelConfig: large_scale must be positive");
}

double average_snr(const ChannelConfig& config) {
  config.validate();
  return config.large_scale * config.power *
         std::pow(config.distance, -config.path_exponent) / config.noise_power;
}

ChannelRealization sample_channel(const ChannelConfig& config, std::uint64_t seed,
                                  std::int64_t index) {
  config.validate();
  SubStream stream(seed, static_cast<std::uint64_t>(index));
  ChannelRealization r;
  r.matrix.resize(config.n_rx, config.n_tx);
  r.large_scale = config.large_scale;
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  // Column-major fill order is part of the determinism contract.
  for (int c = 0; c < config.n_tx; ++c) {
    for (int rr = 0; rr < config.n_rx; ++rr) {
      const double re = stream.next_gaussian() * kInvSqrt2;
      const double im = stream.next_gaussian() * kInvSqrt2;
      r.matrix(rr, c) = std::complex<double>(re, im);
    }
  }
  return r;
}

EigenSample gram_eigenvalues(const ChannelRealization& r) {
  if (!r.matrix.allFinite())
    throw std::invalid_argument("gram_eigenvalues: realization matrix has non-finite entries");
  const auto rows = r.matrix.rows();
  const auto cols = r.matrix.cols();
  // The smaller Gram matrix carries the nonzero spectrum; working on the
  // Hermitian form keeps near-degenerate spectra stable.
  Eigen::MatrixXcd gram;
  if (rows <= cols)
    gram = r.matrix * r.matrix.adjoint();
  else
    gram = r.matrix.adjoint() * r.matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::invalid_argument("gram_eigenvalues: eigen decomposition failed on invalid matrix");
  const auto& vals = solver.eigenvalues();  // ascending
  EigenSample out;
  out.eigenvalues.resize(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    out.eigenvalues[static_cast<std::size_t>(vals.size() - 1 - i)] =
        std::max(0.0, vals(i));
  return out;
}

std::vector<double> eigen_snrs(const ChannelConfig& config, const EigenSample& e) {
  const double scale = average_snr(config) / static_cast<double>(config.n_tx);
  std::vector<double> out(e.eigenvalues.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * e.eigenvalues[i];
  return out;
}

}  // namespace fbqos
