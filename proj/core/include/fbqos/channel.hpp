#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fbqos {

// Physical link between the aggregated transmit array and one ground
// device. The average SNR derives from these fields; path loss enters the
// math through average_snr() exactly once.
struct ChannelConfig {
  int n_tx = 1;              // N_T, aggregated transmit antennas
  int n_rx = 1;              // N_R, receive antennas
  double power = 1.0;        // transmit power, linear watts
  double distance = 1.0;     // meters
  double path_exponent = 2.0;
  double noise_power = 0.1;  // linear watts
  double large_scale = 1.0;  // optional multiplier on the average SNR

  void validate() const;  // throws std::invalid_argument
};

// One quasi-static fading state. `matrix` holds the unit-variance
// small-scale coefficients; the large-scale factor is carried alongside
// and is already accounted for by average_snr(), never by the spectrum.
struct ChannelRealization {
  Eigen::MatrixXcd matrix;  // n_rx x n_tx
  double large_scale = 1.0;
};

// Nonzero spectrum of the Gram matrix of one realization, descending.
struct EigenSample {
  std::vector<double> eigenvalues;
};

// Average SNR: large_scale * power * distance^(-path_exponent) / noise.
double average_snr(const ChannelConfig& config);

// Deterministic for (seed, index); entries i.i.d. circularly symmetric
// complex Gaussian, zero mean, unit variance.
ChannelRealization sample_channel(const ChannelConfig& config, std::uint64_t seed,
                                  std::int64_t index);

// min(n_tx, n_rx) eigenvalues of the Gram matrix, descending, clamped at 0.
EigenSample gram_eigenvalues(const ChannelRealization& r);

// Per-eigenmode instantaneous SNRs: (average_snr / n_tx) * lambda_i.
std::vector<double> eigen_snrs(const ChannelConfig& config, const EigenSample& e);

}  // namespace fbqos
