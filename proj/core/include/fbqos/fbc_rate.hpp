#pragma once

#include <cstdint>
#include <vector>

#include "fbqos/channel.hpp"
#include "fbqos/montecarlo.hpp"

namespace fbqos {

// Gaussian upper-tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).
double q_function(double x);

// log Q(x); asymptotic series above the erfc underflow range, so arguments
// far beyond x ~ 37 stay usable.
double log_q_function(double x);

// Q^{-1}(p) for p in (0, 1) (AS 241 quantile).
double q_inverse(double p);

// Q^{-1}(exp(-a)) for a > 0 without forming exp(-a); exponents beyond the
// double range are inverted through log Q directly.
double q_inverse_exp_neg(double a);

struct RatePoint {
  std::int64_t blocklength = 0;
  double error_prob = 0.0;
  double rate = 0.0;      // bits per channel use
  double residual = 0.0;  // achieved E[Q(.)] - eps at the returned rate
};

// Degenerate channel with fixed conditional moments. Used as an exact
// reference model in tests and reachable from the CLI config.
struct StubChannel {
  double capacity = 0.0;    // bits per channel use
  double dispersion = 0.0;  // bits^2
};

struct ConditionalMoments {
  double capacity = 0.0;    // bits per channel use
  double dispersion = 0.0;  // bits^2
};

// Per-realization conditional moments pinned to one stream; `exact` marks
// stub sets whose single sample carries no statistical uncertainty.
struct MomentSet {
  std::vector<ConditionalMoments> samples;
  bool exact = false;
  std::uint64_t seed = 0;
};

MomentSet sample_conditional_moments(const ChannelConfig& config,
                                     const MonteCarloSpec& spec);
MomentSet stub_conditional_moments(const StubChannel& stub);

// sum_i log2(1 + eigen_snr_i); equals log2 det(I + (SNR/N_T) H H^H).
double conditional_capacity(const ChannelConfig& config, const EigenSample& e);

// sum_i (1 - (1 + eigen_snr_i)^-2) * (log2 e)^2, the parallel-Gaussian
// sub-channel dispersion of the conditional channel.
double conditional_dispersion(const ChannelConfig& config, const EigenSample& e);

MonteCarloEstimate ergodic_capacity(const ChannelConfig& config,
                                    const MonteCarloSpec& spec);

// E[log2 chi^2_{2i}] of a standard chi-square, via digamma(i) + ln 2.
double log2_chi_square_mean(int i);

// High-SNR capacity expansion: min(N_T,N_R) log2(SNR/N_T) plus the
// log-determinant law of the unit-variance Gram matrix. The chi-square
// terms are normalized by 2 (complex entries with E|g|^2 = 1), which is
// what makes the expansion meet the ergodic capacity as SNR grows.
double high_snr_capacity(const ChannelConfig& config);

// Exact quantile form R = C - sqrt(V/n) * Q^{-1}(e^{-n vartheta}); the
// admissible domain is e^{-n vartheta} < 1/2. The raw value may be
// negative in deep fades; service processes clamp via service_rate().
double rate_from_reliability(double capacity, double dispersion, double theta_err,
                             std::int64_t n);

// Same quantile form with Q^{-1}(eps) precomputed, clamped at zero.
double service_rate(const ConditionalMoments& m, double qinv_eps, std::int64_t n);

// Solves E[Q((C - R) / sqrt(V/n))] = eps for R by monotone bisection over
// [0, mean_C + 10 std_C] on a fixed realization stream.
RatePoint solve_normal_approx_rate(const ChannelConfig& config, std::int64_t n,
                                   double eps, const MonteCarloSpec& spec);
RatePoint solve_normal_approx_rate(const StubChannel& stub, std::int64_t n, double eps);
RatePoint solve_normal_approx_rate(const MomentSet& moments, std::int64_t n, double eps);

// Residual E[Q((C - R)/sqrt(V/n))] - eps and its standard error on a fixed
// moment set (the solver's objective; exposed for grid-scan oracles).
MonteCarloEstimate normal_approx_residual(const MomentSet& moments, std::int64_t n,
                                          double eps, double rate);

}  // namespace fbqos
