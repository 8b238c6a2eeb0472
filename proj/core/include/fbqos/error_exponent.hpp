#pragma once

#include <cstdint>
#include <span>

#include "fbqos/channel.hpp"
#include "fbqos/montecarlo.hpp"

namespace fbqos {

// Result of maximizing E0(rho) - rho * R over rho in [0, 1]. Exponents are
// in nats per channel use; the identity theta_err = e0_at_rho_star -
// rho_star * rate holds with the rate converted to nats.
struct ExponentResult {
  double theta_err = 0.0;
  double rho_star = 0.0;
  double e0_at_rho_star = 0.0;
  double theta_err_std_error = 0.0;
};

// Gallager exponent function at one rho:
// -(1/n) log E_H[ det(I + SNR/(N_T (1+rho)) H H^H)^(-n rho) ],
// evaluated in the log domain over the seeded stream.
double gallager_e0(const ChannelConfig& config, double rho, std::int64_t n,
                   const MonteCarloSpec& spec);

// sup_{rho in [0,1]} { E0(rho) - rho * rate } with common random numbers
// across all rho evaluations; a 101-point grid scan brackets the
// golden-section refinement, so the result never falls below the grid
// maximum. `rate` is in bits per channel use.
ExponentResult error_exponent(const ChannelConfig& config, double rate,
                              std::int64_t n, const MonteCarloSpec& spec);

// High-SNR reduction: -rho N_R log(1+rho) - (1/n) log E[(prod_i lambda_i
// SNR)^(-n rho)]. Zero-eigenvalue draws would make the integrand infinite
// for rho > 0; they are excluded and counted through the optional pointer.
double high_snr_e0(const ChannelConfig& config, double rho, std::int64_t n,
                   const MonteCarloSpec& spec, double min_average_snr = 100.0,
                   std::int64_t* zero_eigen_samples = nullptr);

// Core of the high-SNR form on precomputed per-sample log(prod lambda_i
// SNR) values; exposed so the N_R term can be exercised on a fixed stream.
double high_snr_e0_core(std::span<const double> log_products, int n_rx, double rho,
                        std::int64_t n);

// Theorem-style approximation
// [C - R]^2 / (2 { 2 N_R + n Var[log(prod lambda_i SNR)] }); C is the
// ergodic capacity estimate under the same stream, both converted to nats.
double approx_error_exponent(const ChannelConfig& config, double rate,
                             std::int64_t n, const MonteCarloSpec& spec);

// exp(-n * theta_err).
double error_prob_bound(double theta_err, std::int64_t n);

}  // namespace fbqos
