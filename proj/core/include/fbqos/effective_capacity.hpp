#pragma once

#include <cstdint>

#include "fbqos/fbc_rate.hpp"

namespace fbqos {

// Joint QoS operating point: delay exponent per bit, error-rate exponent
// in nats per channel use. theta_err = +inf is the epsilon = 0 surrogate
// and is admissible only for zero-dispersion (stub) channels.
struct QosPair {
  double theta_delay = 0.0;
  double theta_err = 0.0;

  void validate() const;  // positivity
};

struct EcSurfacePoint {
  QosPair qos;
  std::int64_t blocklength = 0;
  double ec = 0.0;      // bits per channel use
  double lambda = 0.0;  // log-MGF value, natural log
  double lambda_std_error = 0.0;
};

// Minimal admissible error-rate exponent: exp(-n theta_err) < 1/2 needs
// n theta_err > ln 2; the bound carries a relative guard of 1e-6.
double admissible_theta_err_min(std::int64_t n);

// Log-moment generating function of the service process,
// log E[ eps + (1 - eps) exp(-n theta R*(gamma)) ] with eps = e^{-n
// theta_err} and R* the per-realization quantile rate clamped at zero.
// Computed in the log domain end to end.
MonteCarloEstimate log_mgf(const ChannelConfig& config, const QosPair& qos,
                           std::int64_t n, const MonteCarloSpec& spec);
MonteCarloEstimate log_mgf(const StubChannel& stub, const QosPair& qos, std::int64_t n);
MonteCarloEstimate log_mgf(const MomentSet& moments, const QosPair& qos, std::int64_t n);

// EC = -Lambda / (n theta_delay), bits per channel use.
EcSurfacePoint epsilon_effective_capacity(const ChannelConfig& config,
                                          const QosPair& qos, std::int64_t n,
                                          const MonteCarloSpec& spec);
EcSurfacePoint epsilon_effective_capacity(const StubChannel& stub, const QosPair& qos,
                                          std::int64_t n);
EcSurfacePoint epsilon_effective_capacity(const MomentSet& moments, const QosPair& qos,
                                          std::int64_t n);

struct OptimalReliability {
  double theta_err = 0.0;
  double ec = 0.0;
  bool flat_objective = false;  // grid spread below 3 stderr
};

// Maximizes EC over theta_err in [admissible min, theta_err_max] at fixed
// theta_delay: a 201-point log grid locates the mode, golden section
// refines it, and the better of the two is returned.
OptimalReliability optimal_reliability_exponent(const ChannelConfig& config,
                                                double theta_delay, std::int64_t n,
                                                const MonteCarloSpec& spec,
                                                double theta_err_max = 1.0);
OptimalReliability optimal_reliability_exponent(const MomentSet& moments,
                                                double theta_delay, std::int64_t n,
                                                double theta_err_max = 1.0);

}  // namespace fbqos
