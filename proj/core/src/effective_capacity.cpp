#include "fbqos/effective_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbqos/errors.hpp"
#include "fbqos/numerics.hpp"
#include "fbqos/units.hpp"

namespace fbqos {

void QosPair::validate() const {
  if (!(theta_delay > 0.0))
    throw std::invalid_argument("QosPair: theta_delay must be > 0");
  if (!(theta_err > 0.0))
    throw std::invalid_argument("QosPair: theta_err must be > 0");
}

double admissible_theta_err_min(std::int64_t n) {
  return kLn2 / static_cast<double>(n) * (1.0 + 1e-6);
}

namespace {

// Per-sample log integrand of the log-MGF. log_eps = -n theta_err may be
// -inf (eps = 0); log1m_eps = log(1 - eps).
double log_integrand(const ConditionalMoments& m, double log_eps, double log1m_eps,
                     double qinv_eps, double theta_delay, std::int64_t n) {
  const double rate = service_rate(m, qinv_eps, n);
  return log_add_exp(log_eps, log1m_eps + service_log_weight(theta_delay, n, rate));
}

}  // namespace

MonteCarloEstimate log_mgf(const MomentSet& moments, const QosPair& qos,
                           std::int64_t n) {
  qos.validate();
  if (n < 1) throw std::invalid_argument("log_mgf: n must be >= 1");
  if (moments.samples.empty())
    throw std::invalid_argument("log_mgf: empty moment set");
  const double a = static_cast<double>(n) * qos.theta_err;
  if (!(a > kLn2))
    throw std::invalid_argument("log_mgf: requires exp(-n*theta_err) < 1/2");
  double qinv_eps = 0.0;
  if (std::isinf(a)) {
    for (const auto& m : moments.samples)
      if (m.dispersion != 0.0)
        throw std::invalid_argument(
            "log_mgf: theta_err = inf admits only zero-dispersion channels");
  } else {
    qinv_eps = q_inverse_exp_neg(a);
  }
  const double log_eps = -a;
  const double log1m_eps = std::log1p(-std::exp(-a));
  std::vector<double> exponents(moments.samples.size());
  for (std::size_t j = 0; j < moments.samples.size(); ++j)
    exponents[j] = log_integrand(moments.samples[j], log_eps, log1m_eps, qinv_eps,
                                 qos.theta_delay, n);
  const LogMeanResult lse = log_mean_exp(exponents);
  return {lse.log_mean, moments.exact ? 0.0 : lse.std_error,
          static_cast<std::int64_t>(moments.samples.size()), moments.seed};
}

MonteCarloEstimate log_mgf(const ChannelConfig& config, const QosPair& qos,
                           std::int64_t n, const MonteCarloSpec& spec) {
  return log_mgf(sample_conditional_moments(config, spec), qos, n);
}

MonteCarloEstimate log_mgf(const StubChannel& stub, const QosPair& qos, std::int64_t n) {
  return log_mgf(stub_conditional_moments(stub), qos, n);
}

EcSurfacePoint epsilon_effective_capacity(const MomentSet& moments, const QosPair& qos,
                                          std::int64_t n) {
  const MonteCarloEstimate lambda = log_mgf(moments, qos, n);
  EcSurfacePoint p;
  p.qos = qos;
  p.blocklength = n;
  p.lambda = lambda.mean;
  p.lambda_std_error = lambda.std_error;
  p.ec = -lambda.mean / (static_cast<double>(n) * qos.theta_delay);
  return p;
}

EcSurfacePoint epsilon_effective_capacity(const ChannelConfig& config,
                                          const QosPair& qos, std::int64_t n,
                                          const MonteCarloSpec& spec) {
  return epsilon_effective_capacity(sample_conditional_moments(config, spec), qos, n);
}

EcSurfacePoint epsilon_effective_capacity(const StubChannel& stub, const QosPair& qos,
                                          std::int64_t n) {
  return epsilon_effective_capacity(stub_conditional_moments(stub), qos, n);
}

OptimalReliability optimal_reliability_exponent(const MomentSet& moments,
                                                double theta_delay, std::int64_t n,
                                                double theta_err_max) {
  if (!(theta_delay > 0.0))
    throw std::invalid_argument("optimal_reliability_exponent: theta_delay must be > 0");
  const double lo = admissible_theta_err_min(n);
  if (!(theta_err_max > lo))
    throw std::invalid_argument(
        "optimal_reliability_exponent: theta_err_max must exceed the admissible "
        "minimum " +
        std::to_string(lo));

  const auto ec_at = [&](double theta_err) {
    return epsilon_effective_capacity(moments, {theta_delay, theta_err}, n);
  };

  constexpr int kGridPoints = 201;
  const std::vector<double> grid = logspace(lo, theta_err_max, kGridPoints);
  std::vector<double> values(grid.size());
  double se_at_best = 0.0;
  int best_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const EcSurfacePoint p = ec_at(grid[i]);
    values[i] = p.ec;
    if (values[i] > values[static_cast<std::size_t>(best_idx)]) {
      best_idx = static_cast<int>(i);
      se_at_best = p.lambda_std_error / (static_cast<double>(n) * theta_delay);
    }
  }
  ScalarMax best{grid[static_cast<std::size_t>(best_idx)],
                 values[static_cast<std::size_t>(best_idx)]};
  const double blo = grid[static_cast<std::size_t>(std::max(0, best_idx - 1))];
  const double bhi =
      grid[static_cast<std::size_t>(std::min(kGridPoints - 1, best_idx + 1))];
  const ScalarMax refined = golden_section_max(
      [&](double t) { return ec_at(t).ec; }, blo, bhi, 1e-6 * (bhi - blo) + 1e-12);
  if (refined.value > best.value) best = refined;

  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  OptimalReliability out;
  out.theta_err = best.x;
  out.ec = best.value;
  out.flat_objective = (*mx - *mn) < 3.0 * se_at_best;
  return out;
}

OptimalReliability optimal_reliability_exponent(const ChannelConfig& config,
                                                double theta_delay, std::int64_t n,
                                                const MonteCarloSpec& spec,
                                                double theta_err_max) {
  return optimal_reliability_exponent(sample_conditional_moments(config, spec),
                                      theta_delay, n, theta_err_max);
}

}  // namespace fbqos
