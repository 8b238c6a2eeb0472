#include "fbqos/error_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbqos/errors.hpp"
#include "fbqos/fbc_rate.hpp"
#include "fbqos/numerics.hpp"
#include "fbqos/units.hpp"

namespace fbqos {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0) || !(rho <= 1.0))
    throw std::invalid_argument("rho must lie in [0, 1]");
}

struct E0Value {
  double value = 0.0;
  double std_error = 0.0;
};

// E0(rho) over a fixed eigenvalue stream. For rho = 0 every integrand is
// det(...)^0 = 1 and the value is exactly 0.
E0Value e0_on_stream(const EigenStream& stream, double scale, double rho,
                     std::int64_t n) {
  const double nrho = static_cast<double>(n) * rho;
  const double inv_one_plus_rho = 1.0 / (1.0 + rho);
  std::vector<double> exponents(static_cast<std::size_t>(stream.samples()));
  for (std::int64_t i = 0; i < stream.samples(); ++i) {
    double x = 0.0;
    for (double lam : stream.eigenvalues(i))
      x += std::log1p(scale * lam * inv_one_plus_rho);
    exponents[static_cast<std::size_t>(i)] = -nrho * x;
  }
  const LogMeanResult lse = log_mean_exp(exponents);
  return {-lse.log_mean / static_cast<double>(n),
          lse.std_error / static_cast<double>(n)};
}

}  // namespace

double gallager_e0(const ChannelConfig& config, double rho, std::int64_t n,
                   const MonteCarloSpec& spec) {
  check_rho(rho);
  if (n < 1) throw std::invalid_argument("gallager_e0: n must be >= 1");
  const EigenStream stream(config, spec);
  const double scale = average_snr(config) / static_cast<double>(config.n_tx);
  return e0_on_stream(stream, scale, rho, n).value;
}

ExponentResult error_exponent(const ChannelConfig& config, double rate,
                              std::int64_t n, const MonteCarloSpec& spec) {
  if (!(rate >= 0.0))
    throw std::invalid_argument("error_exponent: rate must be >= 0");
  if (n < 1) throw std::invalid_argument("error_exponent: n must be >= 1");
  const EigenStream stream(config, spec);
  const double scale = average_snr(config) / static_cast<double>(config.n_tx);
  const double rate_nats = bits_to_nats(rate);

  const auto objective = [&](double rho) {
    return e0_on_stream(stream, scale, rho, n).value - rho * rate_nats;
  };

  // Grid scan brackets the refinement; the supremum over the grid is a
  // lower bound on the returned value by construction.
  constexpr int kGridPoints = 101;
  ScalarMax best{0.0, 0.0};  // rho = 0 gives exactly 0
  int best_idx = 0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double rho = static_cast<double>(i) / (kGridPoints - 1);
    const double g = objective(rho);
    if (g > best.value) {
      best = {rho, g};
      best_idx = i;
    }
  }
  const double lo = static_cast<double>(std::max(0, best_idx - 1)) / (kGridPoints - 1);
  const double hi = static_cast<double>(std::min(kGridPoints - 1, best_idx + 1)) /
                    (kGridPoints - 1);
  const ScalarMax refined = golden_section_max(objective, lo, hi, 1e-4);
  if (refined.value > best.value) best = refined;

  ExponentResult out;
  out.rho_star = best.x;
  const E0Value e0 = e0_on_stream(stream, scale, best.x, n);
  out.e0_at_rho_star = e0.value;
  out.theta_err = e0.value - best.x * rate_nats;
  out.theta_err_std_error = e0.std_error;
  return out;
}

double high_snr_e0_core(std::span<const double> log_products, int n_rx, double rho,
                        std::int64_t n) {
  check_rho(rho);
  if (rho == 0.0) return 0.0;
  std::vector<double> exponents(log_products.size());
  const double nrho = static_cast<double>(n) * rho;
  for (std::size_t i = 0; i < log_products.size(); ++i)
    exponents[i] = -nrho * log_products[i];
  const LogMeanResult lse = log_mean_exp(exponents);
  return -rho * static_cast<double>(n_rx) * std::log1p(rho) -
         lse.log_mean / static_cast<double>(n);
}

double high_snr_e0(const ChannelConfig& config, double rho, std::int64_t n,
                   const MonteCarloSpec& spec, double min_average_snr,
                   std::int64_t* zero_eigen_samples) {
  check_rho(rho);
  if (n < 1) throw std::invalid_argument("high_snr_e0: n must be >= 1");
  const double snr = average_snr(config);
  if (snr < min_average_snr)
    throw std::invalid_argument("high_snr_e0: average SNR " + std::to_string(snr) +
                                " below the regime guard " +
                                std::to_string(min_average_snr));
  const EigenStream stream(config, spec);
  const double log_snr = std::log(snr);
  const int modes = stream.modes();
  std::vector<double> log_products;
  log_products.reserve(static_cast<std::size_t>(stream.samples()));
  std::int64_t zeros = 0;
  for (std::int64_t i = 0; i < stream.samples(); ++i) {
    double s = 0.0;
    bool zero = false;
    for (double lam : stream.eigenvalues(i)) {
      if (lam <= 0.0) {
        zero = true;
        break;
      }
      s += std::log(lam);
    }
    if (zero) {
      ++zeros;
      continue;
    }
    log_products.push_back(s + static_cast<double>(modes) * log_snr);
  }
  if (zero_eigen_samples) *zero_eigen_samples = zeros;
  if (rho == 0.0) return 0.0;
  if (log_products.empty())
    throw NumericRangeError("high_snr_e0: every sample had a zero eigenvalue");
  return high_snr_e0_core(log_products, config.n_rx, rho, n);
}

double approx_error_exponent(const ChannelConfig& config, double rate,
                             std::int64_t n, const MonteCarloSpec& spec) {
  if (n < 1) throw std::invalid_argument("approx_error_exponent: n must be >= 1");
  if (!(rate >= 0.0))
    throw std::invalid_argument("approx_error_exponent: rate must be >= 0");
  const double capacity = ergodic_capacity(config, spec).mean;
  if (rate > capacity)
    throw std::invalid_argument(
        "approx_error_exponent: rate " + std::to_string(rate) +
        " exceeds the ergodic capacity estimate " + std::to_string(capacity));
  const double var_log = variance_of_log_eigen_product(config, spec).mean;
  const double gap_nats = bits_to_nats(capacity - rate);
  const double denom =
      2.0 * (2.0 * static_cast<double>(config.n_rx) + static_cast<double>(n) * var_log);
  return gap_nats * gap_nats / denom;
}

double error_prob_bound(double theta_err, std::int64_t n) {
  if (!(theta_err >= 0.0))
    throw std::invalid_argument("error_prob_bound: theta_err must be >= 0");
  if (n < 1) throw std::invalid_argument("error_prob_bound: n must be >= 1");
  return std::exp(-static_cast<double>(n) * theta_err);
}

}  // namespace fbqos
