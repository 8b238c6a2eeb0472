#include "fbqos/fbc_rate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbqos/errors.hpp"
#include "fbqos/numerics.hpp"
#include "fbqos/units.hpp"

namespace fbqos {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)

double log_phi(double x) { return -0.5 * x * x - kHalfLog2Pi; }

// Asymptotic tail: Q(x) = phi(x)/x * sum_k (-1)^k (2k-1)!! / x^(2k).
// Terms shrink while 2k+1 < x^2, which reaches machine precision for
// x >= 10 well before the cap.
double log_q_asymptotic(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    const double next = term * static_cast<double>(2 * k - 1) * inv_x2;
    if (next >= std::abs(term) && k > 1) break;  // series turned divergent
    term = next;
    const double signed_term = (k % 2 == 0) ? term : -term;
    sum += signed_term;
    if (term < 1e-18 * sum) break;
  }
  return log_phi(x) - std::log(x) + std::log(sum);
}

// AS 241 (Wichura) inverse normal CDF, lower-tail convention.
double ppnd16_central(double q) {
  static const double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                              1.9715909503065514427e3,  1.3731693765509461125e4,
                              4.5921953931549871457e4,  6.7265770927008700853e4,
                              3.3430575583588128105e4,  2.5090809287301226727e3};
  static const double b[8] = {1.0,
                              4.2313330701600911252e1,
                              6.8718700749205790830e2,
                              5.3941960214247511077e3,
                              2.1213794301586595867e4,
                              3.9307895800092710610e4,
                              2.8729085735721942674e4,
                              5.2264952788528545610e3};
  const double r = 0.180625 - q * q;
  double num = a[7], den = b[7];
  for (int i = 6; i >= 0; --i) {
    num = num * r + a[i];
    den = den * r + b[i];
  }
  return q * num / den;
}

// Tail branch given r = sqrt(-ln(p)) for p < 0.5; returns the negative
// quantile Phi^{-1}(p).
double ppnd16_tail(double r) {
  double num, den;
  if (r <= 5.0) {
    static const double c[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                5.76949722146069140550e0,  3.64784832476320460504e0,
                                1.27045825245236838258e0,  2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {1.0,
                                2.05319162663775882187e0,
                                1.67638483018380384940e0,
                                6.89767334985100004550e-1,
                                1.48103976427480074590e-1,
                                1.51986665636164571966e-2,
                                5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    const double s = r - 1.6;
    num = c[7], den = d[7];
    for (int i = 6; i >= 0; --i) {
      num = num * s + c[i];
      den = den * s + d[i];
    }
  } else {
    static const double e[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                1.78482653991729133580e0,  2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {1.0,
                                5.99832206555887937690e-1,
                                1.36929880922735805310e-1,
                                1.48753612908506148525e-2,
                                7.86869131145613259100e-4,
                                1.84631831751005468180e-5,
                                1.42151175831644588870e-7,
                                2.04426310338993978564e-15};
    const double s = r - 5.0;
    num = e[7], den = f[7];
    for (int i = 6; i >= 0; --i) {
      num = num * s + e[i];
      den = den * s + f[i];
    }
  }
  return -num / den;
}

}  // namespace

double q_function(double x) {
  if (std::isnan(x)) throw std::invalid_argument("q_function: NaN argument");
  return 0.5 * std::erfc(x / kSqrt2);
}

double log_q_function(double x) {
  if (std::isnan(x)) throw std::invalid_argument("log_q_function: NaN argument");
  if (x < 10.0) return std::log(q_function(x));
  return log_q_asymptotic(x);
}

double q_inverse(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("q_inverse: p must lie in (0, 1)");
  // Work on the upper tail, where Q is well conditioned; mirror for p > 1/2.
  if (p > 0.5) return -q_inverse(1.0 - p);
  const double q = p - 0.5;
  double x = std::abs(q) <= 0.425 ? -ppnd16_central(q)
                                  : -ppnd16_tail(std::sqrt(-std::log(p)));
  // Two Newton corrections against Q itself; skipped where phi underflows.
  for (int i = 0; i < 2; ++i) {
    const double lphi = log_phi(x);
    if (lphi < -700.0) break;
    x += (q_function(x) - p) / std::exp(lphi);
  }
  return x;
}

double q_inverse_exp_neg(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("q_inverse_exp_neg: a must be > 0");
  if (std::isinf(a))
    throw std::invalid_argument("q_inverse_exp_neg: a must be finite");
  // Below ~690 the probability is still representable; beyond, start from
  // -x^2/2 - ln(x sqrt(2 pi)) = -a and refine through log Q.
  double x = a < 690.0
                 ? q_inverse(std::exp(-a))
                 : std::sqrt(std::max(1.0, 2.0 * a - std::log(4.0 * 3.141592653589793 * a)));
  // Newton in the log domain: g(x) = log Q(x) + a, g' = -phi/Q.
  for (int i = 0; i < 3; ++i) {
    const double lq = log_q_function(x);
    const double g = lq + a;
    const double q_over_phi = std::exp(lq - log_phi(x));
    x += g * q_over_phi;
  }
  return x;
}

double conditional_capacity(const ChannelConfig& config, const EigenSample& e) {
  const std::vector<double> snrs = eigen_snrs(config, e);
  double c = 0.0;
  for (double g : snrs) c += std::log1p(g);
  return c * kLog2E;
}

double conditional_dispersion(const ChannelConfig& config, const EigenSample& e) {
  const std::vector<double> snrs = eigen_snrs(config, e);
  double v = 0.0;
  for (double g : snrs) {
    const double t = 1.0 + g;
    v += 1.0 - 1.0 / (t * t);
  }
  return v * kLog2E * kLog2E;
}

MonteCarloEstimate ergodic_capacity(const ChannelConfig& config,
                                    const MonteCarloSpec& spec) {
  return estimate(
      [&config](const ChannelRealization& r) {
        return conditional_capacity(config, gram_eigenvalues(r));
      },
      config, spec);
}

double log2_chi_square_mean(int i) { return (digamma_int(i) + kLn2) / kLn2; }

double high_snr_capacity(const ChannelConfig& config) {
  const double snr = average_snr(config);
  if (!(snr > 0.0))
    throw std::invalid_argument("high_snr_capacity: average SNR must be positive");
  const int lo = std::abs(config.n_tx - config.n_rx) + 1;
  const int hi = std::max(config.n_tx, config.n_rx);
  const int m = std::min(config.n_tx, config.n_rx);
  double value = m * std::log2(snr / static_cast<double>(config.n_tx));
  // Unit-variance complex entries make each chi-square term chi^2_{2i}/2,
  // hence the -1 bit per mode.
  for (int i = lo; i <= hi; ++i) value += log2_chi_square_mean(i) - 1.0;
  return value;
}

double rate_from_reliability(double capacity, double dispersion, double theta_err,
                             std::int64_t n) {
  if (n < 1) throw std::invalid_argument("rate_from_reliability: n must be >= 1");
  if (!(dispersion >= 0.0))
    throw std::invalid_argument("rate_from_reliability: dispersion must be >= 0");
  const double a = static_cast<double>(n) * theta_err;
  if (!(a > kLn2))
    throw std::invalid_argument(
        "rate_from_reliability: requires exp(-n*theta_err) < 1/2");
  if (dispersion == 0.0) return capacity;
  if (std::isinf(a))
    throw std::invalid_argument(
        "rate_from_reliability: error probability collapsed to zero with positive "
        "dispersion");
  return capacity - std::sqrt(dispersion / static_cast<double>(n)) * q_inverse_exp_neg(a);
}

double service_rate(const ConditionalMoments& m, double qinv_eps, std::int64_t n) {
  if (m.dispersion == 0.0) return std::max(0.0, m.capacity);
  const double r =
      m.capacity - std::sqrt(m.dispersion / static_cast<double>(n)) * qinv_eps;
  return std::max(0.0, r);
}

MomentSet sample_conditional_moments(const ChannelConfig& config,
                                     const MonteCarloSpec& spec) {
  const EigenStream stream(config, spec);
  const double scale = average_snr(config) / static_cast<double>(config.n_tx);
  MomentSet set;
  set.samples.resize(static_cast<std::size_t>(stream.samples()));
  set.seed = spec.seed;
  for (std::int64_t i = 0; i < stream.samples(); ++i) {
    double c = 0.0, v = 0.0;
    for (double lam : stream.eigenvalues(i)) {
      const double g = scale * lam;
      c += std::log1p(g);
      const double t = 1.0 + g;
      v += 1.0 - 1.0 / (t * t);
    }
    set.samples[static_cast<std::size_t>(i)] = {c * kLog2E, v * kLog2E * kLog2E};
  }
  return set;
}

MomentSet stub_conditional_moments(const StubChannel& stub) {
  if (!(stub.capacity >= 0.0) || !(stub.dispersion >= 0.0))
    throw std::invalid_argument("StubChannel: capacity and dispersion must be >= 0");
  MomentSet set;
  set.samples = {{stub.capacity, stub.dispersion}};
  set.exact = true;
  return set;
}

MonteCarloEstimate normal_approx_residual(const MomentSet& moments, std::int64_t n,
                                          double eps, double rate) {
  if (moments.samples.empty())
    throw std::invalid_argument("normal_approx_residual: empty moment set");
  std::vector<double> terms(moments.samples.size());
  for (std::size_t j = 0; j < moments.samples.size(); ++j) {
    const auto& m = moments.samples[j];
    if (m.dispersion == 0.0) {
      terms[j] = m.capacity > rate ? 0.0 : (m.capacity < rate ? 1.0 : 0.5);
    } else {
      terms[j] =
          q_function((m.capacity - rate) / std::sqrt(m.dispersion / static_cast<double>(n)));
    }
  }
  const MeanStd ms = mean_and_stddev(terms);
  const double se = moments.exact
                        ? 0.0
                        : ms.stddev / std::sqrt(static_cast<double>(terms.size()));
  return {ms.mean - eps, se, static_cast<std::int64_t>(terms.size()), moments.seed};
}

RatePoint solve_normal_approx_rate(const MomentSet& moments, std::int64_t n,
                                   double eps) {
  if (n < 50)
    throw std::invalid_argument(
        "solve_normal_approx_rate: n must be >= 50 for the normal approximation");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("solve_normal_approx_rate: eps must lie in (0, 1)");
  std::vector<double> caps(moments.samples.size());
  for (std::size_t j = 0; j < caps.size(); ++j) caps[j] = moments.samples[j].capacity;
  const MeanStd cap = mean_and_stddev(caps);
  const double upper = cap.mean + 10.0 * cap.stddev;

  const auto residual = [&](double r) {
    return normal_approx_residual(moments, n, eps, r).mean;
  };
  const double rlo = residual(0.0);
  const double rhi = residual(upper);
  RatePoint out{n, eps, 0.0, 0.0};
  if (rlo == 0.0) {
    out.rate = 0.0;
    out.residual = rlo;
    return out;
  }
  if (rhi == 0.0) {
    out.rate = upper;
    out.residual = rhi;
    return out;
  }
  if (rlo > 0.0)
    throw InfeasibleTargetError(
        "solve_normal_approx_rate: eps " + std::to_string(eps) +
        " is below the zero-rate error floor " + std::to_string(rlo + eps));
  if (rhi < 0.0)
    throw InfeasibleTargetError(
        "solve_normal_approx_rate: eps " + std::to_string(eps) +
        " is not reachable within the rate bracket [0, " + std::to_string(upper) + "]");
  // 40 halvings leave the residual orders below the acceptance tolerance of
  // max(1e-6, 0.1 stderr).
  const double root = bisect_root(residual, 0.0, upper, rlo, rhi,
                                  /*xtol=*/0.0, /*ftol=*/1e-9, /*max_iter=*/40);
  out.rate = root;
  out.residual = residual(root);
  return out;
}

RatePoint solve_normal_approx_rate(const ChannelConfig& config, std::int64_t n,
                                   double eps, const MonteCarloSpec& spec) {
  return solve_normal_approx_rate(sample_conditional_moments(config, spec), n, eps);
}

RatePoint solve_normal_approx_rate(const StubChannel& stub, std::int64_t n, double eps) {
  return solve_normal_approx_rate(stub_conditional_moments(stub), n, eps);
}

}  // namespace fbqos
