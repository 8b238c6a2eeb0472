#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fbqos/errors.hpp"
#include "fbqos/fbc_rate.hpp"
#include "fbqos/numerics.hpp"
#include "fbqos/units.hpp"

using namespace fbqos;

namespace {

const ChannelConfig kScalar10{1, 1, 1.0, 1.0, 2.0, 0.1, 1.0};  // SNR = 10

// Bisection oracle for the Gaussian tail quantile, independent of the
// AS 241 implementation path.
double q_inverse_bisect(double p) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("q_function basics") {
  CHECK(q_function(0.0) == 0.5);
  CHECK(q_function(8.0) < 1e-15);
  CHECK(q_function(8.0) > 0.0);
  CHECK(q_inverse(q_function(1.5)) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("q_inverse against the bisection oracle") {
  CHECK(q_inverse(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q_inverse(0.975) == doctest::Approx(-1.959964).epsilon(1e-5));
  // The oracle itself is conditioned only on the upper tail.
  for (double p : {1e-10, 1e-6, 1e-3, 0.1, 0.3, 0.5}) {
    const double oracle = q_inverse_bisect(p);
    CHECK(q_inverse(p) == doctest::Approx(oracle).epsilon(1e-9));
  }
  // Left tail by symmetry.
  for (double p : {0.7, 0.9, 0.999, 1.0 - 1e-9})
    CHECK(q_inverse(p) == -q_inverse(1.0 - p));
  CHECK_THROWS_AS(q_inverse(0.0), std::invalid_argument);
  CHECK_THROWS_AS(q_inverse(1.0), std::invalid_argument);
  CHECK_THROWS_AS(q_inverse(-0.1), std::invalid_argument);
}

TEST_CASE("q roundtrip accuracy across the tail") {
  for (double p : {1e-300, 1e-200, 1e-100, 1e-30, 1e-12, 1e-4, 0.2, 0.8, 1.0 - 1e-12}) {
    const double x = q_inverse(p);
    CHECK(q_function(x) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("log_q_function agrees with q_function where both are sane") {
  for (double x = -5.0; x <= 35.0; x += 0.5) {
    const double direct = q_function(x);
    if (direct == 0.0) continue;
    CHECK(std::exp(log_q_function(x)) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("q_inverse_exp_neg across the exponent range") {
  for (double a : {1.0, 5.0, 10.0, 50.0, 200.0, 600.0, 688.0, 800.0, 5000.0}) {
    const double x = q_inverse_exp_neg(a);
    CHECK(log_q_function(x) == doctest::Approx(-a).epsilon(1e-9));
  }
  // Paper asymptotic: Q^{-1}(e^{-n vartheta}) ~ sqrt(2 n vartheta).
  CHECK(q_inverse_exp_neg(50.0) == doctest::Approx(10.0).epsilon(0.10));
  CHECK_THROWS_AS(q_inverse_exp_neg(0.0), std::invalid_argument);
  CHECK_THROWS_AS(q_inverse_exp_neg(INFINITY), std::invalid_argument);
}

TEST_CASE("conditional capacity basics") {
  EigenSample zero{{0.0}};
  ChannelConfig zero_power = kScalar10;
  zero_power.power = 0.0;
  CHECK(conditional_capacity(zero_power, zero) == 0.0);

  // Single mode with eigen-SNR 1: log2(2) = 1 bit.
  ChannelConfig unit = kScalar10;
  unit.power = 0.1;  // SNR = 1
  EigenSample one{{1.0}};
  CHECK(conditional_capacity(unit, one) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional capacity equals the log-determinant oracle") {
  ChannelConfig c = kScalar10;
  c.n_tx = 2;
  c.n_rx = 2;
  const double scale = average_snr(c) / 2.0;
  for (std::int64_t i = 0; i < 50; ++i) {
    const auto r = sample_channel(c, 77, i);
    const Eigen::Matrix2cd gram = r.matrix * r.matrix.adjoint();
    const Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity() + scale * gram;
    const double oracle = std::log2((m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real());
    const double got = conditional_capacity(c, gram_eigenvalues(r));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("conditional dispersion formula values") {
  ChannelConfig unit = kScalar10;
  unit.power = 0.1;  // SNR = 1
  EigenSample zero{{0.0}};
  CHECK(conditional_dispersion(unit, zero) == 0.0);
  EigenSample one{{1.0}};  // gamma = 1: (1 - 1/4) (log2 e)^2
  CHECK(conditional_dispersion(unit, one) == doctest::Approx(1.5611).epsilon(1e-3));
  CHECK(conditional_dispersion(unit, one) ==
        doctest::Approx(0.75 * kLog2E * kLog2E).epsilon(1e-12));
  EigenSample huge{{1e12}};
  CHECK(conditional_dispersion(unit, huge) ==
        doctest::Approx(kLog2E * kLog2E).epsilon(1e-6));
  CHECK(conditional_dispersion(unit, huge) == doctest::Approx(2.0814).epsilon(1e-3));
}

TEST_CASE("ergodic capacity: zero SNR and the high-sample oracle") {
  ChannelConfig zero_power = kScalar10;
  zero_power.power = 0.0;
  MonteCarloSpec spec{1000, 53};
  const auto est0 = ergodic_capacity(zero_power, spec);
  CHECK(est0.mean == 0.0);
  CHECK(est0.std_error == 0.0);

  // Oracle: 10^6 draws through std::mt19937_64, E[log2(1 + 10 |h|^2)].
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  const int m = 1000000;
  std::vector<double> vals;
  vals.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double re = g(rng), im = g(rng);
    vals.push_back(std::log2(1.0 + 10.0 * (re * re + im * im)));
  }
  const MeanStd oracle = mean_and_stddev(vals);
  const double oracle_se = oracle.stddev / std::sqrt(static_cast<double>(m));

  MonteCarloSpec spec_big{100000, 59};
  const auto est = ergodic_capacity(kScalar10, spec_big);
  const double joint = std::sqrt(est.std_error * est.std_error + oracle_se * oracle_se);
  CHECK(std::abs(est.mean - oracle.mean) < 3.0 * joint);
}

TEST_CASE("ergodic capacity strictly grows with n_rx") {
  ChannelConfig two_rx = kScalar10;
  two_rx.n_rx = 2;
  MonteCarloSpec spec{20000, 61};
  const auto a = ergodic_capacity(kScalar10, spec);
  const auto b = ergodic_capacity(two_rx, spec);
  const double joint = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  CHECK(b.mean - a.mean > 3.0 * joint);
}

TEST_CASE("chi-square digamma identity with a Monte Carlo oracle") {
  CHECK(log2_chi_square_mean(1) == doctest::Approx(0.16724).epsilon(1e-3));
  std::mt19937_64 rng(4321);
  std::chi_squared_distribution<double> chi2(2.0);
  const int m = 1000000;
  std::vector<double> vals;
  vals.reserve(m);
  for (int i = 0; i < m; ++i) vals.push_back(std::log2(chi2(rng)));
  const MeanStd oracle = mean_and_stddev(vals);
  const double se = oracle.stddev / std::sqrt(static_cast<double>(m));
  CHECK(std::abs(log2_chi_square_mean(1) - oracle.mean) < 3.0 * se);
}

TEST_CASE("high-SNR capacity scaling and asymptotic agreement") {
  ChannelConfig c = kScalar10;
  c.n_tx = 2;
  c.n_rx = 2;
  // SNR x4 with min(N_T, N_R) = 2 adds exactly 4 bits.
  ChannelConfig c4 = c;
  c4.power *= 4.0;
  CHECK(high_snr_capacity(c4) - high_snr_capacity(c) == doctest::Approx(4.0).epsilon(1e-12));

  ChannelConfig zero = c;
  zero.power = 0.0;
  CHECK_THROWS_AS(high_snr_capacity(zero), std::invalid_argument);

  // At 60 dB the expansion sits within 0.1 bit of the ergodic estimate,
  // and the signed gap (ergodic - high_snr) shrinks with SNR under
  // common random numbers.
  MonteCarloSpec spec{200000, 67};
  std::vector<double> gaps;
  for (double snr_db : {40.0, 50.0, 60.0}) {
    ChannelConfig cc = c;
    cc.power = std::pow(10.0, snr_db / 10.0) * cc.noise_power;  // distance 1
    gaps.push_back(ergodic_capacity(cc, spec).mean - high_snr_capacity(cc));
  }
  CHECK(std::abs(gaps[2]) < 0.1);
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[1] > gaps[2]);
}

TEST_CASE("rate_from_reliability: limits, domain, concavity, consistency") {
  const std::int64_t n = 200;
  // theta_err at the admissibility boundary: Q^{-1} term vanishes.
  const double boundary = kLn2 / n * (1.0 + 1e-9);
  CHECK(rate_from_reliability(4.0, 2.0, boundary, n) == doctest::Approx(4.0).epsilon(1e-4));
  // Zero dispersion returns capacity for every admissible theta_err.
  CHECK(rate_from_reliability(4.0, 0.0, 0.05, n) == 4.0);
  CHECK(rate_from_reliability(4.0, 0.0, INFINITY, n) == 4.0);
  CHECK_THROWS_AS(rate_from_reliability(4.0, 2.0, kLn2 / n, n), std::invalid_argument);
  CHECK_THROWS_AS(rate_from_reliability(4.0, 2.0, INFINITY, n), std::invalid_argument);

  // Strictly decreasing on a uniform grid; diminishing-return concavity
  // holds against log-spaced reliability exponents (the quantile rate is
  // concave in ln(theta_err), as is C - sqrt(2 V theta_err) itself).
  const auto uniform = linspace(0.01, 0.1, 20);
  std::vector<double> rates;
  for (double t : uniform) rates.push_back(rate_from_reliability(4.0, 2.0, t, n));
  for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] < rates[i - 1]);
  const auto grid = logspace(0.01, 0.1, 20);
  rates.clear();
  for (double t : grid) rates.push_back(rate_from_reliability(4.0, 2.0, t, n));
  for (std::size_t i = 2; i < rates.size(); ++i) {
    const double second = rates[i] - 2.0 * rates[i - 1] + rates[i - 2];
    CHECK(second <= 1e-9);
  }

  // Consistency loop: Q((C - R)/sqrt(V/n)) recovers e^{-n vartheta}.
  for (double t : {0.02, 0.05, 0.1, 0.5}) {
    const double r = rate_from_reliability(4.0, 2.0, t, n);
    const double q = q_function((4.0 - r) / std::sqrt(2.0 / n));
    CHECK(q == doctest::Approx(std::exp(-static_cast<double>(n) * t)).epsilon(1e-9));
  }

  // Large n*vartheta: agreement with C - sqrt(2 V vartheta).
  const double t = 0.25;  // n t = 50
  const double exact = rate_from_reliability(4.0, 2.0, t, n);
  const double approx = 4.0 - std::sqrt(2.0 * 2.0 * t);
  CHECK(std::abs(exact - approx) / std::abs(approx) < 0.10);
}

TEST_CASE("solver: deterministic stub") {
  const StubChannel stub{3.0, 1.5};
  // eps = 0.5 solves at R = C exactly (Q(0) = 0.5, bracket endpoint).
  const RatePoint half = solve_normal_approx_rate(stub, 200, 0.5);
  CHECK(half.rate == 3.0);
  CHECK(half.residual == 0.0);

  // Large n: the dispersion backoff vanishes.
  const RatePoint big = solve_normal_approx_rate(stub, 1000000, 1e-3);
  CHECK(std::abs(big.rate - 3.0) / 3.0 < 0.005);

  // Closed form at moderate n.
  const RatePoint p = solve_normal_approx_rate(stub, 200, 1e-3);
  const double closed = 3.0 - std::sqrt(1.5 / 200.0) * q_inverse(1e-3);
  CHECK(p.rate == doctest::Approx(closed).epsilon(1e-8));
  CHECK(std::abs(p.residual) <= 1e-6);
}

TEST_CASE("solver: infeasible targets") {
  // Zero-capacity stub: the error floor at zero rate is 1/2.
  const StubChannel dead{0.0, 0.0};
  CHECK_THROWS_AS(solve_normal_approx_rate(dead, 100, 1e-3), InfeasibleTargetError);
  // eps above the bracket's reach on an exact stub.
  const StubChannel stub{1.0, 0.5};
  CHECK_THROWS_AS(solve_normal_approx_rate(stub, 100, 0.999), InfeasibleTargetError);
  CHECK_THROWS_AS(solve_normal_approx_rate(stub, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_normal_approx_rate(stub, 100, 0.0), std::invalid_argument);
}

TEST_CASE("solver matches a 2000-point grid scan with common random numbers") {
  MonteCarloSpec spec{10000, 71};
  const MomentSet moments = sample_conditional_moments(kScalar10, spec);
  const std::int64_t n = 200;
  const double eps = 1e-3;
  const RatePoint solved = solve_normal_approx_rate(moments, n, eps);

  std::vector<double> caps;
  for (const auto& m : moments.samples) caps.push_back(m.capacity);
  const MeanStd cap = mean_and_stddev(caps);
  const double upper = cap.mean + 10.0 * cap.stddev;
  const int kGrid = 2000;
  double root = -1.0;
  double prev = normal_approx_residual(moments, n, eps, 0.0).mean;
  for (int i = 1; i <= kGrid; ++i) {
    const double r = upper * static_cast<double>(i) / kGrid;
    const double cur = normal_approx_residual(moments, n, eps, r).mean;
    if ((prev < 0.0) != (cur < 0.0)) {
      root = upper * (static_cast<double>(i) - 0.5) / kGrid;
      break;
    }
    prev = cur;
  }
  REQUIRE(root > 0.0);
  CHECK(std::abs(solved.rate - root) <= upper / kGrid);
  const auto res = normal_approx_residual(moments, n, eps, solved.rate);
  CHECK(std::abs(res.mean) <= std::max(1e-6, 0.1 * res.std_error));
}

TEST_CASE("solver rate is monotone in eps under common random numbers") {
  // The Rayleigh channel has a zero-rate outage floor near 4e-4 here, so
  // the smallest feasible probe sits above it.
  MonteCarloSpec spec{10000, 73};
  const MomentSet moments = sample_conditional_moments(kScalar10, spec);
  const double r1 = solve_normal_approx_rate(moments, 200, 1e-3).rate;
  const double r2 = solve_normal_approx_rate(moments, 200, 1e-2).rate;
  const double r3 = solve_normal_approx_rate(moments, 200, 1e-1).rate;
  CHECK(r1 < r2);
  CHECK(r2 < r3);
  CHECK_THROWS_AS(solve_normal_approx_rate(moments, 200, 1e-5), InfeasibleTargetError);
}

TEST_CASE("solved rate stays below ergodic capacity for eps < 1/2") {
  MonteCarloSpec spec{20000, 79};
  const auto cap = ergodic_capacity(kScalar10, spec);
  const RatePoint p = solve_normal_approx_rate(kScalar10, 200, 0.3, spec);
  CHECK(p.rate <= cap.mean + 3.0 * cap.std_error);
  CHECK(p.rate >= 0.0);
}
