#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbqos/effective_capacity.hpp"
#include "fbqos/queue_sim.hpp"
#include "fbqos/units.hpp"

using namespace fbqos;

namespace {

const ChannelConfig kScalar10{1, 1, 1.0, 1.0, 2.0, 0.1, 1.0};

}  // namespace

TEST_CASE("zero arrivals leave the queue empty") {
  const QueueTrace t = simulate_queue(kScalar10, 0.0, 0.02, 200, 20000, 7);
  for (double p : t.overflow_probs) CHECK(p == 0.0);
  CHECK_FALSE(t.fitted_exponent.has_value());
  CHECK(t.warmup_blocks == 2000);
}

TEST_CASE("stable deterministic stub drains to zero") {
  // eps = 0 via theta_err = inf on a zero-dispersion stub.
  const StubChannel stub{2.0, 0.0};
  const std::int64_t n = 200;
  const QueueTrace t = simulate_queue(stub, 0.9 * n * 2.0, INFINITY, n, 20000, 11);
  for (double th : t.thresholds) CHECK(th == 0.0);
  for (double p : t.overflow_probs) CHECK(p == 0.0);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(simulate_queue(kScalar10, -1.0, 0.02, 200, 1000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_queue(kScalar10, 1.0, kLn2 / 200.0, 200, 1000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_queue(kScalar10, 1.0, INFINITY, 200, 1000, 1),
                  std::invalid_argument);
  const StubChannel noisy{2.0, 1.0};
  CHECK_THROWS_AS(simulate_queue(noisy, 1.0, INFINITY, 200, 1000, 1),
                  std::invalid_argument);
}

TEST_CASE("identical seeds reproduce the trace") {
  const QueueTrace a = simulate_queue(kScalar10, 300.0, 0.02, 200, 50000, 13);
  const QueueTrace b = simulate_queue(kScalar10, 300.0, 0.02, 200, 50000, 13);
  REQUIRE(a.thresholds.size() == b.thresholds.size());
  for (std::size_t i = 0; i < a.thresholds.size(); ++i) {
    CHECK(a.thresholds[i] == b.thresholds[i]);
    CHECK(a.overflow_probs[i] == b.overflow_probs[i]);
  }
  CHECK(a.fitted_exponent.has_value() == b.fitted_exponent.has_value());
}

TEST_CASE("larger arrivals give smaller decay exponents") {
  const StubChannel stub{2.0, 0.0};
  const std::int64_t n = 200;
  const QueueTrace slow = simulate_queue(stub, 340.0, 0.02, n, 400000, 17);
  const QueueTrace fast = simulate_queue(stub, 385.0, 0.02, n, 400000, 17);
  REQUIRE(slow.fitted_exponent.has_value());
  REQUIRE(fast.fitted_exponent.has_value());
  CHECK(*fast.fitted_exponent < *slow.fitted_exponent);
}

TEST_CASE("arrival at n*EC reproduces the delay exponent") {
  // Binary stub service: the effective-bandwidth fixed point is exact, so
  // arrival n*EC(theta0) decays at theta0 up to finite-sample noise.
  const StubChannel stub{2.0, 0.0};
  const std::int64_t n = 200;
  const double theta0 = 1e-3;
  const double theta_err = 0.02;
  const EcSurfacePoint p = epsilon_effective_capacity(stub, {theta0, theta_err}, n);
  const double arrival = static_cast<double>(n) * p.ec;
  const QueueTrace t = simulate_queue(stub, arrival, theta_err, n, 1000000, 19);
  REQUIRE(t.fitted_exponent.has_value());
  const double scaled = theta0 * queue_theta_scale();
  CHECK(*t.fitted_exponent >= 0.7 * scaled);
  CHECK(*t.fitted_exponent <= 1.3 * scaled);
  CHECK(t.fit_r_squared >= 0.95);
}

TEST_CASE("fading channel at 90% of n*EC decays faster than theta") {
  const std::int64_t n = 200;
  const double theta0 = 1e-3;
  const double theta_err = 0.02;
  MonteCarloSpec spec{10000, 23};
  const EcSurfacePoint p = epsilon_effective_capacity(kScalar10, {theta0, theta_err}, n, spec);
  const double arrival = 0.9 * static_cast<double>(n) * p.ec;
  const QueueTrace t = simulate_queue(kScalar10, arrival, theta_err, n, 300000, 29);
  REQUIRE(t.fitted_exponent.has_value());
  CHECK(*t.fitted_exponent >= 0.9 * theta0 * queue_theta_scale());
  CHECK(t.fit_r_squared >= 0.9);
}
