#include "fbqos/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbqos/rng.hpp"
#include "fbqos/units.hpp"

namespace fbqos {

namespace {

constexpr double kQuantiles[] = {0.9, 0.95, 0.99, 0.999};
constexpr std::int64_t kMinExceedances = 50;

QueueTrace trace_from_samples(std::vector<double> samples, std::int64_t blocks,
                              std::int64_t warmup) {
  QueueTrace trace;
  trace.blocks = blocks;
  trace.warmup_blocks = warmup;
  if (samples.empty()) return trace;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<double>(sorted.size());
  for (double q : kQuantiles) {
    const auto idx = static_cast<std::size_t>(q * (m - 1.0));
    const double t = sorted[idx];
    if (!trace.thresholds.empty() && t <= trace.thresholds.back()) continue;
    trace.thresholds.push_back(t);
  }
  for (double t : trace.thresholds) {
    // samples strictly above t; sorted array gives the count directly
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    const auto count = static_cast<std::int64_t>(sorted.end() - it);
    trace.exceed_counts.push_back(count);
    trace.overflow_probs.push_back(static_cast<double>(count) / m);
  }
  // Least squares of -log(p) on threshold over usable points.
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < trace.thresholds.size(); ++i) {
    if (trace.exceed_counts[i] < kMinExceedances) continue;
    xs.push_back(trace.thresholds[i]);
    ys.push_back(-std::log(trace.overflow_probs[i]));
  }
  if (xs.size() < 2) return trace;
  const auto k = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double den = k * sxx - sx * sx;
  if (den <= 0.0) return trace;
  const double slope = (k * sxy - sx * sy) / den;
  trace.fitted_exponent = slope;
  const double sst = syy - sy * sy / k;
  if (sst > 0.0) {
    const double intercept = (sy - slope * sx) / k;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (intercept + slope * xs[i]);
      sse += r * r;
    }
    trace.fit_r_squared = 1.0 - sse / sst;
  } else {
    trace.fit_r_squared = 1.0;
  }
  return trace;
}

template <typename ServiceRateFn>
QueueTrace run_queue(ServiceRateFn&& rate_of_block, double arrival_rate,
                     double qos_err, std::int64_t n, std::int64_t blocks,
                     std::uint64_t seed) {
  if (!(arrival_rate >= 0.0))
    throw std::invalid_argument("simulate_queue: arrival_rate must be >= 0");
  if (!(qos_err > 0.0))
    throw std::invalid_argument("simulate_queue: qos_err must be > 0");
  if (n < 1) throw std::invalid_argument("simulate_queue: n must be >= 1");
  if (blocks < 10) throw std::invalid_argument("simulate_queue: blocks must be >= 10");
  const double eps = std::exp(-static_cast<double>(n) * qos_err);
  const std::int64_t warmup = blocks / 10;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(blocks - warmup));
  double queue = 0.0;
  for (std::int64_t b = 0; b < blocks; ++b) {
    // The failure draw shares the block's substream, after the fading draws.
    double service = 0.0;
    SubStream fail_stream(seed ^ 0x5851F42D4C957F2Dull, static_cast<std::uint64_t>(b));
    if (fail_stream.next_unit() > eps)
      service = static_cast<double>(n) * rate_of_block(b);
    queue = std::max(0.0, queue + arrival_rate - service);
    if (b >= warmup) samples.push_back(queue);
  }
  return trace_from_samples(std::move(samples), blocks, warmup);
}

}  // namespace

QueueTrace simulate_queue(const ChannelConfig& config, double arrival_rate,
                          double qos_err, std::int64_t n, std::int64_t blocks,
                          std::uint64_t seed) {
  config.validate();
  const double scale = average_snr(config) / static_cast<double>(config.n_tx);
  const double a = static_cast<double>(n) * qos_err;
  if (!(a > kLn2))
    throw std::invalid_argument("simulate_queue: requires exp(-n*qos_err) < 1/2");
  if (std::isinf(a))
    throw std::invalid_argument(
        "simulate_queue: qos_err = inf admits only zero-dispersion stubs");
  const double qinv = q_inverse_exp_neg(a);
  const auto rate_of_block = [&](std::int64_t b) {
    const EigenSample e = gram_eigenvalues(sample_channel(config, seed, b));
    double c = 0.0, v = 0.0;
    for (double lam : e.eigenvalues) {
      const double g = scale * lam;
      c += std::log1p(g);
      const double t = 1.0 + g;
      v += 1.0 - 1.0 / (t * t);
    }
    return service_rate({c * kLog2E, v * kLog2E * kLog2E}, qinv, n);
  };
  return run_queue(rate_of_block, arrival_rate, qos_err, n, blocks, seed);
}

QueueTrace simulate_queue(const StubChannel& stub, double arrival_rate, double qos_err,
                          std::int64_t n, std::int64_t blocks, std::uint64_t seed) {
  const double a = static_cast<double>(n) * qos_err;
  if (!(a > kLn2))
    throw std::invalid_argument("simulate_queue: requires exp(-n*qos_err) < 1/2");
  const double qinv = std::isinf(a) ? 0.0 : q_inverse_exp_neg(a);
  const ConditionalMoments m{stub.capacity, stub.dispersion};
  if (std::isinf(a) && stub.dispersion != 0.0)
    throw std::invalid_argument(
        "simulate_queue: qos_err = inf admits only zero-dispersion stubs");
  const double fixed_rate = service_rate(m, qinv, n);
  return run_queue([&](std::int64_t) { return fixed_rate; }, arrival_rate, qos_err, n,
                   blocks, seed);
}

}  // namespace fbqos
