#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fbqos/fbc_rate.hpp"

namespace fbqos {

// Empirical queue-tail trace. Thresholds are queue lengths in bits at the
// post-warm-up quantiles {0.9, 0.95, 0.99, 0.999}; the exponent is the
// least-squares slope of -log(overflow probability) against threshold over
// thresholds with at least 50 exceedance events.
struct QueueTrace {
  std::vector<double> thresholds;
  std::vector<double> overflow_probs;
  std::vector<std::int64_t> exceed_counts;
  std::optional<double> fitted_exponent;  // per bit
  double fit_r_squared = 0.0;
  std::int64_t blocks = 0;
  std::int64_t warmup_blocks = 0;
};

// Discrete-time queue fed by a constant arrival (bits per fading block)
// and served by the finite-blocklength service process: each block either
// decodes (serving n * R*(gamma) bits) or fails with probability
// exp(-n * qos_err) and serves nothing, leaving the data queued.
QueueTrace simulate_queue(const ChannelConfig& config, double arrival_rate,
                          double qos_err, std::int64_t n, std::int64_t blocks,
                          std::uint64_t seed);
QueueTrace simulate_queue(const StubChannel& stub, double arrival_rate, double qos_err,
                          std::int64_t n, std::int64_t blocks, std::uint64_t seed);

}  // namespace fbqos
