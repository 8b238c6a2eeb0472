#pragma once

#include <cstdint>

namespace fbqos {

// Unit convention used throughout:
//   rates, capacities, effective capacity   bits per channel use
//   dispersion                              bits^2 per channel use
//   error-rate exponent theta_err           nats per channel use
//   delay exponent theta_delay              per bit
//   log-MGF Lambda                          natural log
// Under this convention the service term of the log-MGF is
// exp(-n * theta_delay * rate_bits) with no base conversion, effective
// capacity is -Lambda / (n * theta_delay) directly in bits per channel
// use, and a queue whose thresholds are measured in bits is compared
// against theta_delay with unit scale.

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kLog2E = 1.4426950408889634074;

inline double bits_to_nats(double bits) { return bits * kLn2; }
inline double nats_to_bits(double nats) { return nats / kLn2; }

// Exponent of the service factor inside the log-MGF integrand.
inline double service_log_weight(double theta_delay, std::int64_t blocklength,
                                 double rate_bits) {
  return -static_cast<double>(blocklength) * theta_delay * rate_bits;
}

// Factor mapping theta_delay onto the exponent fitted from queue-length
// tail probabilities with thresholds in bits.
inline constexpr double queue_theta_scale() { return 1.0; }

}  // namespace fbqos
