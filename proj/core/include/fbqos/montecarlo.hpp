#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fbqos/channel.hpp"

namespace fbqos {

struct MonteCarloSpec {
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  bool antithetic = false;

  void validate() const;  // samples >= 2
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

using RealizationFunctional = std::function<double(const ChannelRealization&)>;

// Realization for stream position `index` under `spec` (applies the
// antithetic pairing when enabled: odd indices negate the even draw).
ChannelRealization stream_realization(const ChannelConfig& config,
                                      const MonteCarloSpec& spec,
                                      std::int64_t index);

// Mean and standard error of `functional` over the seeded realization
// stream. Values land in a per-index buffer and the reduction is a single
// ordered pass, so the estimate is bit-identical for any partition count.
MonteCarloEstimate estimate(const RealizationFunctional& functional,
                            const ChannelConfig& config, const MonteCarloSpec& spec,
                            int partitions = 1);

// log((1/N) sum exp(l_i)) with max-shifted accumulation; stderr by the
// delta method (approximate for small samples). l_i = -inf is allowed;
// all--inf input raises a degenerate-estimate error.
MonteCarloEstimate log_domain_estimate(const RealizationFunctional& log_functional,
                                       const ChannelConfig& config,
                                       const MonteCarloSpec& spec, int partitions = 1);

// Sample variance of sum_i log(lambda_i * SNR) over eigenvalue draws
// (Wishart log-product). Computed from sum_i log(lambda_i) alone, so the
// SNR shift leaves the estimate identical bit for bit, not just in law.
// Zero-eigenvalue draws are excluded and counted via the optional pointer.
MonteCarloEstimate variance_of_log_eigen_product(const ChannelConfig& config,
                                                 const MonteCarloSpec& spec,
                                                 std::int64_t* zero_eigen_samples = nullptr);

// Cached eigenvalue draws pinned to one (seed, samples) stream; the
// common-random-number backbone shared by every parameter sweep and
// optimizer in the library.
class EigenStream {
 public:
  EigenStream(const ChannelConfig& config, const MonteCarloSpec& spec);

  std::int64_t samples() const { return samples_; }
  int modes() const { return modes_; }
  std::uint64_t seed() const { return seed_; }

  // Eigenvalues of draw i, descending.
  std::span<const double> eigenvalues(std::int64_t i) const {
    return {values_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(modes_),
            static_cast<std::size_t>(modes_)};
  }

 private:
  std::vector<double> values_;
  std::int64_t samples_ = 0;
  int modes_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace fbqos
