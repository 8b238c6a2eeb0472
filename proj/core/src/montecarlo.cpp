#include "fbqos/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "fbqos/errors.hpp"
#include "fbqos/numerics.hpp"

namespace fbqos {

void MonteCarloSpec::validate() const {
  if (samples < 2)
    throw std::invalid_argument("MonteCarloSpec: samples must be >= 2");
}

ChannelRealization stream_realization(const ChannelConfig& config,
                                      const MonteCarloSpec& spec,
                                      std::int64_t index) {
  if (!spec.antithetic) return sample_channel(config, spec.seed, index);
  ChannelRealization r = sample_channel(config, spec.seed, index / 2);
  if (index % 2 != 0) r.matrix = -r.matrix;
  return r;
}

namespace {

struct IndexedFailure {
  std::int64_t index = -1;
  std::exception_ptr error;
};

// Fill values[i] = f(realization(i)) for i in [0, N), optionally across
// threads. The buffer ordering makes downstream reductions canonical.
void fill_values(const RealizationFunctional& f, const ChannelConfig& config,
                 const MonteCarloSpec& spec, int partitions,
                 std::vector<double>& values) {
  const std::int64_t n = spec.samples;
  values.resize(static_cast<std::size_t>(n));
  partitions = std::max(1, partitions);
  const auto run_range = [&](std::int64_t lo, std::int64_t hi, IndexedFailure* fail) {
    for (std::int64_t i = lo; i < hi; ++i) {
      try {
        values[static_cast<std::size_t>(i)] = f(stream_realization(config, spec, i));
      } catch (...) {
        if (fail->index < 0 || i < fail->index) {
          fail->index = i;
          fail->error = std::current_exception();
        }
        return;
      }
    }
  };
  if (partitions == 1) {
    IndexedFailure fail;
    run_range(0, n, &fail);
    if (fail.error) {
      try {
        std::rethrow_exception(fail.error);
      } catch (const NumericRangeError& e) {
        throw NumericRangeError("realization index " + std::to_string(fail.index) +
                                ": " + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error("functional failed at realization index " +
                                 std::to_string(fail.index) + ": " + e.what());
      }
    }
    return;
  }
  std::vector<IndexedFailure> failures(static_cast<std::size_t>(partitions));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(partitions));
  const std::int64_t chunk = (n + partitions - 1) / partitions;
  for (int p = 0; p < partitions; ++p) {
    const std::int64_t lo = static_cast<std::int64_t>(p) * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back(run_range, lo, hi, &failures[static_cast<std::size_t>(p)]);
  }
  for (auto& w : workers) w.join();
  const IndexedFailure* first = nullptr;
  for (const auto& fl : failures)
    if (fl.error && (!first || fl.index < first->index)) first = &fl;
  if (first) {
    try {
      std::rethrow_exception(first->error);
    } catch (const NumericRangeError& e) {
      throw NumericRangeError("realization index " + std::to_string(first->index) +
                              ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("functional failed at realization index " +
                               std::to_string(first->index) + ": " + e.what());
    }
  }
}

}  // namespace

MonteCarloEstimate estimate(const RealizationFunctional& functional,
                            const ChannelConfig& config, const MonteCarloSpec& spec,
                            int partitions) {
  spec.validate();
  std::vector<double> values;
  fill_values(functional, config, spec, partitions, values);
  const MeanStd ms = mean_and_stddev(values);
  return {ms.mean, ms.stddev / std::sqrt(static_cast<double>(spec.samples)),
          spec.samples, spec.seed};
}

MonteCarloEstimate log_domain_estimate(const RealizationFunctional& log_functional,
                                       const ChannelConfig& config,
                                       const MonteCarloSpec& spec, int partitions) {
  spec.validate();
  std::vector<double> values;
  fill_values(log_functional, config, spec, partitions, values);
  const LogMeanResult r = log_mean_exp(values);
  return {r.log_mean, r.std_error, spec.samples, spec.seed};
}

MonteCarloEstimate variance_of_log_eigen_product(const ChannelConfig& config,
                                                 const MonteCarloSpec& spec,
                                                 std::int64_t* zero_eigen_samples) {
  spec.validate();
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(spec.samples));
  std::int64_t zeros = 0;
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    const EigenSample e = gram_eigenvalues(stream_realization(config, spec, i));
    double s = 0.0;
    bool zero = false;
    for (double lam : e.eigenvalues) {
      if (lam <= 0.0) {
        zero = true;
        break;
      }
      s += std::log(lam);
    }
    if (zero) {
      ++zeros;  // measure-zero event, numerically possible via underflow
      continue;
    }
    sums.push_back(s);
  }
  if (zero_eigen_samples) *zero_eigen_samples = zeros;
  if (sums.size() < 2)
    throw NumericRangeError(
        "variance_of_log_eigen_product: fewer than two usable samples");
  const MeanStd ms = mean_and_stddev(sums);
  const double var = ms.stddev * ms.stddev;
  // Standard error of the sample variance from the fourth central moment.
  const auto n = static_cast<double>(sums.size());
  double m4 = 0.0;
  for (double s : sums) {
    const double d = s - ms.mean;
    m4 += d * d * d * d;
  }
  m4 /= n;
  const double var_of_var =
      std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * var * var) / n);
  return {var, std::sqrt(var_of_var), static_cast<std::int64_t>(sums.size()),
          spec.seed};
}

EigenStream::EigenStream(const ChannelConfig& config, const MonteCarloSpec& spec) {
  spec.validate();
  config.validate();
  samples_ = spec.samples;
  modes_ = std::min(config.n_tx, config.n_rx);
  seed_ = spec.seed;
  values_.resize(static_cast<std::size_t>(samples_) * static_cast<std::size_t>(modes_));
  for (std::int64_t i = 0; i < samples_; ++i) {
    const EigenSample e = gram_eigenvalues(stream_realization(config, spec, i));
    for (int m = 0; m < modes_; ++m)
      values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(modes_) +
              static_cast<std::size_t>(m)] = e.eigenvalues[static_cast<std::size_t>(m)];
  }
}

}  // namespace fbqos
