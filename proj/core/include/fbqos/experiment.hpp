#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbqos/channel.hpp"
#include "fbqos/fbc_rate.hpp"
#include "fbqos/montecarlo.hpp"

namespace fbqos {

// Configuration-file or validation failure; carries file/line context when
// it comes from the parser.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { csv, json };
enum class ChannelModelKind { rayleigh, stub };
enum class TradeoffSweep { theta, eps };

struct ExperimentConfig {
  ChannelModelKind model = ChannelModelKind::rayleigh;
  ChannelConfig channel;
  StubChannel stub;

  std::int64_t blocklength = 200;
  MonteCarloSpec mc;

  std::vector<double> rate_grid;
  std::vector<double> theta_grid;
  std::vector<double> theta_err_grid;
  std::vector<double> u_levels;
  std::vector<double> eps_grid;
  std::vector<std::int64_t> blocklength_grid;

  // [queue]
  double queue_arrival_rate = -1.0;      // bits per block; < 0 means unset
  double queue_arrival_fraction = -1.0;  // fraction of n * EC; < 0 means unset
  std::int64_t queue_blocks = 1000000;
  double queue_theta = 1e-3;
  double queue_theta_err = 0.05;

  // [pareto]
  double boundary_theta_err_max = 1.0;
  int boundary_scan_points = 64;
  bool emit_membership = false;

  // [tradeoff]
  TradeoffSweep sweep = TradeoffSweep::theta;
  double tradeoff_theta_err_max = 1.0;

  // [metadata] carried for provenance; unused by the math core
  std::int64_t num_devices = 1;
  double packet_size_bits = 1e10;

  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  std::uint64_t config_hash = 0;
};

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& filename = "<config>");
ExperimentConfig load_experiment_config(const std::string& path);

// Named experiments. Each validates the parts of the config it needs,
// runs deterministically for a fixed seed, and writes one CSV or JSON
// file with a provenance header to config.output_path.
void cmd_exponent_curve(const ExperimentConfig& config);
void cmd_ec_surface(const ExperimentConfig& config);
void cmd_pareto(const ExperimentConfig& config);
void cmd_tradeoff(const ExperimentConfig& config);
void cmd_queue_validate(const ExperimentConfig& config);
void cmd_rate_curve(const ExperimentConfig& config);

}  // namespace fbqos
