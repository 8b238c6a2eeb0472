#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "fbqos/errors.hpp"
#include "fbqos/experiment.hpp"
#include "fbqos/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::int64_t seed = -1;
  std::int64_t samples = -1;
};

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--config", opts->config_path, "experiment config file")->required();
  cmd->add_option("--seed", opts->seed, "override [mc] seed");
  cmd->add_option("--samples", opts->samples, "override [mc] samples");
  cmd->add_option("--out", opts->out_path, "override output path");
  cmd->add_option("--format", opts->format, "override output format (csv|json)")
      ->check(CLI::IsMember({"csv", "json"}));
}

fbqos::ExperimentConfig load_with_overrides(const CommonOptions& opts) {
  fbqos::ExperimentConfig cfg = fbqos::load_experiment_config(opts.config_path);
  if (opts.seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.samples >= 0) cfg.mc.samples = opts.samples;
  if (!opts.out_path.empty()) cfg.output_path = opts.out_path;
  if (opts.format == "csv") cfg.format = fbqos::OutputFormat::csv;
  if (opts.format == "json") cfg.format = fbqos::OutputFormat::json;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-blocklength statistical QoS analysis for MIMO Rayleigh fading"};
  app.set_version_flag("--version", std::string("fbqos ") + fbqos::kVersion);
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const fbqos::ExperimentConfig&);
  };
  const Sub subs[] = {
      {"exponent-curve", "error-rate-QoS exponent against coding rate",
       fbqos::cmd_exponent_curve},
      {"ec-surface", "epsilon-effective capacity over (theta, theta_err)",
       fbqos::cmd_ec_surface},
      {"pareto", "feasible QoS region Pareto boundary", fbqos::cmd_pareto},
      {"tradeoff", "EC-optimal reliability exponent per delay exponent",
       fbqos::cmd_tradeoff},
      {"queue-validate", "queue simulation against the delay exponent",
       fbqos::cmd_queue_validate},
      {"rate-curve", "normal-approximation rate over blocklength and eps",
       fbqos::cmd_rate_curve},
  };

  CommonOptions opts[std::size(subs)];
  std::function<void()> pending;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, &opts[i]);
    cmd->callback([&, i] {
      pending = [&, i] { subs[i].run(load_with_overrides(opts[i])); };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    pending();
  } catch (const fbqos::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const fbqos::NumericRangeError& e) {
    std::fprintf(stderr, "numeric range error: %s\n", e.what());
    return 3;
  } catch (const fbqos::InfeasibleTargetError& e) {
    std::fprintf(stderr, "infeasible target: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
