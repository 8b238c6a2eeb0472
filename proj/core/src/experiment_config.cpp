#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "fbqos/experiment.hpp"
#include "fbqos/numerics.hpp"

namespace fbqos {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ParseContext {
  std::string filename;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(filename + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const ParseContext& ctx, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) ctx.fail("trailing characters in number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    ctx.fail("expected a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const ParseContext& ctx, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) ctx.fail("trailing characters in integer '" + v + "'");
    return static_cast<std::int64_t>(x);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    ctx.fail("expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const ParseContext& ctx, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  ctx.fail("expected a boolean, got '" + v + "'");
}

// Grids: either a comma list "0.1,0.2,0.5" or a range "lin:lo:hi:count" /
// "log:lo:hi:count".
std::vector<double> parse_grid(const ParseContext& ctx, const std::string& v) {
  std::vector<double> out;
  if (v.rfind("lin:", 0) == 0 || v.rfind("log:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 4) ctx.fail("range grid needs form kind:lo:hi:count");
    const double lo = parse_double(ctx, parts[1]);
    const double hi = parse_double(ctx, parts[2]);
    const auto count = static_cast<int>(parse_int(ctx, parts[3]));
    if (count < 1) ctx.fail("grid count must be >= 1");
    try {
      out = parts[0] == "lin" ? linspace(lo, hi, count) : logspace(lo, hi, count);
    } catch (const std::exception& e) {
      ctx.fail(e.what());
    }
    return out;
  }
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) ctx.fail("empty grid element");
    out.push_back(parse_double(ctx, t));
  }
  if (out.empty()) ctx.fail("empty grid");
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& filename) {
  ExperimentConfig cfg;
  cfg.config_hash = fnv1a64(text);
  std::set<std::string> seen;  // "section.key"
  std::string section;
  ParseContext ctx{filename, 0};

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> kSections = {
          "channel", "mc", "experiment", "grids", "queue", "pareto", "tradeoff",
          "metadata"};
      if (!kSections.count(section)) ctx.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (value.empty()) ctx.fail("empty value for key '" + key + "'");
    if (section.empty()) ctx.fail("key '" + key + "' outside any section");
    const std::string qualified = section + "." + key;
    if (!seen.insert(qualified).second) ctx.fail("duplicate key '" + qualified + "'");

    if (section == "channel") {
      if (key == "model") {
        if (value == "rayleigh")
          cfg.model = ChannelModelKind::rayleigh;
        else if (value == "stub")
          cfg.model = ChannelModelKind::stub;
        else
          ctx.fail("channel model must be rayleigh or stub");
      } else if (key == "n_tx") {
        cfg.channel.n_tx = static_cast<int>(parse_int(ctx, value));
      } else if (key == "n_rx") {
        cfg.channel.n_rx = static_cast<int>(parse_int(ctx, value));
      } else if (key == "power") {
        cfg.channel.power = parse_double(ctx, value);
      } else if (key == "distance") {
        cfg.channel.distance = parse_double(ctx, value);
      } else if (key == "path_exponent") {
        cfg.channel.path_exponent = parse_double(ctx, value);
      } else if (key == "noise_power") {
        cfg.channel.noise_power = parse_double(ctx, value);
      } else if (key == "large_scale") {
        cfg.channel.large_scale = parse_double(ctx, value);
      } else if (key == "capacity") {
        cfg.stub.capacity = parse_double(ctx, value);
      } else if (key == "dispersion") {
        cfg.stub.dispersion = parse_double(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [channel]");
      }
    } else if (section == "mc") {
      if (key == "samples") {
        cfg.mc.samples = parse_int(ctx, value);
      } else if (key == "seed") {
        cfg.mc.seed = static_cast<std::uint64_t>(parse_int(ctx, value));
      } else if (key == "antithetic") {
        cfg.mc.antithetic = parse_bool(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [mc]");
      }
    } else if (section == "experiment") {
      if (key == "blocklength") {
        cfg.blocklength = parse_int(ctx, value);
      } else if (key == "output") {
        cfg.output_path = value;
      } else if (key == "format") {
        if (value == "csv")
          cfg.format = OutputFormat::csv;
        else if (value == "json")
          cfg.format = OutputFormat::json;
        else
          ctx.fail("format must be csv or json");
      } else {
        ctx.fail("unknown key '" + key + "' in section [experiment]");
      }
    } else if (section == "grids") {
      if (key == "rate") {
        cfg.rate_grid = parse_grid(ctx, value);
      } else if (key == "theta") {
        cfg.theta_grid = parse_grid(ctx, value);
      } else if (key == "theta_err") {
        cfg.theta_err_grid = parse_grid(ctx, value);
      } else if (key == "u_levels") {
        cfg.u_levels = parse_grid(ctx, value);
      } else if (key == "eps") {
        cfg.eps_grid = parse_grid(ctx, value);
      } else if (key == "blocklength") {
        for (double x : parse_grid(ctx, value)) {
          if (x != std::floor(x)) ctx.fail("blocklength grid entries must be integers");
          cfg.blocklength_grid.push_back(static_cast<std::int64_t>(x));
        }
      } else {
        ctx.fail("unknown key '" + key + "' in section [grids]");
      }
    } else if (section == "queue") {
      if (key == "arrival_rate") {
        cfg.queue_arrival_rate = parse_double(ctx, value);
      } else if (key == "arrival_fraction") {
        cfg.queue_arrival_fraction = parse_double(ctx, value);
      } else if (key == "blocks") {
        cfg.queue_blocks = parse_int(ctx, value);
      } else if (key == "theta") {
        cfg.queue_theta = parse_double(ctx, value);
      } else if (key == "theta_err") {
        cfg.queue_theta_err = parse_double(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [queue]");
      }
    } else if (section == "pareto") {
      if (key == "theta_err_max") {
        cfg.boundary_theta_err_max = parse_double(ctx, value);
      } else if (key == "scan_points") {
        cfg.boundary_scan_points = static_cast<int>(parse_int(ctx, value));
      } else if (key == "emit_membership") {
        cfg.emit_membership = parse_bool(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [pareto]");
      }
    } else if (section == "tradeoff") {
      if (key == "sweep") {
        if (value == "theta")
          cfg.sweep = TradeoffSweep::theta;
        else if (value == "eps")
          cfg.sweep = TradeoffSweep::eps;
        else
          ctx.fail("sweep must be theta or eps");
      } else if (key == "theta_err_max") {
        cfg.tradeoff_theta_err_max = parse_double(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [tradeoff]");
      }
    } else if (section == "metadata") {
      if (key == "num_devices") {
        cfg.num_devices = parse_int(ctx, value);
      } else if (key == "packet_size_bits") {
        cfg.packet_size_bits = parse_double(ctx, value);
      } else {
        ctx.fail("unknown key '" + key + "' in section [metadata]");
      }
    }
  }

  // Model-specific key hygiene: a stub channel must not carry physical
  // keys and vice versa, so figure configs cannot silently mix models.
  const auto used = [&seen](const std::string& k) { return seen.count("channel." + k) > 0; };
  if (cfg.model == ChannelModelKind::stub) {
    for (const char* k : {"n_tx", "n_rx", "power", "distance", "path_exponent",
                          "noise_power", "large_scale"})
      if (used(k))
        throw ConfigError(filename + ": key channel." + k +
                          " is not valid for model = stub");
    if (!used("capacity"))
      throw ConfigError(filename + ": model = stub requires channel.capacity");
  } else {
    for (const char* k : {"capacity", "dispersion"})
      if (used(k))
        throw ConfigError(filename + ": key channel." + k +
                          " is only valid for model = stub");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

}  // namespace fbqos
