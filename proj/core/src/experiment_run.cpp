#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fbqos/effective_capacity.hpp"
#include "fbqos/error_exponent.hpp"
#include "fbqos/experiment.hpp"
#include "fbqos/numerics.hpp"
#include "fbqos/qos_region.hpp"
#include "fbqos/queue_sim.hpp"
#include "fbqos/units.hpp"
#include "fbqos/version.hpp"

namespace fbqos {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One output table; cells are json values so both writers share the rows.
struct Table {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> diagnostics;
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
};

std::string render_csv(const Table& t) {
  std::string out;
  out += "# fbqos " + t.experiment + "\n";
  for (const auto& [k, v] : t.provenance) out += "# " + k + " = " + v + "\n";
  for (const auto& d : t.diagnostics) out += "# diagnostic: " + d + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ",";
    out += t.columns[i];
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      const auto& cell = row[i];
      if (cell.is_null())
        ;  // empty cell
      else if (cell.is_number_float())
        out += fmt17(cell.get<double>());
      else if (cell.is_number_integer())
        out += std::to_string(cell.get<std::int64_t>());
      else if (cell.is_boolean())
        out += cell.get<bool>() ? "true" : "false";
      else
        out += cell.get<std::string>();
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const Table& t) {
  ordered_json doc;
  doc["experiment"] = t.experiment;
  ordered_json prov;
  for (const auto& [k, v] : t.provenance) prov[k] = v;
  doc["provenance"] = std::move(prov);
  doc["diagnostics"] = t.diagnostics;
  doc["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json r = ordered_json::array();
    for (const auto& cell : row) r.push_back(cell);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_table(const ExperimentConfig& cfg, const Table& t) {
  if (cfg.output_path.empty())
    throw ConfigError("no output path: set [experiment] output or pass --out");
  const std::filesystem::path path(cfg.output_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + cfg.output_path);
  out << (cfg.format == OutputFormat::csv ? render_csv(t) : render_json(t));
}

char hex_digit(unsigned v) { return v < 10 ? char('0' + v) : char('a' + v - 10); }

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hex_digit(static_cast<unsigned>(v & 0xF));
    v >>= 4;
  }
  return s;
}

Table make_table(const ExperimentConfig& cfg, const std::string& experiment) {
  Table t;
  t.experiment = experiment;
  t.provenance = {
      {"version", kVersion},
      {"config_hash", hex64(cfg.config_hash)},
      {"seed", std::to_string(cfg.mc.seed)},
      {"samples", std::to_string(cfg.mc.samples)},
      {"blocklength", std::to_string(cfg.blocklength)},
      {"model", cfg.model == ChannelModelKind::stub ? "stub" : "rayleigh"},
  };
  return t;
}

void require_grid(const std::vector<double>& grid, const std::string& name) {
  if (grid.empty()) throw ConfigError("grid '" + name + "' is required and empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ConfigError("grid '" + name + "' must be sorted ascending");
}

MomentSet moments_for(const ExperimentConfig& cfg) {
  if (cfg.model == ChannelModelKind::stub) return stub_conditional_moments(cfg.stub);
  return sample_conditional_moments(cfg.channel, cfg.mc);
}

void require_admissible_theta_err(const std::vector<double>& grid, std::int64_t n) {
  const double lo = admissible_theta_err_min(n);
  for (double t : grid)
    if (t < lo)
      throw ConfigError("theta_err " + fmt17(t) + " below the admissible minimum " +
                        fmt17(lo) + " for blocklength " + std::to_string(n));
}

}  // namespace

void cmd_exponent_curve(const ExperimentConfig& cfg) {
  if (cfg.model == ChannelModelKind::stub)
    throw ConfigError("exponent-curve needs eigenvalue spectra; model = stub is not supported");
  require_grid(cfg.rate_grid, "rate");
  const MonteCarloEstimate cap = ergodic_capacity(cfg.channel, cfg.mc);
  for (double r : cfg.rate_grid)
    if (r < 0.0 || r > cap.mean)
      throw ConfigError("rate " + fmt17(r) + " outside [0, capacity estimate " +
                        fmt17(cap.mean) + "]");

  Table t = make_table(cfg, "exponent-curve");
  t.provenance.emplace_back("capacity_estimate", fmt17(cap.mean));
  t.columns = {"rate", "theta_err_exact", "theta_err_approx", "rho_star", "std_error"};
  for (double rate : cfg.rate_grid) {
    const ExponentResult exact = error_exponent(cfg.channel, rate, cfg.blocklength, cfg.mc);
    const double approx = approx_error_exponent(cfg.channel, rate, cfg.blocklength, cfg.mc);
    t.rows.push_back({rate, exact.theta_err, approx, exact.rho_star,
                      exact.theta_err_std_error});
  }
  write_table(cfg, t);
}

void cmd_ec_surface(const ExperimentConfig& cfg) {
  require_grid(cfg.theta_grid, "theta");
  require_grid(cfg.theta_err_grid, "theta_err");
  require_admissible_theta_err(cfg.theta_err_grid, cfg.blocklength);
  const MomentSet moments = moments_for(cfg);

  Table t = make_table(cfg, "ec-surface");
  t.columns = {"kind", "theta_delay", "theta_err", "ec", "lambda", "lambda_std_error"};
  for (double theta : cfg.theta_grid) {
    for (double te : cfg.theta_err_grid) {
      const EcSurfacePoint p =
          epsilon_effective_capacity(moments, {theta, te}, cfg.blocklength);
      t.rows.push_back({"grid", theta, te, p.ec, p.lambda, p.lambda_std_error});
    }
  }
  // Per-theta argmax over the theta_err grid, the surface ridge.
  for (double theta : cfg.theta_grid) {
    EcSurfacePoint best{};
    bool first = true;
    for (double te : cfg.theta_err_grid) {
      const EcSurfacePoint p =
          epsilon_effective_capacity(moments, {theta, te}, cfg.blocklength);
      if (first || p.ec > best.ec) {
        best = p;
        first = false;
      }
    }
    t.rows.push_back({"ridge", theta, best.qos.theta_err, best.ec, best.lambda,
                      best.lambda_std_error});
  }
  write_table(cfg, t);
}

void cmd_pareto(const ExperimentConfig& cfg) {
  require_grid(cfg.theta_grid, "theta");
  require_grid(cfg.u_levels, "u_levels");
  for (double u : cfg.u_levels)
    if (!(u < 0.0)) throw ConfigError("u level " + fmt17(u) + " must be negative");
  const MomentSet moments = moments_for(cfg);
  BoundaryOptions options;
  options.theta_err_max = cfg.boundary_theta_err_max;
  options.scan_points = cfg.boundary_scan_points;

  Table t = make_table(cfg, "pareto");
  t.columns = {"kind", "level", "theta_delay", "theta_err", "lambda_residual", "margin"};
  for (double u : cfg.u_levels) {
    const RegionQuery query{u, cfg.blocklength};
    const ParetoCurve curve = pareto_boundary(moments, query, cfg.theta_grid, options);
    for (const auto& p : curve.points)
      t.rows.push_back({"boundary", u, p.theta_delay, p.theta_err, p.lambda_residual,
                        nullptr});
    for (double theta : curve.omitted_thetas)
      t.diagnostics.push_back("no boundary root at theta = " + fmt17(theta) +
                              " for u = " + fmt17(u));
    if (curve.points.empty())
      t.diagnostics.push_back("empty boundary for u = " + fmt17(u));
  }
  if (cfg.emit_membership) {
    require_grid(cfg.theta_err_grid, "theta_err");
    require_admissible_theta_err(cfg.theta_err_grid, cfg.blocklength);
    for (double u : cfg.u_levels) {
      const RegionQuery query{u, cfg.blocklength};
      for (double theta : cfg.theta_grid)
        for (double te : cfg.theta_err_grid) {
          const Membership m = region_membership(moments, {theta, te}, query);
          t.rows.push_back({m.member ? "member" : "outside", u, theta, te, nullptr,
                            m.margin});
        }
    }
  }
  write_table(cfg, t);
}

void cmd_tradeoff(const ExperimentConfig& cfg) {
  const MomentSet moments = moments_for(cfg);
  Table t = make_table(cfg, "tradeoff");
  if (cfg.sweep == TradeoffSweep::theta) {
    require_grid(cfg.theta_grid, "theta");
    t.columns = {"theta_delay", "theta_err_star", "ec_star", "flat_objective"};
    for (double theta : cfg.theta_grid) {
      const OptimalReliability opt = optimal_reliability_exponent(
          moments, theta, cfg.blocklength, cfg.tradeoff_theta_err_max);
      t.rows.push_back({theta, opt.theta_err, opt.ec, opt.flat_objective});
    }
  } else {
    // Alternative reading of the sweep axis: fix theta, sweep the decoding
    // error probability and report EC along theta_err = -ln(eps)/n.
    require_grid(cfg.theta_grid, "theta");
    require_grid(cfg.eps_grid, "eps");
    const double theta = cfg.theta_grid.front();
    t.provenance.emplace_back("sweep", "eps");
    t.provenance.emplace_back("theta_delay", fmt17(theta));
    t.columns = {"eps", "theta_err", "ec"};
    for (double eps : cfg.eps_grid) {
      if (!(eps > 0.0) || !(eps < 0.5))
        throw ConfigError("eps " + fmt17(eps) + " must lie in (0, 0.5) for admissibility");
      const double te = -std::log(eps) / static_cast<double>(cfg.blocklength);
      const EcSurfacePoint p =
          epsilon_effective_capacity(moments, {theta, te}, cfg.blocklength);
      t.rows.push_back({eps, te, p.ec});
    }
  }
  write_table(cfg, t);
}

void cmd_queue_validate(const ExperimentConfig& cfg) {
  if (cfg.queue_arrival_rate >= 0.0 && cfg.queue_arrival_fraction >= 0.0)
    throw ConfigError("set only one of queue.arrival_rate and queue.arrival_fraction");
  double arrival = cfg.queue_arrival_rate;
  Table t = make_table(cfg, "queue-validate");
  if (arrival < 0.0) {
    if (cfg.queue_arrival_fraction < 0.0)
      throw ConfigError("queue.arrival_rate or queue.arrival_fraction is required");
    const MomentSet moments = moments_for(cfg);
    const EcSurfacePoint p = epsilon_effective_capacity(
        moments, {cfg.queue_theta, cfg.queue_theta_err}, cfg.blocklength);
    arrival = cfg.queue_arrival_fraction * static_cast<double>(cfg.blocklength) * p.ec;
    t.provenance.emplace_back("effective_capacity", fmt17(p.ec));
  }
  t.provenance.emplace_back("arrival_rate", fmt17(arrival));

  const QueueTrace trace =
      cfg.model == ChannelModelKind::stub
          ? simulate_queue(cfg.stub, arrival, cfg.queue_theta_err, cfg.blocklength,
                           cfg.queue_blocks, cfg.mc.seed)
          : simulate_queue(cfg.channel, arrival, cfg.queue_theta_err, cfg.blocklength,
                           cfg.queue_blocks, cfg.mc.seed);

  t.columns = {"kind", "threshold", "overflow_prob", "log_prob", "exceed_count"};
  for (std::size_t i = 0; i < trace.thresholds.size(); ++i) {
    const double p = trace.overflow_probs[i];
    t.rows.push_back({"trace", trace.thresholds[i], p,
                      p > 0.0 ? ordered_json(std::log(p)) : ordered_json(nullptr),
                      trace.exceed_counts[i]});
  }
  const double target = cfg.queue_theta * queue_theta_scale();
  t.provenance.emplace_back("target_theta_scaled", fmt17(target));
  if (trace.fitted_exponent) {
    t.provenance.emplace_back("fitted_exponent", fmt17(*trace.fitted_exponent));
    t.provenance.emplace_back("fit_r_squared", fmt17(trace.fit_r_squared));
  } else {
    t.diagnostics.push_back("insufficient exceedance events for exponent fitting");
  }
  write_table(cfg, t);
}

void cmd_rate_curve(const ExperimentConfig& cfg) {
  if (cfg.blocklength_grid.empty())
    throw ConfigError("grid 'blocklength' is required and empty");
  if (!std::is_sorted(cfg.blocklength_grid.begin(), cfg.blocklength_grid.end()))
    throw ConfigError("grid 'blocklength' must be sorted ascending");
  require_grid(cfg.eps_grid, "eps");
  for (double e : cfg.eps_grid)
    if (!(e > 0.0) || !(e < 1.0))
      throw ConfigError("eps " + fmt17(e) + " must lie in (0, 1)");
  const MomentSet moments = moments_for(cfg);

  Table t = make_table(cfg, "rate-curve");
  t.columns = {"blocklength", "eps", "rate", "residual"};
  for (std::int64_t n : cfg.blocklength_grid)
    for (double eps : cfg.eps_grid) {
      const RatePoint p = solve_normal_approx_rate(moments, n, eps);
      t.rows.push_back({n, eps, p.rate, p.residual});
    }
  write_table(cfg, t);
}

}  // namespace fbqos
