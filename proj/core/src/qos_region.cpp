#include "fbqos/qos_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbqos/numerics.hpp"
#include "fbqos/units.hpp"

namespace fbqos {

void RegionQuery::validate() const {
  if (!(level < 0.0))
    throw std::invalid_argument("RegionQuery: level u must be negative");
  if (blocklength < 1)
    throw std::invalid_argument("RegionQuery: blocklength must be >= 1");
}

Membership region_membership(const MomentSet& moments, const QosPair& qos,
                             const RegionQuery& query) {
  query.validate();
  const MonteCarloEstimate lambda = log_mgf(moments, qos, query.blocklength);
  Membership m;
  m.margin = lambda.mean - query.level;
  m.margin_std_error = lambda.std_error;
  m.member = m.margin <= 0.0;  // closed sublevel set
  m.decidable = std::abs(m.margin) >= 3.0 * lambda.std_error;
  return m;
}

Membership region_membership(const ChannelConfig& config, const QosPair& qos,
                             const RegionQuery& query, const MonteCarloSpec& spec) {
  return region_membership(sample_conditional_moments(config, spec), qos, query);
}

Membership region_membership(const StubChannel& stub, const QosPair& qos,
                             const RegionQuery& query) {
  return region_membership(stub_conditional_moments(stub), qos, query);
}

ParetoCurve pareto_boundary(const MomentSet& moments, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const BoundaryOptions& options) {
  query.validate();
  if (theta_grid.empty())
    throw std::invalid_argument("pareto_boundary: empty theta grid");
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end()))
    throw std::invalid_argument("pareto_boundary: theta grid must be sorted");
  if (options.scan_points < 2)
    throw std::invalid_argument("pareto_boundary: scan_points must be >= 2");
  const std::int64_t n = query.blocklength;
  const double lo = admissible_theta_err_min(n);
  if (!(options.theta_err_max > lo))
    throw std::invalid_argument("pareto_boundary: theta_err_max below admissible range");

  ParetoCurve curve;
  curve.level = query.level;
  const std::vector<double> scan = logspace(lo, options.theta_err_max, options.scan_points);

  for (double theta : theta_grid) {
    const auto f = [&](double theta_err) {
      return log_mgf(moments, {theta, theta_err}, n).mean - query.level;
    };
    // Residual tolerance in Lambda units: exact for stubs, one standard
    // error otherwise; bisection runs past the theta_err tolerance until
    // the residual clears it.
    const double ftol =
        moments.exact ? 1e-7
                      : std::max(1e-6, log_mgf(moments, {theta, scan[0]}, n).std_error);
    std::vector<double> roots;
    double prev_x = scan[0];
    double prev_f = f(prev_x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    for (std::size_t i = 1; i < scan.size(); ++i) {
      const double x = scan[i];
      const double fx = f(x);
      if (fx == 0.0) {
        roots.push_back(x);
      } else if ((prev_f < 0.0) != (fx < 0.0) && prev_f != 0.0) {
        roots.push_back(bisect_root(f, prev_x, x, prev_f, fx,
                                    std::min(options.tol, 1e-9), ftol, 200));
      }
      prev_x = x;
      prev_f = fx;
    }
    if (roots.empty()) {
      curve.omitted_thetas.push_back(theta);
      continue;
    }
    std::sort(roots.begin(), roots.end());
    ParetoPoint p;
    p.theta_delay = theta;
    p.theta_err = roots.front();  // closest to the unconstrained-reliability regime
    p.lambda_residual = std::abs(f(p.theta_err));
    curve.points.push_back(p);
    curve.roots_per_theta.push_back(std::move(roots));
  }
  return curve;
}

ParetoCurve pareto_boundary(const ChannelConfig& config, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const MonteCarloSpec& spec, const BoundaryOptions& options) {
  return pareto_boundary(sample_conditional_moments(config, spec), query, theta_grid,
                         options);
}

ParetoCurve pareto_boundary(const StubChannel& stub, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const BoundaryOptions& options) {
  return pareto_boundary(stub_conditional_moments(stub), query, theta_grid, options);
}

double high_snr_region_limit(const RegionQuery& query) {
  query.validate();
  return -query.level / static_cast<double>(query.blocklength);
}

double ec_rate_guarantee(const RegionQuery& query, double theta_delay) {
  query.validate();
  if (!(theta_delay > 0.0))
    throw std::invalid_argument("ec_rate_guarantee: theta_delay must be > 0");
  return -query.level / (static_cast<double>(query.blocklength) * theta_delay);
}

}  // namespace fbqos
