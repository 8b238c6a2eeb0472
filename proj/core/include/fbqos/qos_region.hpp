#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbqos/effective_capacity.hpp"

namespace fbqos {

struct RegionQuery {
  double level = -1.0;  // u < 0
  std::int64_t blocklength = 0;

  void validate() const;
};

struct Membership {
  bool member = false;
  double margin = 0.0;  // Lambda - u; membership is margin <= 0
  double margin_std_error = 0.0;
  bool decidable = true;  // |margin| >= 3 stderr
};

Membership region_membership(const ChannelConfig& config, const QosPair& qos,
                             const RegionQuery& query, const MonteCarloSpec& spec);
Membership region_membership(const StubChannel& stub, const QosPair& qos,
                             const RegionQuery& query);
Membership region_membership(const MomentSet& moments, const QosPair& qos,
                             const RegionQuery& query);

struct ParetoPoint {
  double theta_delay = 0.0;
  double theta_err = 0.0;
  double lambda_residual = 0.0;  // |Lambda(theta, theta_err) - u|
};

struct BoundaryOptions {
  double theta_err_max = 1.0;
  int scan_points = 64;  // logarithmic bracket scan resolution
  double tol = 1e-6;     // bisection tolerance in theta_err
};

// Boundary trace of {Lambda <= u}. Lambda is not monotone in theta_err, so
// every sign change on the scan grid is bisected; the curve keeps the
// smallest root per theta and records the rest, and thetas without any
// root are reported rather than failed.
struct ParetoCurve {
  std::vector<ParetoPoint> points;  // theta_delay strictly increasing
  double level = 0.0;
  std::vector<double> omitted_thetas;
  std::vector<std::vector<double>> roots_per_theta;  // aligned with points
};

ParetoCurve pareto_boundary(const ChannelConfig& config, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const MonteCarloSpec& spec,
                            const BoundaryOptions& options = {});
ParetoCurve pareto_boundary(const StubChannel& stub, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const BoundaryOptions& options = {});
ParetoCurve pareto_boundary(const MomentSet& moments, const RegionQuery& query,
                            std::span<const double> theta_grid,
                            const BoundaryOptions& options = {});

// Theorem-3 asymptote: the region collapses to {theta_err <= -u/n}.
double high_snr_region_limit(const RegionQuery& query);

// Effective-capacity floor implied by membership at level u: -u/(n theta).
double ec_rate_guarantee(const RegionQuery& query, double theta_delay);

}  // namespace fbqos
