#pragma once

#include "ma/barrier.hpp"
#include "ma/grid.hpp"
#include "ma/solver.hpp"

namespace ma {

/// Least-squares fit of log|u| against log d_x over a boundary band:
/// the fitted exponent is compared against the barrier exponent lambda0
/// (|u| <= C d^{lambda0} near the boundary, so lambda_hat >= lambda0 is the
/// proven direction).
struct HolderFit {
  double exponent = 0.0;   // fitted lambda_hat
  double amplitude = 0.0;  // fitted C_hat
  double residual = 0.0;   // rms regression residual in log space
  double band_lo = 0.0, band_hi = 0.0;
  int samples = 0;
};

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fit over nodes with d_x in [band_lo, band_hi]. Requires >= 20 usable
/// samples (nodes with |u| <= 1e-14 are dropped). Defaults: [2h, diam/8].
HolderFit holder_exponent_fit(const GridFunction& u, double band_lo = 0.0,
                              double band_hi = 0.0);

/// Grid-scale interior regularity proxies over the sublevel set
/// G_t = {u < t}: discrete 2x2 Hessian eigenvalue range, det range vs the
/// f range (20% relative slack), gradient max vs R0.
struct InteriorBounds {
  double t = 0.0;
  int region_nodes = 0;
  double eig_min = 0.0, eig_max = 0.0;   // [m_hat, M_hat]
  double det_min = 0.0, det_max = 0.0;
  double f_min = 0.0, f_max = 0.0;       // Lambda1', Lambda2' over the region
  double grad_max = 0.0;
  double region_distance = 0.0;          // dist(G_t, boundary)
  double R0 = 0.0;                       // M0 N0 l^{lambda0+1} / dist
  bool strictly_convex = false;          // m_hat > 0
  bool det_in_f_range = false;           // with 20% relative slack
  bool gradient_bound = false;           // grad_max <= R0 (+ 2h slack)
};

InteriorBounds interior_bounds(const GridFunction& u, const RhsSpec& spec,
                               const BarrierParams& barrier, double t,
                               double zeta);

/// Max-norm errors against an exact solution over a refinement sequence,
/// with estimated orders of convergence log2(e_i / e_{i+1}).
struct RefinementRow {
  double h = 0.0;
  double error = 0.0;
  double eoc = 0.0;  // 0 for the first row
};
struct RefinementStudy {
  std::vector<RefinementRow> rows;
  double fitted_order = 0.0;  // least-squares slope of log e vs log h
};

RefinementStudy refinement_study(
    const ConvexDomain& domain, const RhsSpec& spec, const SolveConfig& config,
    const std::vector<double>& h_values,
    const std::function<double(const Eigen::Vector2d&)>& exact);

}  // namespace ma
