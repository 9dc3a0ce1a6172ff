#include "ma/analysis.hpp"

#include <cmath>

namespace ma {

namespace {

Vec to_vec(const Eigen::Vector2d& p) {
  Vec x(2);
  x << p.x(), p.y();
  return x;
}

}  // namespace

HolderFit holder_exponent_fit(const GridFunction& u, double band_lo,
                              double band_hi) {
  const Grid& g = *u.grid;
  const ConvexDomain& dom = g.domain();
  if (band_lo <= 0.0) band_lo = 2.0 * g.h();
  if (band_hi <= 0.0) band_hi = dom.diameter() / 8.0;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  std::vector<std::pair<double, double>> pts;
  for (int node : g.interior_nodes()) {
    const double d = dom.distance_to_boundary(to_vec(g.pos(node)));
    if (d < band_lo || d > band_hi) continue;
    const double au = -u[node];
    if (au <= 1e-14) continue;
    const double lx = std::log(d), ly = std::log(au);
    pts.emplace_back(lx, ly);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 20)
    throw AnalysisError("holder fit: fewer than 20 usable samples in band");
  HolderFit fit;
  fit.samples = m;
  fit.band_lo = band_lo;
  fit.band_hi = band_hi;
  const double denom = m * sxx - sx * sx;
  fit.exponent = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / m;
  fit.amplitude = std::exp(intercept);
  double rss = 0.0;
  for (auto [lx, ly] : pts) {
    const double r = ly - (intercept + fit.exponent * lx);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

InteriorBounds interior_bounds(const GridFunction& u, const RhsSpec& spec,
                               const BarrierParams& barrier, double t,
                               double zeta) {
  const Grid& g = *u.grid;
  const ConvexDomain& dom = g.domain();
  if (!(t < 0.0)) throw AnalysisError("level t must be negative");

  InteriorBounds b;
  b.t = t;
  b.eig_min = b.det_min = b.f_min = std::numeric_limits<double>::infinity();
  b.eig_max = b.det_max = b.f_max = -std::numeric_limits<double>::infinity();
  b.region_distance = std::numeric_limits<double>::infinity();

  const auto grad = gradient(u);
  const double h = g.h();
  const int nx = g.nx();
  for (int node : g.interior_nodes()) {
    if (!(u[node] < t)) continue;
    ++b.region_nodes;
    const Vec x = to_vec(g.pos(node));
    b.region_distance = std::min(b.region_distance, dom.distance_to_boundary(x));
    b.grad_max = std::max(b.grad_max, grad[node].norm());

    // 2x2 second-difference Hessian (uses band values on cut neighbors).
    const double uxx = (u[node + 1] + u[node - 1] - 2 * u[node]) / (h * h);
    const double uyy = (u[node + nx] + u[node - nx] - 2 * u[node]) / (h * h);
    const double uxy = (u[node + nx + 1] + u[node - nx - 1] - u[node + nx - 1] -
                        u[node - nx + 1]) /
                       (4 * h * h);
    const double tr = uxx + uyy;
    const double disc =
        std::sqrt(std::max(0.0, 0.25 * (uxx - uyy) * (uxx - uyy) + uxy * uxy));
    const double lo = 0.5 * tr - disc, hi = 0.5 * tr + disc;
    b.eig_min = std::min(b.eig_min, lo);
    b.eig_max = std::max(b.eig_max, hi);
    const double det = uxx * uyy - uxy * uxy;
    b.det_min = std::min(b.det_min, det);
    b.det_max = std::max(b.det_max, det);

    Vec q(2);
    q << grad[node].x(), grad[node].y();
    const double f = regularized_rhs(spec, dom, x, u[node], q, zeta);
    b.f_min = std::min(b.f_min, f);
    b.f_max = std::max(b.f_max, f);
  }
  if (b.region_nodes == 0) throw AnalysisError("empty sublevel set G_t");

  b.R0 = barrier.M0 * barrier.N0 * std::pow(barrier.l, barrier.lambda0 + 1.0) /
         b.region_distance;
  b.strictly_convex = b.eig_min > 0.0;
  b.det_in_f_range =
      b.det_min >= 0.8 * b.f_min && b.det_max <= 1.2 * b.f_max;
  b.gradient_bound = b.grad_max <= b.R0 + 2.0 * h;
  return b;
}

RefinementStudy refinement_study(
    const ConvexDomain& domain, const RhsSpec& spec, const SolveConfig& config,
    const std::vector<double>& h_values,
    const std::function<double(const Eigen::Vector2d&)>& exact) {
  RefinementStudy study;
  for (double h : h_values) {
    SolveConfig cfg = config;
    cfg.h = h;
    const SolveResult res = solve(domain, spec, cfg);
    double err = 0.0;
    for (int node : res.u.grid->interior_nodes())
      err = std::max(err, std::abs(res.u[node] - exact(res.u.grid->pos(node))));
    RefinementRow row{h, err, 0.0};
    if (!study.rows.empty()) {
      const auto& prev = study.rows.back();
      row.eoc = std::log2(prev.error / err) /
                std::log2(prev.h / h);
    }
    study.rows.push_back(row);
  }
  // Least-squares slope of log(error) against log(h).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : study.rows) {
    if (r.error <= 0.0) continue;
    const double lx = std::log(r.h), ly = std::log(r.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m >= 2) study.fitted_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return study;
}

}  // namespace ma
