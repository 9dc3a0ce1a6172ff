#include "ma/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cmath>

namespace ma {

namespace {

double nth_root(double v, int n) { return std::pow(std::max(v, 0.0), 1.0 / n); }

Vec to_vec(const Eigen::Vector2d& p) {
  Vec x(2);
  x << p.x(), p.y();
  return x;
}

struct OperatorEval {
  GridFunction ma;
  std::vector<Eigen::Vector2d> grad;
  std::vector<double> f;        // regularized rhs per node (interior)
  std::vector<double> residual; // MA^{1/n} - f^{1/n}
  double max_abs_residual = 0.0;
};

OperatorEval evaluate(const GridFunction& u, const RhsSpec& spec, double zeta) {
  const Grid& g = *u.grid;
  OperatorEval ev{ma_operator(u), gradient(u),
                  std::vector<double>(g.num_nodes(), 0.0),
                  std::vector<double>(g.num_nodes(), 0.0), 0.0};
  const int n = spec.n();
  for (int node : g.interior_nodes()) {
    const Vec x = to_vec(g.pos(node));
    Vec q(2);
    q << ev.grad[node].x(), ev.grad[node].y();
    ev.f[node] = regularized_rhs(spec, g.domain(), x, u[node], q, zeta);
    ev.residual[node] = nth_root(ev.ma[node], n) - std::pow(ev.f[node], 1.0 / n);
    ev.max_abs_residual =
        std::max(ev.max_abs_residual, std::abs(ev.residual[node]));
  }
  return ev;
}

// Conservative per-node estimate of the Lipschitz bound of the update map
// G[u] = MA^{1/n} - f~^{1/n} with respect to nodal values, at the current
// iterate. Used for the explicit dt stability check; the automatic stepping
// uses the node-local bounds so a few stiff nodes near the boundary (or on
// creases of the envelope) do not throttle the whole grid.
std::vector<double> lipschitz_profile(const GridFunction& u,
                                      const RhsSpec& spec, double zeta,
                                      const OperatorEval& ev) {
  const Grid& g = *u.grid;
  const int n = spec.n();
  const double h2 = g.h() * g.h();
  std::vector<double> L(g.num_nodes(), 0.0);
  for (int node : g.interior_nodes()) {
    // MA part, at the active pair.
    double best = std::numeric_limits<double>::infinity();
    double bound = 0.0;
    for (const auto& pr : g.stencil()) {
      const double d1 = std::max(second_difference(u, node, pr[0]), 0.0);
      const double d2 = std::max(second_difference(u, node, pr[1]), 0.0);
      if (d1 * d2 < best) {
        best = d1 * d2;
        bound = d2 * 4.0 / (h2 * pr[0].squaredNorm()) +
                d1 * 4.0 / (h2 * pr[1].squaredNorm());
      }
    }
    const double ma_floor = std::max(ev.ma[node], 1e-8);
    double Li = (1.0 / n) * std::pow(ma_floor, 1.0 / n - 1.0) * bound;
    // f part: z sensitivity (gradient sensitivity is dominated by it for
    // the families shipped here; folded into the same budget).
    const Vec x = to_vec(g.pos(node));
    Vec q(2);
    q << ev.grad[node].x(), ev.grad[node].y();
    const double dz = 1e-6 * std::max(1.0, std::abs(u[node]));
    const double fp = regularized_rhs(spec, g.domain(), x, u[node] + dz, q, zeta);
    const double fm = regularized_rhs(spec, g.domain(), x, u[node] - dz, q, zeta);
    const double fz = std::abs(fp - fm) / (2.0 * dz);
    Li += (1.0 / n) * std::pow(std::max(ev.f[node], 1e-300), 1.0 / n - 1.0) * fz;
    // Curvature-scale floor: a locally flat iterate (all second differences
    // clamped to zero) has a vanishing formal derivative, but restoring
    // MA ~ f there still moves second differences at the h^2 scale.
    L[node] = std::max(Li, 4.0 / h2);
  }
  return L;
}

double lipschitz_estimate(const GridFunction& u, const RhsSpec& spec,
                          double zeta) {
  const auto prof = lipschitz_profile(u, spec, zeta, evaluate(u, spec, zeta));
  double L = 1e-6;
  for (int node : u.grid->interior_nodes()) L = std::max(L, prof[node]);
  return L;
}

struct NewtonContext {
  std::vector<int> index;  // node -> unknown index, -1 otherwise
  std::vector<int> nodes;
};

// One damped Newton sweep on the frozen active-set linearization.
// Returns true if the residual decreased.
bool newton_step(GridFunction& u, const RhsSpec& spec, double zeta,
                 const NewtonContext& ctx, double& max_resid) {
  const Grid& g = *u.grid;
  const int n = spec.n();
  const double h2 = g.h() * g.h();
  const int m = static_cast<int>(ctx.nodes.size());
  OperatorEval ev = evaluate(u, spec, zeta);

  using T = Eigen::Triplet<double>;
  std::vector<T> trip;
  trip.reserve(m * 12);
  Eigen::VectorXd rhs(m);

  auto add_entry = [&](int row, int node, double coef) {
    if (g.node_class(node) == NodeClass::Interior) {
      trip.emplace_back(row, ctx.index[node], coef);
    } else if (g.node_class(node) == NodeClass::Band) {
      const auto& info = g.band_info(node);
      if (info.anchor >= 0)
        trip.emplace_back(row, ctx.index[info.anchor], coef * info.coef);
    }
  };

  for (int row = 0; row < m; ++row) {
    const int node = ctx.nodes[row];
    rhs[row] = -ev.residual[node];
    // Active pair and clamp pattern.
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2i e1, e2;
    double d1 = 0, d2 = 0;
    for (const auto& pr : g.stencil()) {
      const double a = std::max(second_difference(u, node, pr[0]), 0.0);
      const double b = std::max(second_difference(u, node, pr[1]), 0.0);
      if (a * b < best) {
        best = a * b;
        e1 = pr[0];
        e2 = pr[1];
        d1 = a;
        d2 = b;
      }
    }
    const double ma_floor = std::max(ev.ma[node], 1e-10);
    const double rscale = (1.0 / n) * std::pow(ma_floor, 1.0 / n - 1.0);
    const int off1 = e1.y() * g.nx() + e1.x();
    const int off2 = e2.y() * g.nx() + e2.x();
    const double c1 = 1.0 / (h2 * e1.squaredNorm());
    const double c2 = 1.0 / (h2 * e2.squaredNorm());
    double diag = 0.0;
    if (d1 > 0.0) {
      add_entry(row, node + off1, rscale * d2 * c1);
      add_entry(row, node - off1, rscale * d2 * c1);
      diag += -2.0 * rscale * d2 * c1;
    }
    if (d2 > 0.0) {
      add_entry(row, node + off2, rscale * d1 * c2);
      add_entry(row, node - off2, rscale * d1 * c2);
      diag += -2.0 * rscale * d1 * c2;
    }
    // f side: z sensitivity only (the q coupling is weak for the shipped
    // families; Newton remains a pure accelerator with Euler as fallback).
    const Vec x = to_vec(g.pos(node));
    Vec q(2);
    q << ev.grad[node].x(), ev.grad[node].y();
    const double dz = 1e-6 * std::max(1.0, std::abs(u[node]));
    const double fp = regularized_rhs(spec, g.domain(), x, u[node] + dz, q, zeta);
    const double fm = regularized_rhs(spec, g.domain(), x, u[node] - dz, q, zeta);
    const double fz = (fp - fm) / (2.0 * dz);
    diag -= (1.0 / n) * std::pow(std::max(ev.f[node], 1e-300), 1.0 / n - 1.0) * fz;
    diag -= 1e-12;  // keep the diagonal away from exact zero
    trip.emplace_back(row, row, diag);
  }

  Eigen::SparseMatrix<double> J(m, m);
  J.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd delta = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !delta.allFinite()) return false;

  for (double sigma = 1.0; sigma >= 1.0 / 64.0; sigma *= 0.5) {
    GridFunction trial = u;
    for (int row = 0; row < m; ++row)
      trial[ctx.nodes[row]] =
          std::min(0.0, u[ctx.nodes[row]] + sigma * delta[row]);
    impose_boundary(trial);
    const OperatorEval tev = evaluate(trial, spec, zeta);
    if (tev.max_abs_residual < max_resid) {
      u = trial;
      max_resid = tev.max_abs_residual;
      return true;
    }
  }
  return false;
}

SolveResult solve_with_init(const ConvexDomain& domain, const RhsSpec& spec,
                            const SolveConfig& cfg, const GridFunction* init,
                            const std::shared_ptr<const Grid>& grid_in);

}  // namespace

double regularized_rhs(const RhsSpec& spec, const ConvexDomain& domain,
                       const Vec& x, double z, const Vec& q, double zeta) {
  if (!(zeta > 0.0)) throw SolveError("zeta must be positive");
  return spec.eval_f(domain, x, std::min(z, -zeta), q);
}

GridFunction euler_step(const GridFunction& u, const RhsSpec& spec, double dt,
                        double zeta) {
  const Grid& g = *u.grid;
  const OperatorEval ev = evaluate(u, spec, zeta);
  GridFunction out = u;
  for (int node : g.interior_nodes())
    out[node] = std::min(0.0, u[node] + dt * ev.residual[node]);
  impose_boundary(out);
  return out;
}

std::pair<double, double> global_bounds(const BarrierParams& p) {
  return {-p.M0 * p.N0 * std::pow(p.l, p.lambda0 + 1.0), 0.0};
}

namespace {

SolveResult solve_with_init(const ConvexDomain& domain, const RhsSpec& spec,
                            const SolveConfig& cfg, const GridFunction* init,
                            const std::shared_ptr<const Grid>& grid_in) {
  const auto t_start = std::chrono::steady_clock::now();
  if (spec.n() != 2 || domain.dim() != 2)
    throw ConfigError("the grid solver is 2D only");
  const StructureReport sr = check_structure(spec, domain, 2000);
  if (!sr.pass()) throw SolveError("structure conditions failed on sampling");

  // Barrier constants: used for the Perron envelope, eq40 and the zeta floor.
  PerronEnvelope envelope(domain, spec.n(), spec.A(), spec.alpha(), spec.beta(),
                          spec.gamma(), cfg.boundary_points);
  const BarrierParams& bp = envelope.params();

  auto grid = grid_in ? grid_in : build_grid(domain, cfg.h, cfg.stencil_width);
  GridFunction env_gf(grid);
  for (int node : grid->interior_nodes())
    env_gf[node] = envelope.eval(to_vec(grid->pos(node)));

  GridFunction u = init ? *init : env_gf;
  for (int node : grid->interior_nodes()) u[node] = std::min(0.0, u[node]);
  impose_boundary(u);

  // Continuation schedule for the singular factor.
  const auto [lower_bound, upper_bound] = global_bounds(bp);
  double zeta_min = cfg.zeta_min;
  if (zeta_min <= 0.0)
    zeta_min = std::pow(cfg.h, bp.lambda0) * std::min(1.0, -lower_bound);
  std::vector<double> zetas;
  if (spec.alpha() > 0.0) {
    for (double z = std::max(cfg.zeta0, zeta_min); z > zeta_min; z *= 0.5)
      zetas.push_back(z);
    zetas.push_back(zeta_min);
  } else {
    zetas.push_back(1e-10);
  }

  SolveReport rep;
  rep.h = grid->h();
  rep.stencil_width = grid->width();
  rep.interior_nodes = static_cast<int>(grid->interior_nodes().size());

  // Per-node steps: cfg.dt > 0 imposes a single global step (gated by the
  // stability bound); automatic mode takes dt_i = 0.9 / L_i node by node,
  // recomputed from the current iterate before every step.
  std::vector<double> dts(grid->num_nodes(), 0.0);
  auto refresh_dt = [&](double zeta, const OperatorEval& ev) {
    if (cfg.dt > 0.0) {
      for (int node : grid->interior_nodes()) dts[node] = cfg.dt;
      rep.dt_used = cfg.dt;
      return;
    }
    const auto prof = lipschitz_profile(u, spec, zeta, ev);
    double dt_min = std::numeric_limits<double>::infinity();
    for (int node : grid->interior_nodes()) {
      dts[node] = 0.9 / prof[node];
      dt_min = std::min(dt_min, dts[node]);
    }
    rep.dt_used = dt_min;
  };

  for (double zeta : zetas) {
    if (cfg.dt > 0.0 && cfg.dt * lipschitz_estimate(u, spec, zeta) >= 1.0)
      throw ConfigError("dt violates the stability bound dt*L < 1");

    OperatorEval ev = evaluate(u, spec, zeta);
    double resid = ev.max_abs_residual;
    double prev = resid;
    int grow_streak = 0;
    int iters = 0;
    bool newton_phase = false;
    NewtonContext ctx;
    while (resid > cfg.tolerance) {
      if (iters >= cfg.max_iterations)
        throw SolveError("max iterations exceeded (residual " +
                         std::to_string(resid) + ")");
      if (cfg.scheme == Scheme::NewtonAfterEuler && !newton_phase &&
          resid <= 1e3 * cfg.tolerance) {
        newton_phase = true;
        ctx.index.assign(grid->num_nodes(), -1);
        for (int node : grid->interior_nodes()) {
          ctx.index[node] = static_cast<int>(ctx.nodes.size());
          ctx.nodes.push_back(node);
        }
      }
      bool stepped = false;
      if (newton_phase) {
        int nit = 0;
        while (resid > cfg.tolerance && nit++ < cfg.newton_max_iterations) {
          if (!newton_step(u, spec, zeta, ctx, resid)) break;
          stepped = true;
        }
        if (resid <= cfg.tolerance) break;
        newton_phase = stepped;  // retry later only if it made progress
        if (stepped) ev = evaluate(u, spec, zeta);
      }
      refresh_dt(zeta, ev);
      for (int node : grid->interior_nodes())
        u[node] = std::min(0.0, u[node] + dts[node] * ev.residual[node]);
      impose_boundary(u);
      ev = evaluate(u, spec, zeta);
      resid = ev.max_abs_residual;
      ++iters;
      if (resid > prev * (1.0 + 1e-12)) {
        if (++grow_streak >= 100)
          throw SolveError("divergence: residual grew for 100 iterations "
                           "(residual " + std::to_string(resid) + ")");
      } else {
        grow_streak = 0;
      }
      prev = resid;
    }
    rep.stage_iterations.push_back(iters);
    rep.stage_zeta.push_back(zeta);
    rep.final_zeta = zeta;
    rep.final_residual = resid;
  }

  // Diagnostics and bound flags.
  const double zeta = rep.final_zeta;
  const OperatorEval ev = evaluate(u, spec, zeta);
  rep.lambda1 = std::numeric_limits<double>::infinity();
  rep.lambda2 = -std::numeric_limits<double>::infinity();
  rep.min_u = 0.0;
  double env_violation = 0.0;
  for (int node : grid->interior_nodes()) {
    rep.lambda1 = std::min(rep.lambda1, ev.f[node]);
    rep.lambda2 = std::max(rep.lambda2, ev.f[node]);
    rep.min_u = std::min(rep.min_u, u[node]);
    env_violation = std::max(env_violation, env_gf[node] - u[node]);
  }
  rep.convexity = convexity_defect(u);
  rep.flags["global-bound"] =
      rep.min_u >= lower_bound - grid->h() && rep.min_u <= 0.0;
  rep.flags["lower-envelope"] = env_violation <= 10.0 * grid->h();
  rep.flags["convexity-defect"] = rep.convexity <= 10.0 * cfg.tolerance;
  rep.flags["residual"] = rep.final_residual <= cfg.tolerance;

  // Interior negativity (Property 4) on the deepest inscribed ball half.
  {
    double best_d = 0.0;
    int best_node = grid->interior_nodes().front();
    for (int node : grid->interior_nodes()) {
      const double d = domain.distance_to_boundary(to_vec(grid->pos(node)));
      if (d > best_d) {
        best_d = d;
        best_node = node;
      }
    }
    const double r0 = 0.5 * best_d;
    const Vec x0 = to_vec(grid->pos(best_node));
    const double bound = interior_negativity_bound(domain, spec, x0, r0);
    rep.flags["interior-negativity"] = u[best_node] <= bound;

    // Comparison oracle against eps0 * phi0 on that ball (Property 4 proof).
    const double eps0 = interior_negativity_eps0(domain, spec, x0, r0);
    const Eigen::Vector2d c0(x0[0], x0[1]);
    TestSupersolution phi{
        [eps0, r0, c0](const Eigen::Vector2d& p) {
          return eps0 * (-0.5 * r0 * r0 + 0.5 * (p - c0).squaredNorm());
        },
        eps0};
    const auto verdict = check_comparison(
        u, phi, spec,
        [r0, c0](const Eigen::Vector2d& p) { return (p - c0).norm() < r0; });
    rep.flags["comparison-oracle"] = verdict != ComparisonVerdict::Fail;
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return SolveResult{std::move(u), std::move(rep), bp};
}

}  // namespace

SolveResult solve(const ConvexDomain& domain, const RhsSpec& spec,
                  const SolveConfig& config) {
  return solve_with_init(domain, spec, config, nullptr, nullptr);
}

ComparisonVerdict check_comparison(
    const GridFunction& u_sub, const TestSupersolution& phi, const RhsSpec& spec,
    const std::function<bool(const Eigen::Vector2d&)>& region) {
  const Grid& g = *u_sub.grid;
  auto in_region = [&](int node) {
    return region ? region(g.pos(node)) : true;
  };
  // Region nodes split into core (full stencil inside) and rim.
  std::vector<int> core, rim;
  for (int node : g.interior_nodes()) {
    if (!in_region(node)) continue;
    bool full = true;
    for (const auto& e : g.directions()) {
      const int off = e.y() * g.nx() + e.x();
      for (int nb : {node + off, node - off}) {
        if (g.node_class(nb) == NodeClass::Exterior || !in_region(nb)) {
          full = false;
          break;
        }
      }
      if (!full) break;
    }
    (full ? core : rim).push_back(node);
  }
  if (!region) {
    // Whole-grid mode: the rim is the boundary band.
    for (int node : g.band_nodes()) rim.push_back(node);
  }
  if (core.empty() || rim.empty()) return ComparisonVerdict::Inapplicable;

  GridFunction phi_gf(u_sub.grid);
  for (int node = 0; node < g.num_nodes(); ++node)
    if (g.node_class(node) != NodeClass::Exterior)
      phi_gf[node] = phi.value(g.pos(node));
  const GridFunction ma_phi = ma_operator(phi_gf);
  const auto grad_phi = gradient(phi_gf);

  // Preconditions: strict supersolution on the core, ordering on the rim.
  for (int node : core) {
    Vec x = to_vec(g.pos(node));
    Vec q(2);
    q << grad_phi[node].x(), grad_phi[node].y();
    const double z = std::min(phi_gf[node], -1e-12);
    if (!(ma_phi[node] < spec.eval_f(g.domain(), x, z, q)))
      return ComparisonVerdict::Inapplicable;
  }
  for (int node : rim)
    if (!(u_sub[node] <= phi_gf[node] + 1e-12 && phi_gf[node] <= 1e-12))
      return ComparisonVerdict::Inapplicable;

  const double tol = 10.0 * g.h() * g.h() * phi.hessian_norm;
  for (int node : core)
    if (u_sub[node] > phi_gf[node] + tol) return ComparisonVerdict::Fail;
  return ComparisonVerdict::Pass;
}

static double negativity_eta0(const ConvexDomain& domain, const RhsSpec& spec,
                              const Vec& x0, double r0, int per_axis) {
  const int n = domain.dim();
  // Closed ball containment check.
  const double d0 = domain.distance_to_boundary(x0);
  if (d0 < r0 - kGeomTol)
    throw GeometryError("ball B_r0(x0) is not contained in the domain");
  const double z = -0.5 * r0 * r0;
  double eta = std::numeric_limits<double>::infinity();
  // Dense lattice over B_r0(x0) x B_r0(0).
  std::vector<Vec> xs, qs;
  auto lattice = [&](double radius, const Vec& center, std::vector<Vec>& out) {
    std::vector<int> ix(n, 0);
    const int m = per_axis;
    for (;;) {
      Vec p(n);
      for (int i = 0; i < n; ++i)
        p[i] = center[i] + radius * (2.0 * ix[i] / (m - 1.0) - 1.0);
      if ((p - center).norm() <= radius + 1e-12) out.push_back(p);
      int k = 0;
      while (k < n && ++ix[k] == m) ix[k++] = 0;
      if (k == n) break;
    }
  };
  lattice(r0, x0, xs);
  lattice(r0, Vec::Zero(n), qs);
  for (const auto& x : xs) {
    if (domain.contains(x) == Membership::Exterior) continue;
    if (domain.contains(x) != Membership::Interior) continue;
    for (const auto& q : qs) eta = std::min(eta, spec.eval_f(domain, x, z, q));
  }
  if (!std::isfinite(eta)) throw GeometryError("empty sample set for eta0");
  return eta;
}

double interior_negativity_eps0(const ConvexDomain& domain, const RhsSpec& spec,
                                const Vec& x0, double r0, int per_axis) {
  const double eta0 = negativity_eta0(domain, spec, x0, r0, per_axis);
  return 0.5 * std::min(1.0, std::pow(eta0, 1.0 / domain.dim()));
}

double interior_negativity_bound(const ConvexDomain& domain, const RhsSpec& spec,
                                 const Vec& x0, double r0, int per_axis) {
  return -0.5 * interior_negativity_eps0(domain, spec, x0, r0, per_axis) * r0 *
         r0;
}

double uniqueness_crosscheck(const ConvexDomain& domain, const RhsSpec& spec,
                             const SolveConfig& config) {
  const StructureReport sr = check_structure(spec, domain, 5000);
  if (!sr.strictly_monotone_pass || !spec.claims_f2_strict())
    throw SolveError(
        "uniqueness_crosscheck inapplicable: (f2') strict monotonicity not "
        "established");
  auto grid = build_grid(domain, config.h, config.stencil_width);
  SolveResult a = solve_with_init(domain, spec, config, nullptr, grid);
  const double diam = domain.diameter();
  GridFunction flat(grid);
  for (int node : grid->interior_nodes()) flat[node] = -diam * diam;
  impose_boundary(flat);
  SolveResult b = solve_with_init(domain, spec, config, &flat, grid);
  double diff = 0.0;
  for (int node : grid->interior_nodes())
    diff = std::max(diff, std::abs(a.u[node] - b.u[node]));
  return diff;
}

}  // namespace ma
