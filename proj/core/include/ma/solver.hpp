#pragma once

#include <map>
#include <optional>
#include <string>

#include "ma/barrier.hpp"
#include "ma/grid.hpp"
#include "ma/rhs.hpp"

namespace ma {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scheme { Euler, NewtonAfterEuler };

struct SolveConfig {
  Scheme scheme = Scheme::Euler;
  double h = 1.0 / 32.0;
  int stencil_width = 2;
  double dt = 0.0;          // <= 0: automatic 0.9 / Lipschitz estimate
  double tolerance = 1e-8;  // max-norm of MA^{1/n} - f^{1/n}
  int max_iterations = 400000;
  double zeta0 = 1.0;       // continuation start (singular alpha > 0 only)
  double zeta_min = 0.0;    // <= 0: automatic h^{lambda0} * min(1, amplitude)
  int boundary_points = 16; // Perron envelope members
  int newton_max_iterations = 50;
};

struct SolveReport {
  std::vector<int> stage_iterations;  // per continuation stage
  std::vector<double> stage_zeta;
  double final_residual = 0.0;
  double final_zeta = 0.0;
  double dt_used = 0.0;
  double min_u = 0.0;
  double convexity = 0.0;
  std::map<std::string, bool> flags;  // global-bound, lower-envelope, ...
  double lambda1 = 0.0, lambda2 = 0.0;  // f range over interior nodes
  double wall_seconds = 0.0;            // not serialized (determinism)
  int interior_nodes = 0;
  double h = 0.0;
  int stencil_width = 0;
  bool all_flags_pass() const {
    for (const auto& [k, v] : flags)
      if (!v) return false;
    return true;
  }
};

struct SolveResult {
  GridFunction u;
  SolveReport report;
  BarrierParams barrier;  // constants used for init and bounds
};

/// eval_f with z replaced by min(z, -zeta): continuation floor for the
/// singular |z|^{-alpha} factor. Identical to eval_f when z <= -zeta.
double regularized_rhs(const RhsSpec& spec, const ConvexDomain& domain,
                       const Vec& x, double z, const Vec& q, double zeta);

/// One explicit step u' = u + dt (MA_h[u]^{1/n} - f~^{1/n}) at interior
/// nodes; band datum reimposed afterwards.
GridFunction euler_step(const GridFunction& u, const RhsSpec& spec, double dt,
                        double zeta);

/// Monotone fixed point with zeta-continuation, initialized from the Perron
/// lower envelope; optional damped Newton once the Euler phase reaches
/// residual <= 1e3 * tolerance.
SolveResult solve(const ConvexDomain& domain, const RhsSpec& spec,
                  const SolveConfig& config);

/// A C^2 test function for the discrete comparison check.
struct TestSupersolution {
  std::function<double(const Eigen::Vector2d&)> value;
  double hessian_norm = 0.0;  // sup norm bound on D^2 phi
};

enum class ComparisonVerdict { Pass, Fail, Inapplicable };

/// Lemma-style discrete comparison: verifies MA_h[phi] < f(x,phi,Dphi) on
/// region-interior nodes and u_sub <= phi <= 0 on the region rim first;
/// then checks u_sub <= phi + 10 h^2 |D^2 phi| everywhere in the region.
/// `region` restricts the check (e.g. a ball); nullptr means the whole grid.
ComparisonVerdict check_comparison(
    const GridFunction& u_sub, const TestSupersolution& phi, const RhsSpec& spec,
    const std::function<bool(const Eigen::Vector2d&)>& region = nullptr);

/// Property-4 interior negativity bound: eta0 = min f over
/// K0 = B_r0(x0) x {-r0^2/2} x B_r0(0) by dense sampling,
/// eps0 = min{1, eta0^{1/n}}/2; returns -eps0 r0^2 / 2 (< 0).
double interior_negativity_bound(const ConvexDomain& domain, const RhsSpec& spec,
                                 const Vec& x0, double r0,
                                 int samples_per_axis = 24);
/// The eps0 used by the bound above.
double interior_negativity_eps0(const ConvexDomain& domain, const RhsSpec& spec,
                                const Vec& x0, double r0,
                                int samples_per_axis = 24);

/// [-M0 N0 l^{lambda0+1}, 0]: every solution value lies inside.
std::pair<double, double> global_bounds(const BarrierParams& params);

/// Solve twice (Perron-envelope init vs constant -diam^2 init) and return
/// the max-norm difference. Requires the strict (f2') verdict.
double uniqueness_crosscheck(const ConvexDomain& domain, const RhsSpec& spec,
                             const SolveConfig& config);

}  // namespace ma
