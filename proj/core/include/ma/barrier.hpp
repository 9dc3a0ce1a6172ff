#pragma once

#include <cstdint>
#include <vector>

#include "ma/geometry.hpp"
#include "ma/rhs.hpp"

namespace ma {

/// Constants of the explicit boundary subsolution
///   W(x) = -M0 x_n^{lambda0} (N0^2 l^2 - r^2)^{1/2}
/// in the coordinates of `frame` (boundary point at the origin, domain in
/// {x_n >= 0}); r = |x'| is the tangential radius and l = diam(domain).
struct BarrierParams {
  int n = 2;
  double A = 1.0, alpha = 0.0, beta = 3.0, gamma = 0.0;
  double lambda0 = 0.0;  // in (0,1); lambda0(n+a-g) + n-1-b+g < 0
  double N0 = 0.0;       // sqrt(2/(1-lambda0))
  double M0 = 0.0;       // doubling choice making the product inequality hold
  double l = 0.0;        // domain diameter
  double C1 = 0.0, C2 = 0.0;
  double inequality_residual = 0.0;  // achieved product minus 1, > 0
  BoundaryFrame frame;
};

/// lambda0 = min(s,1)/2 with s = (beta+1-n-gamma)/(n+alpha-gamma);
/// satisfies lambda0(n+alpha-gamma)+n-1-beta+gamma < 0.
double choose_lambda0(int n, double alpha, double beta, double gamma);

/// N0 = sqrt(2/(1-lambda0)).
double choose_N0(double lambda0);

/// C1 = min{ (1/(l^2 M^2 l^{2l}(N^2-1)) + 1)^{-g/2} (l^2 + 1/(N^2-1)^2)^{-g/2},
///           l^{-g} }  (lower bound for (1+|DW|^2)^{-g/2} relative to (|W|/x_n)^{-g}).
double compute_C1(double lambda, double M, double N, double l, double gamma);

/// Exact minimum of (N0^2 l^2 - r^2)^{(alpha-gamma-n)/2} over r in [0, l].
double compute_C2(double N0, double l, double alpha, double gamma, int n);

struct M0Choice {
  double M0 = 0.0;
  double product = 0.0;  // achieved product, > 1
};

/// Smallest M in {2,4,8,...} making
///   A^{-1} C1(l0,M,N0,l,g) C2 (l0(1-l0)/2) M^{n+a-g} N0^2 l^{l0(n+a-g)+n+1-b+g} > 1.
M0Choice choose_M0(int n, double A, double alpha, double beta, double gamma,
                   double l, double lambda0, double N0);

/// Full barrier construction for a boundary point (optionally with an
/// explicit normal-cone direction at nonsmooth points).
BarrierParams build_barrier(const ConvexDomain& domain, int n, double A,
                            double alpha, double beta, double gamma,
                            const Vec& x0);
BarrierParams build_barrier(const ConvexDomain& domain, int n, double A,
                            double alpha, double beta, double gamma,
                            const Vec& x0, const Vec& inward_normal);

/// W at a point of the original domain (<= 0; zero iff the frame image has
/// x_n = 0). Throws GeometryError when the frame image has x_n < 0.
double eval_W(const BarrierParams& p, const Vec& x);

/// Gradient and Hessian of W in frame coordinates at a frame-interior point
/// (x_n > 0, r < N0 l). The r = 0 axis uses the analytic limit of W_r / r.
struct WDerivs {
  Vec grad;  // frame coordinates
  Mat hess;  // frame coordinates
};
WDerivs eval_W_derivs(const BarrierParams& p, const Vec& x);

/// Closed-form det D^2 W =
///   lambda0 M0^n N0^2 l^2 x_n^{n l0 - 2} (1-(1+r^2/(N0^2 l^2)) l0) (N0^2 l^2 - r^2)^{-n/2}.
double det_D2W(const BarrierParams& p, const Vec& x);

struct SubsolutionReport {
  int samples = 0;
  double min_ratio = 0.0;  // min det D^2 W / envelope(x, W, DW); pass iff > 1
  Vec argmin;
  bool pass() const { return min_ratio > 1.0; }
};

/// min over sampled interior points of det D^2 W / envelope_bound(x, W, DW).
/// The comparison is against the (f3) envelope, the worst f it allows.
SubsolutionReport verify_subsolution(const BarrierParams& p, const RhsSpec& spec,
                                     const ConvexDomain& domain, int samples,
                                     std::uint64_t seed = 2024);

/// Pointwise max of finitely many barriers, one per chosen boundary point:
/// <= 0 on the closure, = 0 at each chosen boundary point, convex on the
/// domain. All barriers share one set of constants (they depend only on the
/// envelope parameters and the diameter); only the frames differ.
class PerronEnvelope {
 public:
  PerronEnvelope(const ConvexDomain& domain, int n, double A, double alpha,
                 double beta, double gamma, int boundary_point_count);

  double eval(const Vec& x) const;
  const BarrierParams& params() const { return members_.front(); }
  const std::vector<BarrierParams>& members() const { return members_; }

 private:
  std::vector<BarrierParams> members_;
};

}  // namespace ma
