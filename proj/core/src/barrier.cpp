#include "ma/barrier.hpp"

#include <cmath>
#include <random>

namespace ma {

double choose_lambda0(int n, double alpha, double beta, double gamma) {
  if (beta < n + 1) throw StructureError("beta >= n+1 required");
  if (gamma >= std::min(n + alpha, beta - n + 1.0))
    throw StructureError("gamma < min{n+alpha, beta-n+1} required");
  const double s = (beta + 1.0 - n - gamma) / (n + alpha - gamma);
  const double lambda0 = 0.5 * std::min(s, 1.0);
  // By construction lambda0 < s, i.e. the strict inequality holds.
  if (!(lambda0 * (n + alpha - gamma) + n - 1.0 - beta + gamma < 0.0))
    throw StructureError("lambda0 inequality violated");
  return lambda0;
}

double choose_N0(double lambda0) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0))
    throw StructureError("lambda0 must lie in (0,1)");
  return std::sqrt(2.0 / (1.0 - lambda0));
}

double compute_C1(double lambda, double M, double N, double l, double gamma) {
  const double nm1 = N * N - 1.0;
  const double first =
      std::pow(1.0 / (lambda * lambda * M * M * std::pow(l, 2.0 * lambda) * nm1) + 1.0,
               -0.5 * gamma) *
      std::pow(lambda * lambda + 1.0 / (nm1 * nm1), -0.5 * gamma);
  const double second = std::pow(lambda, -gamma);
  return std::min(first, second);
}

double compute_C2(double N0, double l, double alpha, double gamma, int n) {
  const double e = 0.5 * (alpha - gamma - n);
  const double base = e >= 0.0 ? (N0 * N0 - 1.0) * l * l : N0 * N0 * l * l;
  return std::pow(base, e);
}

M0Choice choose_M0(int n, double A, double alpha, double beta, double gamma,
                   double l, double lambda0, double N0) {
  const double C2 = compute_C2(N0, l, alpha, gamma, n);
  const double lexp = lambda0 * (n + alpha - gamma) + n + 1.0 - beta + gamma;
  const double fixed =
      (1.0 / A) * C2 * 0.5 * lambda0 * (1.0 - lambda0) * N0 * N0 * std::pow(l, lexp);
  for (double M = 2.0; M <= 1.8446744073709552e19; M *= 2.0) {
    const double product =
        fixed * compute_C1(lambda0, M, N0, l, gamma) * std::pow(M, n + alpha - gamma);
    if (product > 1.0) return {M, product};
  }
  throw StructureError("no M <= 2^64 satisfies the product inequality");
}

static BarrierParams finish_build(const ConvexDomain& domain, int n, double A,
                                  double alpha, double beta, double gamma,
                                  BoundaryFrame frame) {
  BarrierParams p;
  p.n = n;
  p.A = A;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.l = domain.diameter();
  p.lambda0 = choose_lambda0(n, alpha, beta, gamma);
  p.N0 = choose_N0(p.lambda0);
  const M0Choice m = choose_M0(n, A, alpha, beta, gamma, p.l, p.lambda0, p.N0);
  p.M0 = m.M0;
  p.inequality_residual = m.product - 1.0;
  p.C1 = compute_C1(p.lambda0, p.M0, p.N0, p.l, gamma);
  p.C2 = compute_C2(p.N0, p.l, alpha, gamma, n);
  p.frame = std::move(frame);
  return p;
}

BarrierParams build_barrier(const ConvexDomain& domain, int n, double A,
                            double alpha, double beta, double gamma,
                            const Vec& x0) {
  return finish_build(domain, n, A, alpha, beta, gamma,
                      domain.boundary_frame(x0));
}

BarrierParams build_barrier(const ConvexDomain& domain, int n, double A,
                            double alpha, double beta, double gamma,
                            const Vec& x0, const Vec& normal) {
  return finish_build(domain, n, A, alpha, beta, gamma,
                      domain.boundary_frame(x0, normal));
}

namespace {

struct FrameCoords {
  Vec y;       // full frame image
  Vec yprime;  // tangential part (n-1)
  double r;
  double xn;
};

FrameCoords to_frame(const BarrierParams& p, const Vec& x) {
  FrameCoords c;
  c.y = p.frame.forward(x);
  c.xn = c.y[p.n - 1];
  c.yprime = c.y.head(p.n - 1);
  c.r = c.yprime.norm();
  if (c.xn < -kGeomTol)
    throw GeometryError("point maps outside the half-space {x_n >= 0}");
  c.xn = std::max(c.xn, 0.0);
  return c;
}

}  // namespace

double eval_W(const BarrierParams& p, const Vec& x) {
  const FrameCoords c = to_frame(p, x);
  const double s2 = p.N0 * p.N0 * p.l * p.l - c.r * c.r;
  if (s2 < 0.0) throw GeometryError("r exceeds N0*l");
  return -p.M0 * std::pow(c.xn, p.lambda0) * std::sqrt(s2);
}

WDerivs eval_W_derivs(const BarrierParams& p, const Vec& x) {
  const FrameCoords c = to_frame(p, x);
  const int n = p.n;
  if (c.xn <= 0.0)
    throw GeometryError("W derivatives singular on {x_n = 0}");
  const double S = p.N0 * p.N0 * p.l * p.l - c.r * c.r;
  if (S <= 0.0) throw GeometryError("r exceeds N0*l");
  const double lam = p.lambda0, M = p.M0;
  const double xl = std::pow(c.xn, lam);

  const double Wr_over_r = M * xl / std::sqrt(S);        // W_r / r (finite at r=0)
  const double Wr = c.r * Wr_over_r;
  const double Wn = -lam * M * std::pow(c.xn, lam - 1.0) * std::sqrt(S);
  const double Wrr = M * p.N0 * p.N0 * p.l * p.l * xl * std::pow(S, -1.5);
  const double Wnn = lam * (1.0 - lam) * M * std::pow(c.xn, lam - 2.0) * std::sqrt(S);
  const double Wrn = lam * M * c.r * std::pow(c.xn, lam - 1.0) / std::sqrt(S);

  WDerivs d;
  d.grad = Vec::Zero(n);
  d.hess = Mat::Zero(n, n);
  Vec rhat = Vec::Zero(n - 1);
  if (c.r > 0.0) rhat = c.yprime / c.r;

  d.grad.head(n - 1) = Wr_over_r * c.yprime;  // = W_r * rhat, no division
  d.grad[n - 1] = Wn;

  // Tangential block: (W_rr - W_r/r) rhat rhat^T + (W_r/r) I.
  d.hess.topLeftCorner(n - 1, n - 1) =
      Wr_over_r * Mat::Identity(n - 1, n - 1);
  if (c.r > 0.0)
    d.hess.topLeftCorner(n - 1, n - 1) +=
        (Wrr - Wr_over_r) * rhat * rhat.transpose();
  else
    // W_rr(0) equals the W_r/r limit; the block is already correct.
    (void)Wr;
  // Mixed terms carry an explicit factor r; zero on the axis.
  if (c.r > 0.0) {
    d.hess.block(0, n - 1, n - 1, 1) = Wrn * rhat;
    d.hess.block(n - 1, 0, 1, n - 1) = Wrn * rhat.transpose();
  }
  d.hess(n - 1, n - 1) = Wnn;
  return d;
}

double det_D2W(const BarrierParams& p, const Vec& x) {
  const FrameCoords c = to_frame(p, x);
  if (c.xn <= 0.0)
    throw GeometryError("det D^2 W singular on {x_n = 0}");
  const double N2l2 = p.N0 * p.N0 * p.l * p.l;
  const double S = N2l2 - c.r * c.r;
  if (S <= 0.0) throw GeometryError("r exceeds N0*l");
  const double lam = p.lambda0;
  return lam * std::pow(p.M0, p.n) * N2l2 *
         std::pow(c.xn, p.n * lam - 2.0) *
         (1.0 - (1.0 + c.r * c.r / N2l2) * lam) * std::pow(S, -0.5 * p.n);
}

SubsolutionReport verify_subsolution(const BarrierParams& p, const RhsSpec& spec,
                                     const ConvexDomain& domain, int samples,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vec lo, hi;
  domain.bounding_box(lo, hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SubsolutionReport rep;
  rep.samples = samples;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const int n = domain.dim();
  for (int k = 0; k < samples; ++k) {
    Vec x(n);
    do {
      for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    } while (domain.contains(x) != Membership::Interior);
    const double w = eval_W(p, x);
    if (w >= 0.0) continue;  // frame-boundary contact, excluded
    const WDerivs d = eval_W_derivs(p, x);
    const Vec q = p.frame.rotation.transpose() * d.grad;  // original coords
    const double det = det_D2W(p, x);
    const double env = spec.envelope_bound(domain, x, w, q);
    const double ratio = det / env;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin = x;
    }
  }
  return rep;
}

PerronEnvelope::PerronEnvelope(const ConvexDomain& domain, int n, double A,
                               double alpha, double beta, double gamma,
                               int boundary_point_count) {
  const auto pts = domain.boundary_points(boundary_point_count);
  members_.reserve(pts.size());
  // Constants are shared across boundary points; only frames differ.
  BarrierParams base = build_barrier(domain, n, A, alpha, beta, gamma, pts[0]);
  members_.push_back(base);
  for (size_t i = 1; i < pts.size(); ++i) {
    BarrierParams p = base;
    p.frame = domain.boundary_frame(pts[i]);
    members_.push_back(std::move(p));
  }
}

double PerronEnvelope::eval(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : members_) best = std::max(best, eval_W(p, x));
  return best;
}

}  // namespace ma
