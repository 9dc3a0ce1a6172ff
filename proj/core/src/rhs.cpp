#include "ma/rhs.hpp"

#include <cmath>
#include <random>

namespace ma {

void RhsSpec::validate_envelope_params(int n, double A, double alpha,
                                       double beta, double gamma) {
  if (A <= 0.0) throw StructureError("(f3) requires A > 0");
  if (beta < n + 1) throw StructureError("(f3) requires beta >= n+1");
  if (gamma >= std::min(n + alpha, beta - n + 1))
    throw StructureError("(f3) requires gamma < min{n+alpha, beta-n+1}");
}

RhsSpec RhsSpec::envelope(int n, double A, double alpha, double beta,
                          double gamma) {
  validate_envelope_params(n, A, alpha, beta, gamma);
  RhsSpec s;
  s.kind_ = Kind::Envelope;
  s.n_ = n;
  s.A_ = A;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.gamma_ = gamma;
  s.claims_f3_ = true;
  s.claims_f2_strict_ = alpha > 0.0;
  return s;
}

RhsSpec RhsSpec::gauss_curvature(int n, Coefficient g, double g_max,
                                 double gamma) {
  validate_envelope_params(n, g_max, 0.0, n + 1.0, gamma);
  RhsSpec s;
  s.kind_ = Kind::GaussCurvature;
  s.n_ = n;
  s.A_ = g_max;
  s.alpha_ = 0.0;
  s.beta_ = n + 1.0;
  s.gamma_ = gamma;
  s.g_ = std::move(g);
  s.claims_f3_ = true;
  s.claims_f2_strict_ = false;
  return s;
}

RhsSpec RhsSpec::minkowski(int n, Coefficient g, double g_max, double alpha) {
  validate_envelope_params(n, g_max, alpha, n + 1.0, 0.0);
  RhsSpec s;
  s.kind_ = Kind::Minkowski;
  s.n_ = n;
  s.A_ = g_max;
  s.alpha_ = alpha;
  s.beta_ = n + 1.0;
  s.gamma_ = 0.0;
  s.g_ = std::move(g);
  s.claims_f3_ = true;
  s.claims_f2_strict_ = alpha > 0.0;
  return s;
}

RhsSpec RhsSpec::hilbert(int n) {
  RhsSpec s;
  s.kind_ = Kind::Hilbert;
  s.n_ = n;
  s.A_ = 1.0;
  s.alpha_ = n + 2.0;
  s.beta_ = n + 1.0;
  s.gamma_ = 0.0;
  s.claims_f3_ = true;
  s.claims_f2_strict_ = true;
  return s;
}

RhsSpec RhsSpec::manufactured(int n, Coefficient c, Coefficient u_star) {
  RhsSpec s;
  s.kind_ = Kind::Manufactured;
  s.n_ = n;
  s.c_ = std::move(c);
  s.u_star_ = std::move(u_star);
  s.claims_f3_ = false;
  s.claims_f2_strict_ = true;
  return s;
}

double RhsSpec::envelope_bound(const ConvexDomain& domain, const Vec& x,
                               double z, const Vec& q) const {
  if (z >= 0.0) throw StructureError("f is defined for z < 0 only");
  const double d = domain.distance_to_boundary(x);
  const double e = beta_ - n_ - 1.0;
  if (d <= 0.0 && e < 0.0)
    throw StructureError("envelope singular on the boundary");
  const double dpow = e == 0.0 ? 1.0 : std::pow(d, e);
  return A_ * dpow * std::pow(-z, -alpha_) *
         std::pow(1.0 + q.squaredNorm(), 0.5 * gamma_);
}

double RhsSpec::eval_f(const ConvexDomain& domain, const Vec& x, double z,
                       const Vec& q) const {
  if (z >= 0.0) throw StructureError("f is defined for z < 0 only");
  switch (kind_) {
    case Kind::Envelope:
      return envelope_bound(domain, x, z, q);
    case Kind::GaussCurvature:
      return g_(x) * std::pow(1.0 + q.squaredNorm(), 0.5 * gamma_);
    case Kind::Minkowski:
      return g_(x) * std::pow(-z, -alpha_);
    case Kind::Hilbert:
      return std::pow(-z, -(n_ + 2.0));
    case Kind::Manufactured:
      return c_(x) * std::exp(z - u_star_(x));
  }
  throw StructureError("unreachable");
}

StructureReport check_structure(const RhsSpec& spec, const ConvexDomain& domain,
                                int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw StructureError("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  Vec lo, hi;
  domain.bounding_box(lo, hi);
  const int n = domain.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto sample_interior = [&]() {
    for (;;) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
      if (domain.contains(x) == Membership::Interior) return x;
    }
  };

  StructureReport rep;
  rep.samples = sample_count;
  rep.max_envelope_gap = -std::numeric_limits<double>::infinity();
  rep.min_f = std::numeric_limits<double>::infinity();
  bool monotone = true, strict = true;
  for (int k = 0; k < sample_count; ++k) {
    const Vec x = sample_interior();
    // log-uniform |z| in [1e-3, 10]
    const double z = -std::pow(10.0, -3.0 + 4.0 * unit(rng));
    Vec q(n);
    for (int i = 0; i < n; ++i) q[i] = gauss(rng);
    q *= 10.0 * std::pow(unit(rng), 1.0 / n) / std::max(q.norm(), 1e-300);

    const double f = spec.eval_f(domain, x, z, q);
    rep.min_f = std::min(rep.min_f, f);
    if (spec.claims_f3()) {
      const double env = spec.envelope_bound(domain, x, z, q);
      rep.max_envelope_gap = std::max(rep.max_envelope_gap, f - env);
    }
    // Monotonicity in z on a sampled pair z1 < z2 < 0.
    const double z2 = z * unit(rng);  // z < z2 < 0
    if (z2 < 0.0 && z2 > z) {
      const double f2 = spec.eval_f(domain, x, z2, q);
      if (f2 < f - 1e-12 * std::max(1.0, std::abs(f))) monotone = false;
      if (f2 <= f) strict = false;
    }
  }
  rep.positivity_pass = rep.min_f > 0.0;
  rep.envelope_checked = spec.claims_f3();
  rep.envelope_pass = !spec.claims_f3() || rep.max_envelope_gap <= 1e-9;
  if (!spec.claims_f3()) rep.max_envelope_gap = 0.0;
  rep.monotone_pass = monotone;
  rep.strictly_monotone_pass = monotone && strict;
  return rep;
}

}  // namespace ma
