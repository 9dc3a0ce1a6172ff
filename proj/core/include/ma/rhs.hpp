#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ma/geometry.hpp"

namespace ma {

struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A concrete right-hand-side family f(x, z, q) for det D^2 u = f(x, u, Du),
/// together with the envelope parameters (A, alpha, beta, gamma) of the
/// bound  0 < f <= A d_x^{beta-n-1} |z|^{-alpha} (1+|q|^2)^{gamma/2}.
class RhsSpec {
 public:
  enum class Kind { Envelope, GaussCurvature, Minkowski, Hilbert, Manufactured };

  using Coefficient = std::function<double(const Vec&)>;

  /// f = A d_x^{beta-n-1} |z|^{-alpha} (1+|q|^2)^{gamma/2} (the envelope itself).
  static RhsSpec envelope(int n, double A, double alpha, double beta, double gamma);
  /// f = g(x) (1+|q|^2)^{gamma/2}; g in (0, g_max].
  static RhsSpec gauss_curvature(int n, Coefficient g, double g_max, double gamma);
  /// f = g(x) |z|^{-alpha}; g in (0, g_max].
  static RhsSpec minkowski(int n, Coefficient g, double g_max, double alpha);
  /// f = |z|^{-(n+2)} (Hilbert metric case).
  static RhsSpec hilbert(int n);
  /// f = c(x) exp(z - u*(x)) for a supplied convex u*; claims no envelope.
  static RhsSpec manufactured(int n, Coefficient c, Coefficient u_star);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  double A() const { return A_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  bool claims_f3() const { return claims_f3_; }
  bool claims_f2_strict() const { return claims_f2_strict_; }
  const Coefficient& u_star() const { return u_star_; }

  /// f(x, z, q). Requires z < 0 and x in the open domain (x on the boundary
  /// is accepted only where the d_x factor is regular).
  double eval_f(const ConvexDomain& domain, const Vec& x, double z,
                const Vec& q) const;

  /// The (f3) envelope A d_x^{beta-n-1} |z|^{-alpha} (1+|q|^2)^{gamma/2}.
  double envelope_bound(const ConvexDomain& domain, const Vec& x, double z,
                        const Vec& q) const;

 private:
  static void validate_envelope_params(int n, double A, double alpha,
                                       double beta, double gamma);

  Kind kind_ = Kind::Envelope;
  int n_ = 2;
  double A_ = 1.0, alpha_ = 0.0, beta_ = 3.0, gamma_ = 0.0;
  bool claims_f3_ = true;
  bool claims_f2_strict_ = false;
  Coefficient g_, c_, u_star_;
};

struct StructureReport {
  int samples = 0;
  double max_envelope_gap = 0.0;  // max(f - envelope); must be <= 0
  double min_f = 0.0;             // must be > 0
  bool positivity_pass = false;
  bool envelope_pass = false;     // true when not claimed (vacuous)
  bool envelope_checked = false;
  bool monotone_pass = false;         // (f2)
  bool strictly_monotone_pass = false;  // (f2'), meaningful when claimed
  bool pass() const {
    return positivity_pass && envelope_pass && monotone_pass;
  }
};

/// Sampled verification of (f2)/(f2')/(f3): x uniform in the domain,
/// z in [-10, -1e-3], |q| <= 10. Violations are reported, never thrown.
StructureReport check_structure(const RhsSpec& spec, const ConvexDomain& domain,
                                int sample_count, std::uint64_t seed = 12345);

}  // namespace ma
