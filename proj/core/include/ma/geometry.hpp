#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace ma {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Absolute tolerance for all geometric predicates (domain sizes O(1)-O(10)).
inline constexpr double kGeomTol = 1e-10;

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Membership { Interior, Boundary, Exterior };

/// Rigid motion placing a boundary point at the origin with the domain in
/// the upper half-space {x_n >= 0}. forward(x) = Q (x - base); Q is
/// orthogonal and maps the inward normal at the base point to +e_n.
struct BoundaryFrame {
  Vec base_point;
  Vec inward_normal;
  Mat rotation;     // orthogonal, rotation * inward_normal = e_n
  Vec translation;  // forward(x) = rotation * x + translation

  Vec forward(const Vec& x) const { return rotation * x + translation; }
  Vec inverse(const Vec& y) const {
    return rotation.transpose() * (y - translation);
  }
};

/// A bounded convex domain: disk/ball, axis-aligned ellipse/ellipsoid, or a
/// strictly convex planar polygon (CCW vertices). Disks and ellipses support
/// any dimension n >= 2; polygons are restricted to n = 2.
class ConvexDomain {
 public:
  enum class Kind { Disk, Ellipse, Polygon };

  static ConvexDomain disk(Vec center, double radius);
  static ConvexDomain ellipse(Vec center, Vec semi_axes);
  static ConvexDomain polygon(std::vector<Eigen::Vector2d> vertices_ccw);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& semi_axes() const { return semi_axes_; }
  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }

  /// Exact Euclidean distance from x (in the closed domain) to the boundary.
  /// Throws GeometryError if x lies outside the closed domain.
  double distance_to_boundary(const Vec& x) const;

  /// sup of pairwise distances; max over vertex pairs for polygons.
  double diameter() const;

  Membership contains(const Vec& x) const;

  /// Nearest boundary point to x (x anywhere).
  Vec project_to_boundary(const Vec& x) const;

  /// Unit inward normal at a boundary point. At polygon vertices the
  /// angle-bisector normal of the two adjacent edges is used.
  Vec inward_normal_at(const Vec& boundary_point) const;

  /// Frame for a point x0 on the boundary (within kGeomTol; projected onto
  /// it first). An explicit normal may be supplied for nonsmooth points;
  /// it must belong to the normal cone (supporting-hyperplane check).
  BoundaryFrame boundary_frame(const Vec& x0) const;
  BoundaryFrame boundary_frame(const Vec& x0, const Vec& inward_normal) const;

  /// For x in the closed domain and a direction d != 0: the smallest t > 0
  /// with x + t d on the boundary.
  double ray_exit(const Vec& x, const Vec& dir) const;

  /// Axis-aligned bounding box.
  void bounding_box(Vec& lo, Vec& hi) const;

  /// `count` well-spread boundary points (equal angles / arc length in 2D,
  /// spherical Fibonacci directions for n >= 3).
  std::vector<Vec> boundary_points(int count) const;

 private:
  ConvexDomain() = default;

  Kind kind_ = Kind::Disk;
  int dim_ = 2;
  Vec center_;
  double radius_ = 0.0;
  Vec semi_axes_;
  std::vector<Eigen::Vector2d> vertices_;
};

/// Orthogonal matrix Q with Q v = e_n for a unit vector v (Householder).
Mat rotation_to_en(const Vec& v);

}  // namespace ma
