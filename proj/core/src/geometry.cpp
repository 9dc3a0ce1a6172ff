#include "ma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ma {

namespace {

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b, Eigen::Vector2d* nearest) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Eigen::Vector2d q = a + t * ab;
  if (nearest) *nearest = q;
  return (p - q).norm();
}

// Nearest point on the ellipsoid sum((y_i/a_i)^2)=1 to an interior point z
// (coordinates relative to the center). Lagrange parameterization
// y_i = a_i^2 z_i / (a_i^2 + t) with the root of
// F(t) = sum (a_i z_i / (a_i^2 + t))^2 - 1. F is strictly decreasing; for
// interior z the root lies in (-min_J a_i^2, 0] where J = {i : z_i != 0}.
// If F(-a_j^2) <= 0 for the smallest axis j outside J, the minimizer sits on
// the degenerate branch t = -a_j^2 with y_j free.
Vec ellipsoid_project_interior(const Vec& z, const Vec& a) {
  const int n = static_cast<int>(z.size());
  double amin_all2 = std::numeric_limits<double>::infinity();
  int jmin = 0;
  double amin_active2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double ai2 = a[i] * a[i];
    if (ai2 < amin_all2) {
      amin_all2 = ai2;
      jmin = i;
    }
    if (std::abs(z[i]) > 0.0) amin_active2 = std::min(amin_active2, ai2);
  }
  auto F = [&](double t) {
    double s = -1.0;
    for (int i = 0; i < n; ++i) {
      const double w = a[i] * z[i] / (a[i] * a[i] + t);
      s += w * w;
    }
    return s;
  };

  if (!std::isfinite(amin_active2)) {
    // z is the center: nearest boundary point lies along the smallest axis.
    Vec y = Vec::Zero(n);
    y[jmin] = a[jmin];
    return y;
  }

  if (amin_all2 < amin_active2 && F(-amin_all2) <= 0.0) {
    const double t = -amin_all2;
    Vec y = Vec::Zero(n);
    double rest = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == jmin) continue;
      const double d = a[i] * a[i] + t;
      y[i] = d > 0.0 ? a[i] * a[i] * z[i] / d : 0.0;
      const double w = y[i] / a[i];
      rest += w * w;
    }
    y[jmin] = a[jmin] * std::sqrt(std::max(0.0, 1.0 - rest));
    if (z[jmin] < 0.0) y[jmin] = -y[jmin];
    return y;
  }

  double lo = -amin_active2, hi = 0.0;
  // F(lo+) = +inf, F(0) <= 0 for interior z.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  Vec y(n);
  for (int i = 0; i < n; ++i) y[i] = a[i] * a[i] * z[i] / (a[i] * a[i] + t);
  return y;
}

}  // namespace

ConvexDomain ConvexDomain::disk(Vec center, double radius) {
  if (radius <= 0.0) throw GeometryError("disk radius must be positive");
  if (center.size() < 2) throw GeometryError("dimension must be >= 2");
  ConvexDomain d;
  d.kind_ = Kind::Disk;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

ConvexDomain ConvexDomain::ellipse(Vec center, Vec semi_axes) {
  if (center.size() != semi_axes.size())
    throw GeometryError("center/semi-axes dimension mismatch");
  if (center.size() < 2) throw GeometryError("dimension must be >= 2");
  if ((semi_axes.array() <= 0.0).any())
    throw GeometryError("semi-axes must be strictly positive");
  ConvexDomain d;
  d.kind_ = Kind::Ellipse;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = std::move(center);
  d.semi_axes_ = std::move(semi_axes);
  return d;
}

ConvexDomain ConvexDomain::polygon(std::vector<Eigen::Vector2d> verts) {
  const int m = static_cast<int>(verts.size());
  if (m < 3) throw GeometryError("polygon needs >= 3 vertices");
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d e0 = verts[(i + 1) % m] - verts[i];
    const Eigen::Vector2d e1 = verts[(i + 2) % m] - verts[(i + 1) % m];
    const double cross = e0.x() * e1.y() - e0.y() * e1.x();
    if (cross <= kGeomTol)
      throw GeometryError("polygon vertices must be strictly convex CCW");
  }
  ConvexDomain d;
  d.kind_ = Kind::Polygon;
  d.dim_ = 2;
  d.vertices_ = std::move(verts);
  return d;
}

Membership ConvexDomain::contains(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw GeometryError("point dimension mismatch");
  switch (kind_) {
    case Kind::Disk: {
      const double s = (x - center_).norm() - radius_;
      if (s < -kGeomTol) return Membership::Interior;
      if (s > kGeomTol) return Membership::Exterior;
      return Membership::Boundary;
    }
    case Kind::Ellipse: {
      // Classify via the exact Euclidean distance to the boundary so that
      // contains() and distance_to_boundary() share one tolerance.
      const Vec p = project_to_boundary(x);
      const double d = (x - p).norm();
      if (d <= kGeomTol) return Membership::Boundary;
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double w = (x[i] - center_[i]) / semi_axes_[i];
        s += w * w;
      }
      return s < 1.0 ? Membership::Interior : Membership::Exterior;
    }
    case Kind::Polygon: {
      const Eigen::Vector2d p(x[0], x[1]);
      const int m = static_cast<int>(vertices_.size());
      double min_side = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d a = vertices_[i];
        const Eigen::Vector2d b = vertices_[(i + 1) % m];
        const Eigen::Vector2d e = b - a;
        const double side =
            (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x())) / e.norm();
        min_side = std::min(min_side, side);
      }
      if (min_side > kGeomTol) return Membership::Interior;
      if (min_side < -kGeomTol) return Membership::Exterior;
      return Membership::Boundary;
    }
  }
  throw GeometryError("unreachable");
}

double ConvexDomain::distance_to_boundary(const Vec& x) const {
  if (contains(x) == Membership::Exterior)
    throw GeometryError("distance_to_boundary: point outside closed domain");
  switch (kind_) {
    case Kind::Disk:
      return std::max(0.0, radius_ - (x - center_).norm());
    case Kind::Ellipse: {
      const Vec p = project_to_boundary(x);
      return (x - p).norm();
    }
    case Kind::Polygon: {
      const Eigen::Vector2d p(x[0], x[1]);
      const int m = static_cast<int>(vertices_.size());
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i)
        best = std::min(best, segment_distance(p, vertices_[i],
                                               vertices_[(i + 1) % m], nullptr));
      return best;
    }
  }
  throw GeometryError("unreachable");
}

double ConvexDomain::diameter() const {
  switch (kind_) {
    case Kind::Disk:
      return 2.0 * radius_;
    case Kind::Ellipse:
      return 2.0 * semi_axes_.maxCoeff();
    case Kind::Polygon: {
      double best = 0.0;
      for (size_t i = 0; i < vertices_.size(); ++i)
        for (size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, (vertices_[i] - vertices_[j]).norm());
      return best;
    }
  }
  throw GeometryError("unreachable");
}

Vec ConvexDomain::project_to_boundary(const Vec& x) const {
  switch (kind_) {
    case Kind::Disk: {
      Vec d = x - center_;
      const double r = d.norm();
      if (r < kGeomTol) {
        Vec p = center_;
        p[0] += radius_;
        return p;
      }
      return center_ + (radius_ / r) * d;
    }
    case Kind::Ellipse: {
      const Vec z = x - center_;
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double w = z[i] / semi_axes_[i];
        s += w * w;
      }
      if (s <= 1.0) return center_ + ellipsoid_project_interior(z, semi_axes_);
      // Exterior point: same Lagrange equation with root t in (0, inf).
      auto F = [&](double t) {
        double v = -1.0;
        for (int i = 0; i < dim_; ++i) {
          const double a = semi_axes_[i];
          const double w = a * z[i] / (a * a + t);
          v += w * w;
        }
        return v;
      };
      double lo = 0.0, hi = semi_axes_.maxCoeff() * z.norm() + 1.0;
      while (F(hi) > 0.0) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double t = 0.5 * (lo + hi);
      Vec y(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double a = semi_axes_[i];
        y[i] = a * a * z[i] / (a * a + t);
      }
      return center_ + y;
    }
    case Kind::Polygon: {
      const Eigen::Vector2d p(x[0], x[1]);
      const int m = static_cast<int>(vertices_.size());
      double best = std::numeric_limits<double>::infinity();
      Eigen::Vector2d arg = vertices_[0];
      for (int i = 0; i < m; ++i) {
        Eigen::Vector2d q;
        const double d =
            segment_distance(p, vertices_[i], vertices_[(i + 1) % m], &q);
        if (d < best) {
          best = d;
          arg = q;
        }
      }
      Vec out(2);
      out << arg.x(), arg.y();
      return out;
    }
  }
  throw GeometryError("unreachable");
}

Vec ConvexDomain::inward_normal_at(const Vec& bp) const {
  switch (kind_) {
    case Kind::Disk: {
      Vec nu = center_ - bp;
      const double r = nu.norm();
      if (r < kGeomTol) throw GeometryError("degenerate boundary point");
      return nu / r;
    }
    case Kind::Ellipse: {
      Vec g(dim_);
      for (int i = 0; i < dim_; ++i)
        g[i] = (bp[i] - center_[i]) / (semi_axes_[i] * semi_axes_[i]);
      const double n = g.norm();
      if (n < kGeomTol) throw GeometryError("degenerate boundary point");
      return -g / n;
    }
    case Kind::Polygon: {
      const Eigen::Vector2d p(bp[0], bp[1]);
      const int m = static_cast<int>(vertices_.size());
      // Vertex hit: angle-bisector of the two adjacent inward edge normals.
      for (int i = 0; i < m; ++i) {
        if ((p - vertices_[i]).norm() < 10 * kGeomTol) {
          const Eigen::Vector2d eprev =
              (vertices_[i] - vertices_[(i + m - 1) % m]).normalized();
          const Eigen::Vector2d enext =
              (vertices_[(i + 1) % m] - vertices_[i]).normalized();
          const Eigen::Vector2d n0(-eprev.y(), eprev.x());
          const Eigen::Vector2d n1(-enext.y(), enext.x());
          const Eigen::Vector2d bis = (n0 + n1).normalized();
          Vec out(2);
          out << bis.x(), bis.y();
          return out;
        }
      }
      // Edge hit.
      double best = std::numeric_limits<double>::infinity();
      Eigen::Vector2d n_best;
      for (int i = 0; i < m; ++i) {
        const double d =
            segment_distance(p, vertices_[i], vertices_[(i + 1) % m], nullptr);
        if (d < best) {
          best = d;
          const Eigen::Vector2d e =
              (vertices_[(i + 1) % m] - vertices_[i]).normalized();
          n_best = Eigen::Vector2d(-e.y(), e.x());
        }
      }
      Vec out(2);
      out << n_best.x(), n_best.y();
      return out;
    }
  }
  throw GeometryError("unreachable");
}

Mat rotation_to_en(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Vec en = Vec::Zero(n);
  en[n - 1] = 1.0;
  if ((v - en).norm() < 1e-14) return Mat::Identity(n, n);
  Vec w = v + en;
  const double wn = w.norm();
  if (wn < 1e-8) {
    // v = -e_n: reflect through e_1.
    Mat q = -Mat::Identity(n, n);
    q(0, 0) = 1.0;
    return q;
  }
  w /= wn;
  return 2.0 * w * w.transpose() - Mat::Identity(n, n);
}

BoundaryFrame ConvexDomain::boundary_frame(const Vec& x0) const {
  const Vec p = project_to_boundary(x0);
  if ((p - x0).norm() > kGeomTol)
    throw GeometryError("boundary_frame: point is not on the boundary");
  return boundary_frame(p, inward_normal_at(p));
}

BoundaryFrame ConvexDomain::boundary_frame(const Vec& x0,
                                           const Vec& normal) const {
  const Vec p = project_to_boundary(x0);
  if ((p - x0).norm() > kGeomTol)
    throw GeometryError("boundary_frame: point is not on the boundary");
  Vec nu = normal.normalized();
  BoundaryFrame f;
  f.base_point = p;
  f.inward_normal = nu;
  f.rotation = rotation_to_en(nu);
  f.translation = -f.rotation * p;
  return f;
}

double ConvexDomain::ray_exit(const Vec& x, const Vec& dir) const {
  if (contains(x) == Membership::Exterior)
    throw GeometryError("ray_exit: start point outside closed domain");
  switch (kind_) {
    case Kind::Disk: {
      const Vec z = x - center_;
      const double a = dir.squaredNorm();
      const double b = 2.0 * z.dot(dir);
      const double c = z.squaredNorm() - radius_ * radius_;
      const double disc = std::max(0.0, b * b - 4 * a * c);
      return (-b + std::sqrt(disc)) / (2 * a);
    }
    case Kind::Ellipse: {
      double a = 0.0, b = 0.0, c = -1.0;
      for (int i = 0; i < dim_; ++i) {
        const double zi = (x[i] - center_[i]) / semi_axes_[i];
        const double di = dir[i] / semi_axes_[i];
        a += di * di;
        b += 2.0 * zi * di;
        c += zi * zi;
      }
      const double disc = std::max(0.0, b * b - 4 * a * c);
      return (-b + std::sqrt(disc)) / (2 * a);
    }
    case Kind::Polygon: {
      const Eigen::Vector2d p(x[0], x[1]);
      const Eigen::Vector2d d(dir[0], dir[1]);
      const int m = static_cast<int>(vertices_.size());
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d a = vertices_[i];
        const Eigen::Vector2d e = vertices_[(i + 1) % m] - a;
        const double den = d.x() * (-e.y()) - d.y() * (-e.x());
        if (std::abs(den) < 1e-16) continue;
        const double tx = ((a.x() - p.x()) * (-e.y()) - (a.y() - p.y()) * (-e.x())) / den;
        const double ts = (d.x() * (a.y() - p.y()) - d.y() * (a.x() - p.x())) / den;
        if (tx > kGeomTol && ts >= -1e-12 && ts <= 1.0 + 1e-12)
          best = std::min(best, tx);
      }
      if (!std::isfinite(best))
        throw GeometryError("ray_exit: no boundary intersection found");
      return best;
    }
  }
  throw GeometryError("unreachable");
}

void ConvexDomain::bounding_box(Vec& lo, Vec& hi) const {
  switch (kind_) {
    case Kind::Disk:
      lo = center_.array() - radius_;
      hi = center_.array() + radius_;
      return;
    case Kind::Ellipse:
      lo = center_ - semi_axes_;
      hi = center_ + semi_axes_;
      return;
    case Kind::Polygon: {
      lo = Vec::Constant(2, std::numeric_limits<double>::infinity());
      hi = Vec::Constant(2, -std::numeric_limits<double>::infinity());
      for (const auto& v : vertices_) {
        lo[0] = std::min(lo[0], v.x());
        lo[1] = std::min(lo[1], v.y());
        hi[0] = std::max(hi[0], v.x());
        hi[1] = std::max(hi[1], v.y());
      }
      return;
    }
  }
  throw GeometryError("unreachable");
}

std::vector<Vec> ConvexDomain::boundary_points(int count) const {
  if (count < 1) throw GeometryError("boundary point count must be >= 1");
  std::vector<Vec> pts;
  pts.reserve(count);
  if (dim_ == 2) {
    if (kind_ == Kind::Polygon) {
      // Equal arc length along the perimeter.
      const int m = static_cast<int>(vertices_.size());
      double per = 0.0;
      for (int i = 0; i < m; ++i)
        per += (vertices_[(i + 1) % m] - vertices_[i]).norm();
      for (int k = 0; k < count; ++k) {
        double s = per * k / count;
        for (int i = 0; i < m; ++i) {
          const Eigen::Vector2d a = vertices_[i];
          const Eigen::Vector2d b = vertices_[(i + 1) % m];
          const double len = (b - a).norm();
          if (s <= len || i == m - 1) {
            const Eigen::Vector2d q = a + std::min(1.0, s / len) * (b - a);
            Vec v(2);
            v << q.x(), q.y();
            pts.push_back(v);
            break;
          }
          s -= len;
        }
      }
      return pts;
    }
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      pts.push_back(center_ + ray_exit(center_, dir) * dir);
    }
    return pts;
  }
  // n >= 3: spherical Fibonacci directions (deterministic, well-spread);
  // radial scaling lands them on the disk/ellipsoid boundary.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    Vec dir = Vec::Zero(dim_);
    const double z = count == 1 ? 0.0 : 1.0 - 2.0 * k / (count - 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * k;
    dir[0] = rho * std::cos(th);
    dir[1] = rho * std::sin(th);
    dir[dim_ - 1] = z;
    if (dir.norm() < 1e-12) dir[0] = 1.0;
    dir.normalize();
    pts.push_back(center_ + ray_exit(center_, dir) * dir);
  }
  return pts;
}

}  // namespace ma
