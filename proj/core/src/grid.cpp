#include "ma/grid.hpp"

#include <cmath>
#include <limits>

namespace ma {

namespace {

std::vector<std::array<Eigen::Vector2i, 2>> make_pairs(int width) {
  using V = Eigen::Vector2i;
  std::vector<std::array<V, 2>> pairs = {{V(1, 0), V(0, 1)},
                                         {V(1, 1), V(-1, 1)}};
  if (width >= 2) {
    pairs.push_back({V(2, 1), V(-1, 2)});
    pairs.push_back({V(1, 2), V(-2, 1)});
  }
  if (width >= 3) {
    pairs.push_back({V(3, 1), V(-1, 3)});
    pairs.push_back({V(1, 3), V(-3, 1)});
    pairs.push_back({V(3, 2), V(-2, 3)});
    pairs.push_back({V(2, 3), V(-3, 2)});
  }
  return pairs;
}

}  // namespace

Grid::Grid(ConvexDomain domain, double h, int stencil_width)
    : domain_(std::move(domain)), h_(h), width_(stencil_width) {
  if (domain_.dim() != 2) throw GeometryError("grids are 2D only");
  if (!(h > 0.0) || h > domain_.diameter() / 4.0)
    throw GeometryError("require 0 < h <= diameter/4");
  if (stencil_width < 1 || stencil_width > 3)
    throw GeometryError("stencil width must be 1, 2 or 3");

  pairs_ = make_pairs(width_);
  for (const auto& pr : pairs_)
    for (const auto& e : pr) dirs_.push_back(e);

  Vec lo, hi;
  domain_.bounding_box(lo, hi);
  const int margin = width_ + 1;
  const int i0 = static_cast<int>(std::floor(lo[0] / h_)) - margin;
  const int i1 = static_cast<int>(std::ceil(hi[0] / h_)) + margin;
  const int j0 = static_cast<int>(std::floor(lo[1] / h_)) - margin;
  const int j1 = static_cast<int>(std::ceil(hi[1] / h_)) + margin;
  nx_ = i1 - i0 + 1;
  ny_ = j1 - j0 + 1;
  origin_ = Eigen::Vector2d(i0 * h_, j0 * h_);

  cls_.assign(nx_ * ny_, NodeClass::Exterior);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      Vec x(2);
      const Eigen::Vector2d p = pos(id(i, j));
      x << p.x(), p.y();
      if (domain_.contains(x) == Membership::Interior) {
        cls_[id(i, j)] = NodeClass::Interior;
        interior_.push_back(id(i, j));
      }
    }
  if (interior_.empty())
    throw GeometryError("no interior nodes at this resolution");

  // Band: non-interior nodes reachable from an interior node by +-e.
  for (int node : interior_) {
    const int i = node % nx_, j = node / nx_;
    for (const auto& e : dirs_)
      for (int s : {-1, 1}) {
        const int ii = i + s * e.x(), jj = j + s * e.y();
        const int nb = id(ii, jj);
        if (cls_[nb] == NodeClass::Exterior) cls_[nb] = NodeClass::Band;
      }
  }
  band_info_.assign(nx_ * ny_, BandInfo{});
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      const int node = id(i, j);
      if (cls_[node] != NodeClass::Band) continue;
      band_.push_back(node);
      const Eigen::Vector2d g = pos(node);
      BandInfo info;
      Vec gx(2);
      gx << g.x(), g.y();
      const Vec proj = domain_.project_to_boundary(gx);
      info.projection = Eigen::Vector2d(proj[0], proj[1]);
      info.cut_distance = (g - info.projection).norm();
      // Nearest interior node within Chebyshev radius width+1.
      double best = std::numeric_limits<double>::infinity();
      for (int dj = -(width_ + 1); dj <= width_ + 1; ++dj)
        for (int di = -(width_ + 1); di <= width_ + 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
          const int nb = id(ii, jj);
          if (cls_[nb] != NodeClass::Interior) continue;
          const double d = Eigen::Vector2d(di, dj).norm();
          if (d < best) {
            best = d;
            info.anchor = nb;
          }
        }
      if (info.anchor >= 0) {
        const Eigen::Vector2d a = pos(info.anchor);
        Vec ax(2), dir(2);
        ax << a.x(), a.y();
        dir << g.x() - a.x(), g.y() - a.y();
        const double t_exit = domain_.ray_exit(ax, dir);  // in (0, 1]
        info.coef = 1.0 - 1.0 / std::max(t_exit, 1e-12);
      }
      band_info_[node] = info;
    }
}

std::shared_ptr<const Grid> build_grid(const ConvexDomain& domain, double h,
                                       int stencil_width) {
  return std::make_shared<Grid>(domain, h, stencil_width);
}

GridFunction sample(const std::shared_ptr<const Grid>& grid,
                    const std::function<double(const Eigen::Vector2d&)>& f) {
  GridFunction u(grid);
  for (int node : grid->interior_nodes()) u[node] = f(grid->pos(node));
  for (int node : grid->band_nodes()) u[node] = f(grid->pos(node));
  return u;
}

void impose_boundary(GridFunction& u) {
  const Grid& g = *u.grid;
  for (int node : g.band_nodes()) {
    const auto& info = g.band_info(node);
    u[node] = info.anchor >= 0 ? info.coef * u[info.anchor] : 0.0;
  }
}

double second_difference(const GridFunction& u, int node,
                         const Eigen::Vector2i& e) {
  const Grid& g = *u.grid;
  const int off = e.y() * g.nx() + e.x();
  const double h2 = g.h() * g.h() * e.squaredNorm();
  return (u[node + off] + u[node - off] - 2.0 * u[node]) / h2;
}

GridFunction ma_operator(const GridFunction& u) {
  const Grid& g = *u.grid;
  GridFunction out(u.grid);
  for (int node : g.interior_nodes()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pr : g.stencil()) {
      const double d1 = std::max(second_difference(u, node, pr[0]), 0.0);
      const double d2 = std::max(second_difference(u, node, pr[1]), 0.0);
      best = std::min(best, d1 * d2);
    }
    out[node] = best;
  }
  return out;
}

std::vector<Eigen::Vector2d> gradient(const GridFunction& u) {
  const Grid& g = *u.grid;
  std::vector<Eigen::Vector2d> out(g.num_nodes(), Eigen::Vector2d::Zero());
  const double h = g.h();
  for (int node : g.interior_nodes()) {
    Eigen::Vector2d gr;
    for (int axis = 0; axis < 2; ++axis) {
      const int off = axis == 0 ? 1 : g.nx();
      const bool fwd_in = g.node_class(node + off) == NodeClass::Interior;
      const bool bwd_in = g.node_class(node - off) == NodeClass::Interior;
      if (fwd_in && bwd_in)
        gr[axis] = (u[node + off] - u[node - off]) / (2.0 * h);
      else if (fwd_in)
        gr[axis] = (u[node + off] - u[node]) / h;
      else if (bwd_in)
        gr[axis] = (u[node] - u[node - off]) / h;
      else
        gr[axis] = (u[node + off] - u[node - off]) / (2.0 * h);
    }
    out[node] = gr;
  }
  return out;
}

double convexity_defect(const GridFunction& u) {
  const Grid& g = *u.grid;
  const double h2 = g.h() * g.h();
  double worst = 0.0;
  for (int node : g.interior_nodes())
    for (const auto& e : g.directions()) {
      const int off = e.y() * g.nx() + e.x();
      const double d = (u[node + off] + u[node - off] - 2.0 * u[node]) / h2;
      worst = std::max(worst, -d);
    }
  return worst;
}

}  // namespace ma
