#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ma/geometry.hpp"

namespace ma {

enum class NodeClass : std::uint8_t { Interior, Band, Exterior };

/// Lattice discretization of a 2D convex domain. Nodes sit at integer
/// multiples of h. Interior nodes carry the unknowns; boundary-band nodes
/// (non-interior nodes reachable from an interior node by a stencil offset)
/// carry extrapolated values tied to the zero Dirichlet datum.
class Grid {
 public:
  /// stencil_width in {1,2,3}; h < diameter/4.
  Grid(ConvexDomain domain, double h, int stencil_width);

  const ConvexDomain& domain() const { return domain_; }
  double h() const { return h_; }
  int width() const { return width_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_nodes() const { return nx_ * ny_; }
  int id(int i, int j) const { return j * nx_ + i; }
  Eigen::Vector2d pos(int node) const {
    return {origin_.x() + h_ * (node % nx_), origin_.y() + h_ * (node / nx_)};
  }
  NodeClass node_class(int node) const { return cls_[node]; }
  const std::vector<int>& interior_nodes() const { return interior_; }
  const std::vector<int>& band_nodes() const { return band_; }

  struct BandInfo {
    int anchor = -1;        // nearest interior node
    double coef = 0.0;      // band value = coef * u[anchor]; = 1 - |g-a|/|cut-a|
    Eigen::Vector2d projection;  // nearest boundary point
    double cut_distance = 0.0;   // |node - projection|
  };
  const BandInfo& band_info(int node) const { return band_info_[node]; }

  /// Orthogonal direction pairs; always includes the axis pair.
  const std::vector<std::array<Eigen::Vector2i, 2>>& stencil() const {
    return pairs_;
  }
  /// All distinct stencil directions (both members of every pair).
  const std::vector<Eigen::Vector2i>& directions() const { return dirs_; }

 private:
  ConvexDomain domain_;
  double h_;
  int width_;
  int nx_ = 0, ny_ = 0;
  Eigen::Vector2d origin_;
  std::vector<NodeClass> cls_;
  std::vector<int> interior_, band_;
  std::vector<BandInfo> band_info_;
  std::vector<std::array<Eigen::Vector2i, 2>> pairs_;
  std::vector<Eigen::Vector2i> dirs_;
};

/// Node values over a grid; meaningful at interior and band nodes.
struct GridFunction {
  std::shared_ptr<const Grid> grid;
  std::vector<double> v;

  explicit GridFunction(std::shared_ptr<const Grid> g)
      : grid(std::move(g)), v(grid->num_nodes(), 0.0) {}
  double& operator[](int node) { return v[node]; }
  double operator[](int node) const { return v[node]; }
};

std::shared_ptr<const Grid> build_grid(const ConvexDomain& domain, double h,
                                       int stencil_width);

/// Sample a callable at interior and band nodes.
GridFunction sample(const std::shared_ptr<const Grid>& grid,
                    const std::function<double(const Eigen::Vector2d&)>& f);

/// Set band values by linear extrapolation through the boundary cut with
/// zero Dirichlet datum.
void impose_boundary(GridFunction& u);

/// Centered second difference along integer direction e at an interior node,
/// scaled by 1/(h^2 |e|^2) (directional curvature units).
double second_difference(const GridFunction& u, int node,
                         const Eigen::Vector2i& e);

/// MA_h[u] = min over stencil pairs (e, e_perp) of (D^2_e u)^+ (D^2_{e_perp} u)^+
/// at interior nodes (zero elsewhere in the output).
GridFunction ma_operator(const GridFunction& u);

/// Centered differences at interior nodes; one-sided next to the band.
std::vector<Eigen::Vector2d> gradient(const GridFunction& u);

/// max over interior nodes and stencil directions of the negative part of
/// the raw second difference divided by h^2 (no |e|^2 normalization).
double convexity_defect(const GridFunction& u);

}  // namespace ma
