#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ma/geometry.hpp"

using namespace ma;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

ConvexDomain unit_disk() { return ConvexDomain::disk(Vec::Zero(2), 1.0); }

ConvexDomain square(double a, double b) {
  return ConvexDomain::polygon({{a, a}, {b, a}, {b, b}, {a, b}});
}

Vec sample_interior(const ConvexDomain& dom, std::mt19937_64& rng) {
  Vec lo, hi;
  dom.bounding_box(lo, hi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Vec x(dom.dim());
    for (int i = 0; i < dom.dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    if (dom.contains(x) == Membership::Interior) return x;
  }
}

}  // namespace

TEST_CASE("distance to boundary") {
  CHECK(unit_disk().distance_to_boundary(v2(0, 0)) == doctest::Approx(1.0));
  CHECK(square(-1, 1).distance_to_boundary(v2(0.5, 0)) ==
        doctest::Approx(0.5));
  const auto tri = ConvexDomain::polygon({{0, 0}, {1, 0}, {0, 1}});
  CHECK(tri.distance_to_boundary(v2(0.25, 0.25)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(unit_disk().distance_to_boundary(v2(2, 0)), GeometryError);
}

TEST_CASE("diameter") {
  CHECK(unit_disk().diameter() == doctest::Approx(2.0));
  CHECK(square(0, 1).diameter() == doctest::Approx(std::sqrt(2.0)));
  const auto tri = ConvexDomain::polygon({{0, 0}, {3, 0}, {0, 4}});
  CHECK(tri.diameter() == doctest::Approx(5.0));
}

TEST_CASE("contains") {
  const auto d = unit_disk();
  CHECK(d.contains(v2(0, 0)) == Membership::Interior);
  CHECK(d.contains(v2(1, 0)) == Membership::Boundary);
  CHECK(d.contains(v2(2, 0)) == Membership::Exterior);
}

TEST_CASE("boundary frame at the bottom of the disk") {
  const auto f = unit_disk().boundary_frame(v2(0, -1));
  CHECK((f.rotation - Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK(f.translation[0] == doctest::Approx(0.0));
  CHECK(f.translation[1] == doctest::Approx(1.0));
  CHECK(f.forward(v2(0, 0))[1] == doctest::Approx(1.0));
  CHECK(f.forward(v2(0, -1)).norm() < 1e-12);
}

TEST_CASE("boundary frame maps the domain into the upper half-plane") {
  std::mt19937_64 rng(7);
  const auto d = unit_disk();
  const auto f = d.boundary_frame(v2(1, 0));
  CHECK((f.rotation.transpose() * f.rotation - Mat::Identity(2, 2)).norm() <
        1e-12);
  for (int k = 0; k < 1000; ++k) {
    const Vec x = sample_interior(d, rng);
    CHECK(f.forward(x)[1] > 0.0);
  }
}

TEST_CASE("corner frame with an explicit normal-cone direction") {
  std::mt19937_64 rng(8);
  const auto sq = square(0, 1);
  Vec nu = v2(1, 1) / std::sqrt(2.0);
  const auto f = sq.boundary_frame(v2(0, 0), nu);
  for (int k = 0; k < 1000; ++k) {
    const Vec x = sample_interior(sq, rng);
    CHECK(f.forward(x)[1] > 0.0);
  }
}

TEST_CASE("distance is positive inside, Lipschitz, below half the diameter") {
  std::mt19937_64 rng(11);
  for (const auto& dom :
       {unit_disk(), square(0, 1),
        ConvexDomain::ellipse(v2(0.5, -1), v2(2.0, 0.7)),
        ConvexDomain::polygon({{0, 0}, {2, 0}, {3, 1}, {1, 2}})}) {
    double dmax = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Vec x = sample_interior(dom, rng);
      const Vec y = sample_interior(dom, rng);
      const double dx = dom.distance_to_boundary(x);
      const double dy = dom.distance_to_boundary(y);
      CHECK(dx > 0.0);
      CHECK(std::abs(dx - dy) <= (x - y).norm() + 1e-12);
      dmax = std::max(dmax, dx);
    }
    CHECK(dom.diameter() >= 2.0 * dmax - 1e-12);
    for (const auto& p : dom.boundary_points(64))
      CHECK(dom.distance_to_boundary(p) < 1e-10);
  }
}

TEST_CASE("frame round trip") {
  std::mt19937_64 rng(13);
  const auto dom = ConvexDomain::ellipse(v2(0, 0), v2(2.0, 1.0));
  const auto f = dom.boundary_frame(dom.boundary_points(7)[3]);
  for (int k = 0; k < 1000; ++k) {
    const Vec x = sample_interior(dom, rng);
    CHECK((f.inverse(f.forward(x)) - x).norm() < 1e-12);
  }
}

TEST_CASE("frames exist in dimension three") {
  Vec c = Vec::Zero(3);
  const auto ball = ConvexDomain::disk(c, 1.0);
  CHECK(ball.diameter() == doctest::Approx(2.0));
  std::mt19937_64 rng(17);
  for (const auto& p : ball.boundary_points(20)) {
    const auto f = ball.boundary_frame(p);
    CHECK((f.rotation.transpose() * f.rotation - Mat::Identity(3, 3)).norm() <
          1e-12);
    for (int k = 0; k < 50; ++k) {
      const Vec x = sample_interior(ball, rng);
      CHECK(f.forward(x)[2] > 0.0);
    }
  }
}

TEST_CASE("invalid domains are rejected") {
  CHECK_THROWS_AS(ConvexDomain::disk(Vec::Zero(2), -1.0), GeometryError);
  CHECK_THROWS_AS(ConvexDomain::polygon({{0, 0}, {1, 0}}), GeometryError);
  // Clockwise (non-CCW) vertex order.
  CHECK_THROWS_AS(ConvexDomain::polygon({{0, 0}, {0, 1}, {1, 0}}),
                  GeometryError);
}
