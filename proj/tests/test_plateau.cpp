#include "nil3/plateau.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace nil3;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig grid(int nr, int nt) {
  SolverConfig c;
  c.nr = nr;
  c.ntheta = nt;
  return c;
}

// 1/2 sqrt((uGu)(vGv) - (uGv)^2) with G the coordinate metric at the barycenter
double reference_area(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s) {
  const Eigen::Vector3d c = (p.vec() + q.vec() + s.vec()) / 3.0;
  const Eigen::Matrix3d G = oracle::metric(c);
  const Eigen::Vector3d u = q.vec() - p.vec(), v = s.vec() - p.vec();
  const double uu = u.dot(G * u), vv = v.dot(G * v), uv = u.dot(G * v);
  return 0.5 * std::sqrt(uu * vv - uv * uv);
}

struct Solved {
  TriMesh3 init;
  TriMesh3 mesh;
  MinimizeReport report;
};

const Solved& saddle_piece() {
  static const Solved s = [] {
    Solved out;
    out.init = initial_spanning_mesh(build_contour(1.0, 4.0, 2, 4.0));
    out.mesh = minimize_area(out.init, MinimizeConfig{}, &out.report);
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("contour") {
  JordanContour c = build_contour(1.0, 4.0, 2, 4.0);
  CHECK(c.theta_n() == doctest::Approx(kPi / 2));
  std::vector<Nil3Point> k = c.corners();
  REQUIRE(k.size() == 6);
  CHECK((k[4].vec() - Eigen::Vector3d(0, 4, 1)).norm() < 1e-15);
  CHECK(c.samples.front().tag == SegmentTag::h1);
  CHECK(c.samples.back().tag == SegmentTag::h2);
  // every sample of a horizontal side lies on its geodesic
  for (const ContourSample& s : c.samples) {
    if (s.tag == SegmentTag::h1) CHECK((s.p.x2 == 0.0 && s.p.x3 == 0.0));
    if (s.tag == SegmentTag::ht1) CHECK((s.p.x2 == 0.0 && s.p.x3 == 1.0));
  }
  CHECK_THROWS_AS(build_contour(0.0, 4.0, 2, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(build_contour(1.0, 4.0, 1, 4.0), std::invalid_argument);

  TriMesh3 m = initial_spanning_mesh(c);
  CHECK(m.euler_characteristic() == 1);
  CHECK(m.boundary_components() == 1);
}

TEST_CASE("triangle area, gradient and Hessian") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  auto pt = [&] { return Nil3Point{U(rng), U(rng), U(rng)}; };
  double area = 0.0, grad = 0.0, hess = 0.0, inv = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::array<Nil3Point, 3> v{pt(), pt(), pt()};
    const double A = triangle_area(v[0], v[1], v[2]);
    area = std::max(area, std::abs(A - reference_area(v[0], v[1], v[2])) / A);
    AreaGradient g = triangle_area_gradient(v[0], v[1], v[2]);
    std::array<double, 81> H = triangle_area_hessian(v[0], v[1], v[2]);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        auto moved = [&](double s) {
          std::array<Nil3Point, 3> w = v;
          Eigen::Vector3d x = w[a].vec();
          x[c] += s;
          w[a] = Nil3Point::from(x);
          return w;
        };
        const double fd = oracle::d4([&](double s) {
          auto w = moved(s);
          return reference_area(w[0], w[1], w[2]);
        }, 1e-4);
        grad = std::max(grad, std::abs(fd - g.grad[a][c]) / std::max(1.0, A));
        for (int b = 0; b < 3; ++b)
          for (int d = 0; d < 3; ++d) {
            const double hd = oracle::d4([&](double s) {
              auto w = moved(s);
              return triangle_area_gradient(w[0], w[1], w[2]).grad[b][d];
            }, 1e-4);
            hess = std::max(hess, std::abs(hd - H[(3 * a + c) * 9 + 3 * b + d]) / std::max(1.0, A));
          }
      }
    IsometryElement es[] = {IsometryElement::rotation(U(rng)), IsometryElement::vertical_translation(U(rng)),
                            IsometryElement::reflection(U(rng), U(rng)), IsometryElement::left_translation(pt())};
    for (const IsometryElement& e : es)
      inv = std::max(inv, std::abs(triangle_area(apply_isometry(e, v[0]), apply_isometry(e, v[1]),
                                                 apply_isometry(e, v[2])) - A) / A);
  }
  CHECK(area < 1e-13);
  CHECK(grad < 1e-8);
  CHECK(hess < 1e-6);
  CHECK(inv < 1e-12);
  CHECK_THROWS(triangle_area_gradient({0, 0, 0}, {1, 0, 0}, {2, 0, 0}));
}

TEST_CASE("config validation") {
  MinimizeConfig c;
  CHECK_NOTHROW(c.validate());
  c.shrink = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  MinimizeConfig d;
  d.grad_tol = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("saddle piece n=2, a=1, b=4") {
  const Solved& s = saddle_piece();
  CHECK(s.report.converged());
  CHECK(s.report.max_gradient < 1e-7);
  CHECK(s.report.monotone);
  CHECK(s.report.final_area < s.report.initial_area);
  for (std::size_t k = 1; k < s.report.area_history.size(); ++k)
    CHECK(s.report.area_history[k] <= s.report.area_history[k - 1]);
  CHECK(mesh_area(s.mesh) == doctest::Approx(s.report.final_area).epsilon(1e-12));

  double zlo = 1e300, zhi = -1e300;
  for (const Nil3Point& p : s.mesh.vertices) {
    zlo = std::min(zlo, p.x3);
    zhi = std::max(zhi, p.x3);
  }
  CHECK(zlo >= -1e-6);
  CHECK(zhi <= 1.0 + 1e-6);
  std::vector<double> proxy = mean_curvature_proxy(s.mesh);
  CHECK(*std::max_element(proxy.begin(), proxy.end()) < 1e-3);

  // boundary untouched
  for (std::size_t k = 0; k < s.init.num_vertices(); ++k)
    if (s.init.fixed[k]) CHECK((s.mesh.vertices[k].vec() - s.init.vertices[k].vec()).norm() == 0.0);
}

TEST_CASE("barrier ordering") {
  const Solved& s = saddle_piece();
  DeformationState s2 = make_symmetric_graph(2, 0.05, grid(32, 128));
  BarrierReport ok = barrier_check(s.mesh, s2, 1.0, 2);
  CHECK(ok.checked > 0);
  CHECK(ok.violations == 0);
  CHECK(ok.min_margin > 0);

  TriMesh3 shifted = s.mesh;
  for (Nil3Point& p : shifted.vertices) p.x3 += 0.5;
  BarrierReport bad = barrier_check(shifted, s2, 1.0, 2);
  CHECK(bad.violations > 0);
  CHECK(bad.worst_violation > 0);

  CHECK(graph_height(s2.eta, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(graph_height(s2.eta, 1.0, 1.0) > 0.0);
}

TEST_CASE("isometry equivariance of the minimizer") {
  const Solved& s = saddle_piece();
  AffineMap iso = as_affine(IsometryElement::rotation(1.1)).then(as_affine(IsometryElement::vertical_translation(-0.4)));
  TriMesh3 moved = s.init;
  for (Nil3Point& p : moved.vertices) p = iso(p);
  TriMesh3 r = minimize_area(moved, MinimizeConfig{});
  REQUIRE(r.num_vertices() == s.mesh.num_vertices());
  double worst = 0.0;
  for (std::size_t k = 0; k < r.num_vertices(); ++k)
    worst = std::max(worst, (iso(s.mesh.vertices[k]).vec() - r.vertices[k].vec()).norm());
  CHECK(worst < 1e-6);
}

TEST_CASE("flat limit") {
  const double a = 1e-3;
  MinimizeReport rep;
  TriMesh3 m = minimize_area(initial_spanning_mesh(build_contour(a, 2.0, 2, 4.0)), MinimizeConfig{}, &rep);
  CHECK(rep.converged());
  for (const Nil3Point& p : m.vertices) CHECK(std::abs(p.x3) <= a + 1e-12);
  DeformationState flat = make_symmetric_graph(2, 1e-6, grid(16, 64));
  CHECK(barrier_check(m, flat, a, 2).violations == 0);
}

TEST_CASE("continuation in b") {
  ContinuationReport r = continuation_in_b(1.0, 2, {4.0, 6.0, 8.0}, MinimizeConfig{}, 4.0);
  REQUIRE(r.steps.size() == 3);
  REQUIRE(r.deviations.size() == 2);
  CHECK(r.region_radius == 2.0);
  for (const ContinuationStep& s : r.steps) {
    CHECK(s.converged);
    CHECK(s.iterations >= 0);
    CHECK(s.area > 0);
  }
  CHECK(r.steps[1].area > r.steps[0].area);
  CHECK(r.decreasing);
  CHECK(r.deviations[1] < r.deviations[0]);
  CHECK_THROWS(continuation_in_b(1.0, 2, {4.0, 6.0}, MinimizeConfig{}, 4.0));
  CHECK_THROWS(continuation_in_b(1.0, 2, {4.0, 8.0, 6.0}, MinimizeConfig{}, 4.0));

  ContinuationReport f = continuation_in_b(1e-3, 2, {2.0, 3.0, 4.0}, MinimizeConfig{}, 4.0);
  for (double d : f.deviations) CHECK(d < 1e-6);
}

TEST_CASE("region deviation") {
  const Solved& s = saddle_piece();
  CHECK(region_deviation(s.mesh, s.mesh, 2.0) == 0.0);
  TriMesh3 up = s.mesh;
  for (Nil3Point& p : up.vertices) p.x3 += 1e-3;
  CHECK(region_deviation(s.mesh, up, 2.0) == doctest::Approx(1e-3).epsilon(1e-6));
}
