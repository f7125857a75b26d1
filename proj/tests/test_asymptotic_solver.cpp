#include "nil3/asymptotic_solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
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

}  // namespace

TEST_CASE("boundary data") {
  BoundaryData s = BoundaryData::sine(64, 3, 0.2);
  CHECK(s.sin_coeffs()[3] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(s.mean()) < 1e-16);
  CHECK(s.evaluate(0.3) == doctest::Approx(0.2 * std::sin(0.9)).epsilon(1e-13));
  BoundaryData f = BoundaryData::fourier(32, {0.1, 0.0, 0.5});
  CHECK(f.mean() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(f.samples()[8] == doctest::Approx(0.1 + 0.5).epsilon(1e-14));
  BoundaryData r = s.resampled(128);
  CHECK(r.ntheta() == 128);
  CHECK(r.samples()[5] == doctest::Approx(0.2 * std::sin(3 * 2 * kPi * 5 / 128)).epsilon(1e-12));
}

TEST_CASE("harmonic extension") {
  ScalarDiskField one = harmonic_extension(BoundaryData::fourier(64, {1.0}), 16, 64);
  CHECK((one - ScalarDiskField::sample(16, 64, [](double, double) { return 1.0; })).max_abs() < 1e-14);
  ScalarDiskField c = harmonic_extension(BoundaryData::sample(64, [](double t) { return std::cos(t); }), 16, 64);
  CHECK((c - ScalarDiskField::sample(16, 64, [](double r, double t) { return r * std::cos(t); })).max_abs() < 1e-14);
}

TEST_CASE("config validation") {
  SolverConfig c;
  c.nr = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  SolverConfig d;
  d.newton_tol = -1;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS(make_symmetric_graph(3, 0.05, grid(16, 64)));
}

TEST_CASE("trivial solutions") {
  SolverConfig cfg = grid(32, 128);
  DeformationState z = solve_minimal_graph(BoundaryData(std::vector<double>(128, 0.0)), 0.0, cfg);
  CHECK(z.minimal());
  CHECK(z.eta.max_abs() == 0.0);
  CHECK(z.kappa == 0.0);
  CHECK(z.newton_iterations <= 1);

  DeformationState t = solve_minimal_graph(BoundaryData(std::vector<double>(128, 0.0)), 0.3, cfg);
  CHECK(t.minimal());
  CHECK((t.eta - 0.3 * phi0_field(32, 128)).max_abs() < 1e-10);
}

TEST_CASE("obstruction for a constant datum") {
  double prev = 0.0;
  for (int nr : {16, 32, 64}) {
    DeformationState st = solve_minimal_graph(BoundaryData::fourier(4 * nr, {0.1}), 0.0, grid(nr, 4 * nr));
    CHECK(st.converged);
    CHECK(st.obstructed);
    CHECK(std::abs(st.kappa) > 1e-3);
    if (prev != 0.0) CHECK(st.kappa == doctest::Approx(prev).epsilon(1e-3));
    prev = st.kappa;
  }
}

TEST_CASE("kappa map") {
  SolverConfig cfg = grid(64, 256);
  for (double lam : {-0.3, 0.0, 0.3})
    CHECK(std::abs(kappa_map(BoundaryData(std::vector<double>(256, 0.0)), lam, cfg)) < 1e-9);
  const double t = 1e-6;
  const double d1 = (kappa_map(BoundaryData::fourier(256, {t}), 0, cfg) -
                     kappa_map(BoundaryData::fourier(256, {-t}), 0, cfg)) / (2 * t);
  CHECK(d1 == doctest::Approx(oracle::d1_kappa()).epsilon(1e-5));

  SolverConfig mixed = grid(32, 240);
  for (int n = 2; n <= 5; ++n) CHECK(std::abs(kappa_map(BoundaryData::sine(240, n, 0.05), 0, mixed)) < 1e-7);
}

TEST_CASE("solution for sin 2 theta") {
  SolverConfig cfg = grid(64, 256);
  DeformationState st = solve_minimal_graph(BoundaryData::sine(256, 2, 0.05), 0.0, cfg);
  CHECK(st.minimal());
  CHECK(st.residual_norm < 1e-8);
  CHECK(std::abs(st.kappa) < 1e-7);
  CHECK(std::abs(vertical_flux(st.eta, 0.9).integral_route) < 1e-6);
  for (int j = 0; j < 256; ++j) CHECK(st.eta.trace(j) == doctest::Approx(st.gamma.samples()[j]).epsilon(1e-14));

  // quadratic convergence above the rounding floor: h[k] <= C h[k-1]^2
  const auto& h = st.residual_history;
  REQUIRE(h.size() >= 3);
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k] > 1e-12) CHECK(h[k] < h[k - 1] * h[k - 1]);

  // orthogonality of sigma to phi0
  CHECK(std::abs(st.orthogonality) < 1e-10);
}

TEST_CASE("grid refinement") {
  auto solve = [](int nr) {
    return solve_minimal_graph(BoundaryData::sine(4 * nr, 2, 0.05), 0.0, grid(nr, 4 * nr)).eta;
  };
  ScalarDiskField a = solve(16), b = solve(32), c = solve(64);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 1; i < 10; ++i)
    for (int j = 0; j < 12; ++j) {
      const double r = 0.09 * i, th = 0.5 * j;
      e1 = std::max(e1, std::abs(interpolate(a, r, th) - interpolate(b, r, th)));
      e2 = std::max(e2, std::abs(interpolate(b, r, th) - interpolate(c, r, th)));
    }
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("translation equivariance") {
  SolverConfig cfg = grid(32, 128);
  BoundaryData g = BoundaryData::sine(128, 3, 0.05);
  DeformationState s0 = solve_minimal_graph(g, 0.0, cfg), s1 = solve_minimal_graph(g, 0.2, cfg);
  CHECK((s1.eta - s0.eta - 0.2 * phi0_field(32, 128)).max_abs() < 1e-8);
}

TEST_CASE("Jacobian routes agree") {
  SolverConfig cfg = grid(16, 64);
  ScalarDiskField sigma = ScalarDiskField::sample(16, 64, [](double r, double th) {
    return 0.03 * r * (1 - r * r) * std::sin(th);
  });
  for (double& t : sigma.trace()) t = 0.0;
  JacobianCheck jc = compare_jacobians(BoundaryData::sine(64, 2, 0.1), 0.2, sigma, cfg);
  CHECK(jc.max_abs_difference / jc.max_abs_entry < 1e-5);

  SolverConfig fd = grid(32, 128);
  fd.jacobian = JacobianMode::finite_difference;
  DeformationState a = solve_minimal_graph(BoundaryData::sine(128, 2, 0.05), 0.0, fd);
  DeformationState b = solve_minimal_graph(BoundaryData::sine(128, 2, 0.05), 0.0, grid(32, 128));
  CHECK(a.minimal());
  CHECK((a.eta - b.eta).max_abs() < 1e-9);
}

TEST_CASE("symmetric graphs S_n") {
  DeformationState s2 = make_symmetric_graph(2, 0.05, grid(64, 256));
  REQUIRE(s2.minimal());
  CHECK(s2.newton_iterations <= 10);
  CHECK(std::abs(center_value(s2.eta)) < 1e-12);
  const ScalarDiskField& e = s2.eta;
  double odd = 0.0, neg = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 256; ++j) {
      odd = std::max(odd, std::abs(e(i, j) + e(i, (256 - j) % 256)));
      if (j <= 64) neg = std::max(neg, -e(i, j));
    }
  CHECK(odd < 1e-8);
  CHECK(neg < 1e-8);

  DeformationState s3 = make_symmetric_graph(3, 0.05, grid(32, 120));
  REQUIRE(s3.minimal());
  double rot = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 120; ++j) rot = std::max(rot, std::abs(s3.eta(i, j) - s3.eta(i, (j + 40) % 120)));
  CHECK(rot < 1e-9);
}

TEST_CASE("disjoint domains") {
  DisjointReport r2 = disjoint_graph_domains(2, 0.05, grid(32, 128));
  REQUIRE(r2.sectors.size() == 4);
  CHECK(r2.all_certified);
  for (int k = 0; k < 4; ++k) CHECK(r2.sectors[k].sign == (k % 2 == 0 ? 1 : -1));
  DisjointReport r5 = disjoint_graph_domains(5, 0.03, grid(32, 120));
  CHECK(r5.sectors.size() == 10);
  CHECK(r5.all_certified);
  CHECK(r5.ray_max_abs < 1e-8);
  CHECK_THROWS_AS(disjoint_graph_domains(2, 0.0, grid(32, 128)), std::invalid_argument);
}

TEST_CASE("graph mesh export") {
  SolverConfig cfg = grid(16, 64);
  DeformationState flat = solve_minimal_graph(BoundaryData(std::vector<double>(64, 0.0)), 0.0, cfg);
  TriMesh3 m = export_graph_mesh(flat, 5.0, 12);
  CHECK(m.num_triangles() > 0);
  for (const Nil3Point& p : m.vertices) CHECK(std::abs(p.x3) < 1e-14);
  DeformationState up = solve_minimal_graph(BoundaryData(std::vector<double>(64, 0.0)), 0.3, cfg);
  for (const Nil3Point& p : export_graph_mesh(up, 5.0, 12).vertices) CHECK(p.x3 == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(m.euler_characteristic() == 1);
  CHECK(m.boundary_components() == 1);
}
