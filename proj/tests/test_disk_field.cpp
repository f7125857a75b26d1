#include "nil3/asymptotic_solver.hpp"
#include "nil3/disk_field.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace nil3;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarDiskField smooth(int nr, int nt, double s) {
  return ScalarDiskField::sample(nr, nt, [s](double r, double th) {
    const double x = r * std::cos(th), y = r * std::sin(th);
    return s * (0.3 + 0.5 * x - 0.2 * y + 0.4 * x * y - 0.3 * y * y + 0.25 * x * x * x);
  });
}

}  // namespace

TEST_CASE("grid layout") {
  ScalarDiskField f(8, 16);
  CHECK(f.size() == 128);
  CHECK(f.r(0) == doctest::Approx(1.0 / 16));
  CHECK(f.r(7) == doctest::Approx(15.0 / 16));
  CHECK(f.theta(4) == doctest::Approx(kPi / 2));
  CHECK(f.dtheta() == doctest::Approx(kPi / 8));
  ScalarDiskField g = ScalarDiskField::sample(8, 16, [](double r, double) { return r; });
  CHECK(g(3, 5) == doctest::Approx(3.5 / 8));
  CHECK(g.trace(2) == 1.0);
  ScalarDiskField h = 2.0 * g - g;
  CHECK((h - g).max_abs() == 0.0);
}

TEST_CASE("quadrature") {
  ScalarDiskField one = ScalarDiskField::sample(32, 128, [](double, double) { return 1.0; });
  CHECK(integrate(one) == doctest::Approx(kPi).epsilon(1e-12));
  ScalarDiskField r2 = ScalarDiskField::sample(64, 256, [](double r, double) { return r * r; });
  CHECK(integrate(r2) == doctest::Approx(kPi / 2).epsilon(1e-3));
  CHECK(trace_integral(one) == doctest::Approx(2 * kPi).epsilon(1e-14));
  ScalarDiskField a = smooth(16, 64, 1.0), b = smooth(16, 64, -0.5);
  CHECK(inner_product(a, b) == doctest::Approx(inner_product(b, a)).epsilon(1e-15));
}

TEST_CASE("Jacobi operator kernel") {
  double prev = 0.0;
  for (int nr : {16, 32, 64}) {
    const double res = jacobi_apply(phi0_field(nr, 4 * nr)).max_abs();
    if (prev > 0) CHECK(std::log2(prev / res) >= 1.8);
    prev = res;
  }
  CHECK(prev < 5e-4);

  ScalarDiskField c = ScalarDiskField::sample(32, 128, [](double, double) { return 0.6; });
  ScalarDiskField L = jacobi_apply(c);
  for (int i = 0; i < 32; ++i) {
    const double p = 1 + c.r(i) * c.r(i);
    CHECK(L(i, 7) == doctest::Approx(8 * 0.6 / (p * p)).epsilon(1e-10));
  }
}

TEST_CASE("Jacobi operator is the derivative of the compactified operator") {
  ScalarDiskField f = smooth(32, 128, 1.0);
  ScalarDiskField zero(32, 128);
  const double t = 1e-5;
  ScalarDiskField fd = (1.0 / t) * (compactified_H_field(t * f) - compactified_H_field(zero));
  CHECK((fd - jacobi_apply(f)).max_abs() < 1e-4);
  CHECK(compactified_H_field(zero).max_abs() == 0.0);
}

TEST_CASE("flat Laplacian of harmonic extensions") {
  ScalarDiskField mu = harmonic_extension(BoundaryData::sine(256, 3, 1.0), 64, 256);
  CHECK(flat_laplacian(mu).max_abs() < 5e-4);
  ScalarDiskField c = harmonic_extension(BoundaryData::sample(64, [](double th) { return std::cos(th); }), 16, 64);
  CHECK(c(5, 3) == doctest::Approx(c.r(5) * std::cos(c.theta(3))).epsilon(1e-12));
}

TEST_CASE("Green identity") {
  ScalarDiskField u = smooth(32, 128, 1.0);
  CHECK(green_residual(u, u) == 0.0);

  double prev_b = 1e300, prev_r = 0.0;
  for (int nr : {16, 32, 64}) {
    ScalarDiskField one = ScalarDiskField::sample(nr, 4 * nr, [](double, double) { return 1.0; });
    GreenTerms g = green_terms(phi0_field(nr, 4 * nr), one);
    const double err = std::abs(g.boundary - 2 * kPi);
    CHECK(err < prev_b);
    prev_b = err;
    ScalarDiskField v = ScalarDiskField::sample(nr, 4 * nr, [](double r, double th) {
      return std::exp(0.3 * r * std::cos(th)) + r * r * std::sin(2 * th);
    });
    const double res = std::abs(green_residual(smooth(nr, 4 * nr, 1.0), v));
    if (prev_r > 0) CHECK(std::log2(prev_r / res) == doctest::Approx(2.0).epsilon(0.15));
    prev_r = res;
  }
  CHECK(prev_b < 2e-2);
}

TEST_CASE("vertical flux") {
  ScalarDiskField c = ScalarDiskField::sample(32, 128, [](double, double) { return 0.4; });
  CHECK(vertical_flux(c, 0.9).limit_route == doctest::Approx(2 * kPi * 0.4).epsilon(1e-14));
  ScalarDiskField z = ScalarDiskField::sample(32, 128, [](double r, double th) { return r * r * std::cos(2 * th); });
  CHECK(std::abs(vertical_flux(z, 0.9).limit_route) < 1e-14);
  CHECK(std::abs(vertical_flux(z, 0.9).integral_route) < 1e-12);

  ScalarDiskField f = ScalarDiskField::sample(64, 256, [](double r, double th) { return 0.1 + 0.05 * r * std::sin(th); });
  double prev = 1e300;
  for (double R : {0.7, 0.8, 0.9, 0.95}) {
    FluxReport fr = vertical_flux(f, R);
    CHECK(fr.difference == doctest::Approx(fr.integral_route - fr.limit_route));
    CHECK(std::abs(fr.difference) < prev);
    prev = std::abs(fr.difference);
  }
  CHECK_THROWS(vertical_flux(f, 1.0));
}

TEST_CASE("asymptotic distance") {
  AsymptoticDistanceReport z = asymptotic_distance(0.3 * phi0_field(32, 128));
  for (double g : z.gamma) CHECK(std::abs(g) < 1e-15);
  ScalarDiskField s = ScalarDiskField::sample(64, 256, [](double r, double th) {
    return (2 * r * r - r * r * r * r) * std::sin(2 * th);
  });
  AsymptoticDistanceReport a = asymptotic_distance(s);
  CHECK(a.gamma[32] == doctest::Approx(std::sin(2 * s.theta(32))).epsilon(1e-14));
  CHECK(a.max_deviation < 1e-2);
}

TEST_CASE("interpolation, center value and boundary derivative") {
  ScalarDiskField f = smooth(32, 128, 1.0);
  CHECK(interpolate(f, f.r(5), f.theta(17)) == doctest::Approx(f(5, 17)).epsilon(1e-13));
  const double r = 0.4567, th = 1.234, x = r * std::cos(th), y = r * std::sin(th);
  const double exact = 0.3 + 0.5 * x - 0.2 * y + 0.4 * x * y - 0.3 * y * y + 0.25 * x * x * x;
  CHECK(interpolate(f, r, th) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(center_value(phi0_field(64, 256)) == doctest::Approx(1.0).epsilon(1e-4));
  ScalarDiskField p = phi0_field(64, 256);
  CHECK(boundary_derivative(p, 10) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("CSV round trip") {
  ScalarDiskField f = smooth(8, 16, 1.0);
  std::stringstream ss;
  write_field_csv(ss, f);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "r,theta,eta");
  ss.seekg(0);
  ScalarDiskField g = read_field_csv(ss);
  CHECK(g.nr() == 8);
  CHECK(g.ntheta() == 16);
  CHECK((f - g).max_abs() == 0.0);
  for (int j = 0; j < 16; ++j) CHECK(g.trace(j) == f.trace(j));
}
