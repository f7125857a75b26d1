#include "nil3/tower.hpp"

#include "nil3/plateau.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace nil3;

namespace {

constexpr double kPi = std::numbers::pi;

const TriMesh3& piece(int n) {
  static TriMesh3 cache[4];
  TriMesh3& m = cache[n];
  if (m.num_vertices() == 0) {
    const double b = n == 2 ? 4.0 : 3.0;
    m = minimize_area(initial_spanning_mesh(build_contour(1.0, b, n, 4.0)), MinimizeConfig{});
  }
  return m;
}

double geodesic_offset(const Nil3Point& p, double angle, double height) {
  // horizontal geodesic through the axis at the given height: x3 = height along the line at angle
  const double c = std::cos(angle), s = std::sin(angle);
  return std::hypot(-s * p.x1 + c * p.x2, p.x3 - height);
}

}  // namespace

TEST_CASE("one period closes up with genus zero") {
  for (int n : {2, 3}) {
    AssemblyReport ar;
    TriMesh3 t = assemble_saddle_tower(piece(n), n, 1.0, 2 * n, 1, &ar);
    CHECK(ar.copies == 2 * n);
    CHECK(ar.seam_error < 1e-12);
    CHECK(ar.weld_gap < 1e-9);
    CHECK(ar.rotation_matched > 0);
    CHECK(ar.rotation_error < 1e-9);
    CHECK(ar.translation_matched > 0);
    CHECK(ar.translation_error < 1e-9);
    CHECK(ar.double_reflection_error < 1e-10);
    CHECK(ar.genus == 0);
    CHECK(ar.z_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ar.z_max == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.num_triangles() == 2 * n * piece(n).num_triangles());
  }
}

TEST_CASE("vertical periods") {
  AssemblyReport ar;
  assemble_saddle_tower(piece(2), 2, 1.0, 4, 2, &ar);
  CHECK(ar.periods == 2);
  CHECK(ar.z_max - ar.z_min == doctest::Approx(4.0).epsilon(1e-12));
  // each extra period glues along the axis star and adds n - 1 handles
  CHECK(ar.genus == 1);
}

TEST_CASE("ends") {
  for (int n : {2, 3}) {
    TriMesh3 t = assemble_saddle_tower(piece(n), n, 1.0, 2 * n, 1);
    const double b = n == 2 ? 4.0 : 3.0;
    EndAsymptoticsReport er = end_asymptotics_report(t, n, {b / 4, b / 2});
    REQUIRE(er.ends.size() == std::size_t(2 * n));
    CHECK(er.all_decreasing);
    for (int k = 0; k < 2 * n; ++k) {
      CHECK(er.ends[k].k == k);
      CHECK(er.ends[k].angle == doctest::Approx(k * kPi / n).epsilon(1e-14));
      CHECK(er.ends[k].samples.size() == 2);
      for (const EndSample& s : er.ends[k].samples) CHECK(s.count > 0);
    }
  }
}

TEST_CASE("boundary vertices lie on their geodesics") {
  const TriMesh3& p = piece(3);
  const double tn = kPi / 3;
  for (std::size_t k = 0; k < p.num_vertices(); ++k) {
    switch (p.tags[k]) {
      case SegmentTag::h1: CHECK(geodesic_offset(p.vertices[k], 0.0, 0.0) < 1e-14); break;
      case SegmentTag::ht1: CHECK(geodesic_offset(p.vertices[k], 0.0, 1.0) < 1e-14); break;
      case SegmentTag::h2: CHECK(geodesic_offset(p.vertices[k], tn, 0.0) < 1e-14); break;
      case SegmentTag::ht2: CHECK(geodesic_offset(p.vertices[k], tn, 1.0) < 1e-14); break;
      default: break;
    }
  }
}

TEST_CASE("assembly failures") {
  TriMesh3 bad = piece(2);
  for (std::size_t k = 0; k < bad.num_vertices(); ++k)
    if (bad.tags[k] == SegmentTag::h1 && bad.vertices[k].x1 > 1.0) {
      bad.vertices[k].x3 += 1e-3;
      break;
    }
  CHECK_THROWS_AS(assemble_saddle_tower(bad, 2, 1.0, 4, 1), AssemblyError);
  try {
    assemble_saddle_tower(bad, 2, 1.0, 4, 1);
  } catch (const AssemblyError& e) {
    CHECK(e.location.x3 > 0.0);
  }
  CHECK_THROWS_AS(assemble_saddle_tower(piece(2), 1, 1.0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(assemble_saddle_tower(piece(2), 2, 1.0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(assemble_saddle_tower(piece(2), 2, 1.0, 4, 0), std::invalid_argument);
}
