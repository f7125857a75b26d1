#include "nil3/mesh.hpp"

#include <doctest.h>

#include <sstream>

using namespace nil3;

namespace {

// n x n grid of unit squares split along one diagonal
TriMesh3 square(int n) {
  TriMesh3 m;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.add_vertex({double(i), double(j), 0.1 * i * j});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i, b = a + 1, c = a + n + 2, d = a + n + 1;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  return m;
}

}  // namespace

TEST_CASE("topology counts") {
  TriMesh3 m = square(3);
  CHECK(m.num_vertices() == 16);
  CHECK(m.num_triangles() == 18);
  CHECK(m.num_edges() == 33);
  CHECK(m.euler_characteristic() == 1);
  CHECK(m.boundary_components() == 1);
  std::vector<bool> b = m.boundary_vertices();
  CHECK(std::count(b.begin(), b.end(), true) == 12);

  // closed tetrahedron
  TriMesh3 t;
  t.add_vertex({0, 0, 0});
  t.add_vertex({1, 0, 0});
  t.add_vertex({0, 1, 0});
  t.add_vertex({0, 0, 1});
  t.triangles = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  CHECK(t.euler_characteristic() == 2);
  CHECK(t.boundary_components() == 0);
}

TEST_CASE("pinched vertices") {
  // two triangles touching at vertex 0 only
  TriMesh3 m;
  m.add_vertex({0, 0, 0});
  m.add_vertex({1, 0, 0});
  m.add_vertex({0, 1, 0});
  m.add_vertex({-1, 0, 0});
  m.add_vertex({0, -1, 0});
  m.triangles = {{0, 1, 2}, {0, 3, 4}};
  CHECK(m.euler_characteristic() == 1);
  CHECK(m.split_pinched_vertices() == 1);
  CHECK(m.num_vertices() == 6);
  CHECK(m.euler_characteristic() == 2);
  CHECK(m.boundary_components() == 2);
  CHECK(square(2).split_pinched_vertices() == 0);
}

TEST_CASE("OBJ round trip") {
  TriMesh3 m = square(2);
  std::stringstream ss;
  write_obj(ss, m);
  std::string first;
  std::getline(ss, first);
  ss.seekg(0);
  TriMesh3 r = read_obj(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  REQUIRE(r.num_triangles() == m.num_triangles());
  for (std::size_t k = 0; k < m.num_vertices(); ++k) CHECK((r.vertices[k].vec() - m.vertices[k].vec()).norm() == 0.0);
  CHECK(r.triangles == m.triangles);

  std::stringstream bad("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS(read_obj(bad));
}

TEST_CASE("PLY round trip with scalar") {
  TriMesh3 m = square(2);
  m.scalar.resize(m.num_vertices());
  for (std::size_t k = 0; k < m.num_vertices(); ++k) m.scalar[k] = 0.25 * k;
  std::stringstream ss;
  write_ply(ss, m);
  CHECK(ss.str().rfind("ply\n", 0) == 0);
  TriMesh3 r = read_ply(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  CHECK(r.triangles == m.triangles);
  CHECK(r.scalar == m.scalar);
}

TEST_CASE("tags") {
  CHECK(std::string(tag_name(SegmentTag::h1)) == "h1");
  CHECK(std::string(tag_name(SegmentTag::ht2)) == "ht2");
  TriMesh3 m;
  int v = m.add_vertex({1, 2, 3}, SegmentTag::v1, true);
  CHECK(v == 0);
  CHECK(m.tags[0] == SegmentTag::v1);
  CHECK(m.fixed[0]);
}
