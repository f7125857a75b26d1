#pragma once

#include "nil3/heisenberg.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace nil3 {

enum class SegmentTag : int { none = -1, h1 = 0, v1 = 1, ht1 = 2, ht2 = 3, v2 = 4, h2 = 5, ring = 6 };

const char* tag_name(SegmentTag t);

struct TriMesh3 {
  std::vector<Nil3Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<SegmentTag> tags;   // per vertex, none for interior vertices
  std::vector<bool> fixed;        // per vertex mobility
  std::vector<double> scalar;     // optional per-vertex scalar, empty if unused

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  int add_vertex(const Nil3Point& p, SegmentTag tag = SegmentTag::none, bool is_fixed = false);

  // Undirected edge count and Euler characteristic V - E + F.
  std::size_t num_edges() const;
  long euler_characteristic() const;
  // Number of closed boundary loops (edges used by exactly one triangle).
  int boundary_components() const;
  // Vertices on edges used by exactly one triangle.
  std::vector<bool> boundary_vertices() const;
  // Duplicates vertices whose incident triangles form several edge-connected fans;
  // returns the number of vertices added.
  std::size_t split_pinched_vertices();
};

void write_obj(std::ostream& os, const TriMesh3& m);
void write_obj(const std::string& path, const TriMesh3& m);
TriMesh3 read_obj(std::istream& is);
TriMesh3 read_obj(const std::string& path);

// ASCII PLY with an optional per-vertex scalar property "value".
void write_ply(std::ostream& os, const TriMesh3& m);
void write_ply(const std::string& path, const TriMesh3& m);
TriMesh3 read_ply(std::istream& is);

}  // namespace nil3
