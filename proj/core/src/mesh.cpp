#include "nil3/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nil3 {

namespace {

using Edge = std::pair<int, int>;

std::map<Edge, int> edge_counts(const TriMesh3& m) {
  std::map<Edge, int> count;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  return count;
}

std::string fmt_point(const Nil3Point& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", p.x1, p.x2, p.x3);
  return buf;
}

}  // namespace

const char* tag_name(SegmentTag t) {
  switch (t) {
    case SegmentTag::h1: return "h1";
    case SegmentTag::v1: return "v1";
    case SegmentTag::ht1: return "ht1";
    case SegmentTag::ht2: return "ht2";
    case SegmentTag::v2: return "v2";
    case SegmentTag::h2: return "h2";
    case SegmentTag::ring: return "ring";
    case SegmentTag::none: break;
  }
  return "none";
}

int TriMesh3::add_vertex(const Nil3Point& p, SegmentTag tag, bool is_fixed) {
  vertices.push_back(p);
  tags.push_back(tag);
  fixed.push_back(is_fixed);
  return static_cast<int>(vertices.size()) - 1;
}

std::size_t TriMesh3::num_edges() const { return edge_counts(*this).size(); }

long TriMesh3::euler_characteristic() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(num_edges()) +
         static_cast<long>(triangles.size());
}

std::vector<bool> TriMesh3::boundary_vertices() const {
  std::vector<bool> on(vertices.size(), false);
  for (const auto& [e, c] : edge_counts(*this)) {
    if (c == 1) on[e.first] = on[e.second] = true;
  }
  return on;
}

int TriMesh3::boundary_components() const {
  std::map<int, std::vector<int>> adj;
  for (const auto& [e, c] : edge_counts(*this)) {
    if (c != 1) continue;
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  std::map<int, bool> seen;
  int loops = 0;
  for (const auto& [v, nb] : adj) {
    if (seen[v]) continue;
    ++loops;
    std::vector<int> stack{v};
    seen[v] = true;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x]) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return loops;
}

std::size_t TriMesh3::split_pinched_vertices() {
  std::vector<std::vector<int>> incident(vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t]) incident[v].push_back(static_cast<int>(t));
  }
  std::size_t added = 0;
  const std::size_t nv = vertices.size();
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& inc = incident[v];
    if (inc.size() < 2) continue;
    std::vector<int> parent(inc.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<int, int> first_with;  // neighbour vertex -> local triangle index
    for (std::size_t k = 0; k < inc.size(); ++k) {
      for (int u : triangles[inc[k]]) {
        if (u == static_cast<int>(v)) continue;
        auto [it, fresh] = first_with.emplace(u, static_cast<int>(k));
        if (!fresh) parent[find(static_cast<int>(k))] = find(it->second);
      }
    }
    std::map<int, int> fan_vertex;
    for (std::size_t k = 0; k < inc.size(); ++k) {
      const int root = find(static_cast<int>(k));
      auto it = fan_vertex.find(root);
      if (it == fan_vertex.end()) {
        const int id = fan_vertex.empty() ? static_cast<int>(v)
                                          : add_vertex(vertices[v], tags.empty() ? SegmentTag::none : tags[v],
                                                       !fixed.empty() && fixed[v]);
        if (!fan_vertex.empty()) {
          if (!scalar.empty()) scalar.push_back(scalar[v]);
          ++added;
        }
        it = fan_vertex.emplace(root, id).first;
      }
      for (int& w : triangles[inc[k]]) {
        if (w == static_cast<int>(v)) w = it->second;
      }
    }
  }
  return added;
}

void write_obj(std::ostream& os, const TriMesh3& m) {
  for (const auto& p : m.vertices) os << "v " << fmt_point(p) << '\n';
  for (const auto& t : m.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::string& path, const TriMesh3& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_obj(os, m);
}

TriMesh3 read_obj(std::istream& is) {
  TriMesh3 m;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "v") {
      Nil3Point p;
      if (!(ss >> p.x1 >> p.x2 >> p.x3)) throw std::runtime_error("read_obj: malformed vertex: " + line);
      m.add_vertex(p);
    } else if (key == "f") {
      std::array<int, 3> t{};
      for (int& k : t) {
        std::string tok;
        if (!(ss >> tok)) throw std::runtime_error("read_obj: face needs three indices: " + line);
        k = std::stoi(tok.substr(0, tok.find('/'))) - 1;
        if (k < 0 || k >= static_cast<int>(m.num_vertices()))
          throw std::runtime_error("read_obj: face index out of range: " + line);
      }
      m.triangles.push_back(t);
    }
  }
  return m;
}

TriMesh3 read_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_obj(is);
}

void write_ply(std::ostream& os, const TriMesh3& m) {
  const bool has_scalar = m.scalar.size() == m.vertices.size() && !m.vertices.empty();
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << m.vertices.size() << '\n';
  os << "property double x\nproperty double y\nproperty double z\n";
  if (has_scalar) os << "property double value\n";
  os << "element face " << m.triangles.size() << '\n';
  os << "property list uchar int vertex_indices\nend_header\n";
  char buf[32];
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    os << fmt_point(m.vertices[k]);
    if (has_scalar) {
      std::snprintf(buf, sizeof buf, " %.17g", m.scalar[k]);
      os << buf;
    }
    os << '\n';
  }
  for (const auto& t : m.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_ply(const std::string& path, const TriMesh3& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_ply(os, m);
}

TriMesh3 read_ply(std::istream& is) {
  std::string line;
  std::size_t nv = 0, nf = 0;
  bool has_scalar = false;
  while (std::getline(is, line) && line != "end_header") {
    std::istringstream ss(line);
    std::string a, b, c;
    ss >> a >> b >> c;
    if (a == "element" && b == "vertex") nv = std::stoul(c);
    if (a == "element" && b == "face") nf = std::stoul(c);
    if (a == "property" && c == "value") has_scalar = true;
  }
  TriMesh3 m;
  for (std::size_t k = 0; k < nv; ++k) {
    Nil3Point p;
    is >> p.x1 >> p.x2 >> p.x3;
    m.add_vertex(p);
    if (has_scalar) {
      double v;
      is >> v;
      m.scalar.push_back(v);
    }
  }
  for (std::size_t k = 0; k < nf; ++k) {
    int n;
    std::array<int, 3> t{};
    is >> n >> t[0] >> t[1] >> t[2];
    if (n != 3) throw std::runtime_error("ply: only triangles supported");
    m.triangles.push_back(t);
  }
  return m;
}

}  // namespace nil3
