#include "nil3/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace nil3 {

namespace {

struct CellHash {
  std::size_t operator()(const std::array<long long, 3>& c) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

// Bucketed point lookup for near-coincident vertices.
class PointIndex {
 public:
  PointIndex(const std::vector<Nil3Point>& pts, double cell) : pts_(pts), cell_(cell) {
    for (std::size_t k = 0; k < pts.size(); ++k) grid_[key(pts[k])].push_back(static_cast<int>(k));
  }

  // Nearest indexed point within `radius` (radius <= cell), or -1.
  int nearest(const Nil3Point& p, double radius, double* dist = nullptr) const {
    const auto c = key(p);
    int best = -1;
    double bd = radius;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid_.end()) continue;
          for (int k : it->second) {
            const double d = (pts_[k].vec() - p.vec()).norm();
            if (d <= bd) {
              bd = d;
              best = k;
            }
          }
        }
      }
    }
    if (dist) *dist = best >= 0 ? bd : 0.0;
    return best;
  }

 private:
  std::array<long long, 3> key(const Nil3Point& p) const {
    return {static_cast<long long>(std::floor(p.x1 / cell_)), static_cast<long long>(std::floor(p.x2 / cell_)),
            static_cast<long long>(std::floor(p.x3 / cell_))};
  }

  const std::vector<Nil3Point>& pts_;
  double cell_;
  std::unordered_map<std::array<long long, 3>, std::vector<int>, CellHash> grid_;
};

AffineMap power(const AffineMap& m, int k) {
  AffineMap out;
  for (int i = 0; i < k; ++i) out = out.then(m);
  return out;
}

double wrap_angle(double t) {
  while (t > std::numbers::pi) t -= 2 * std::numbers::pi;
  while (t < -std::numbers::pi) t += 2 * std::numbers::pi;
  return t;
}

}  // namespace

TriMesh3 assemble_saddle_tower(const TriMesh3& fundamental, int n, double a, int rotation_copies,
                               int vertical_periods, AssemblyReport* report) {
  if (n < 2 || !(a > 0) || rotation_copies < 1 || rotation_copies > 2 * n || vertical_periods < 1) {
    throw std::invalid_argument("assemble_saddle_tower: invalid parameters");
  }
  AssemblyReport rep;
  const AffineMap R0 = as_affine(IsometryElement::reflection_k(0, n, 0.0));
  const AffineMap R1 = as_affine(IsometryElement::reflection_k(1, n, 0.0));
  const AffineMap R0a = as_affine(IsometryElement::reflection_k(0, n, a));
  const AffineMap R1a = as_affine(IsometryElement::reflection_k(1, n, a));
  const AffineMap rot = R0.then(R1);   // rotation by 2 theta_n
  const AffineMap lift = R0.then(R0a); // vertical translation by 2a

  // Seams: boundary geodesics of the fundamental piece are fixed by their reflections.
  for (std::size_t v = 0; v < fundamental.vertices.size(); ++v) {
    const Nil3Point& p = fundamental.vertices[v];
    const AffineMap* r = nullptr;
    switch (fundamental.tags.empty() ? SegmentTag::none : fundamental.tags[v]) {
      case SegmentTag::h1: r = &R0; break;
      case SegmentTag::h2: r = &R1; break;
      case SegmentTag::ht1: r = &R0a; break;
      case SegmentTag::ht2: r = &R1a; break;
      default: break;
    }
    if (!r) continue;
    const double e = ((*r)(p).vec() - p.vec()).norm();
    if (e > rep.seam_error) rep.seam_error = e;
    if (e > 1e-6) throw AssemblyError("assemble_saddle_tower: seam vertex off its geodesic", p);
    const Vec3 twice = lift(p).vec() - (p.vec() + Vec3(0, 0, 2 * a));
    rep.double_reflection_error = std::max(rep.double_reflection_error, twice.norm());
  }
  for (const Nil3Point& p : fundamental.vertices) {
    const Vec3 e = R0a(R0(p)).vec() - (p.vec() + Vec3(0, 0, 2 * a));
    rep.double_reflection_error = std::max(rep.double_reflection_error, e.norm());
  }

  TriMesh3 raw;
  const std::size_t nv = fundamental.vertices.size();
  for (int k = 0; k < rotation_copies; ++k) {
    for (int m = 0; m < vertical_periods; ++m) {
      AffineMap map;
      bool flip = false;
      if (k % 2 == 0) {
        map = power(rot, k / 2).then(power(lift, m));
      } else {
        map = R1a.then(power(rot, (k - 1) / 2)).then(power(lift, m));
        flip = true;
      }
      const int base = static_cast<int>(raw.vertices.size());
      for (std::size_t v = 0; v < nv; ++v) {
        raw.add_vertex(map(fundamental.vertices[v]), fundamental.tags.empty() ? SegmentTag::none : fundamental.tags[v],
                       false);
      }
      for (const auto& t : fundamental.triangles) {
        if (flip) raw.triangles.push_back({base + t[0], base + t[2], base + t[1]});
        else raw.triangles.push_back({base + t[0], base + t[1], base + t[2]});
      }
      ++rep.copies;
    }
  }
  rep.periods = vertical_periods;

  // Weld coincident vertices.
  constexpr double kWeld = 1e-9;
  TriMesh3 out;
  std::vector<int> remap(raw.vertices.size(), -1);
  {
    std::vector<Nil3Point> kept;
    std::unordered_map<std::array<long long, 3>, std::vector<int>, CellHash> grid;
    const double cell = 1e-7;
    auto key = [&](const Nil3Point& p) {
      return std::array<long long, 3>{static_cast<long long>(std::floor(p.x1 / cell)),
                                      static_cast<long long>(std::floor(p.x2 / cell)),
                                      static_cast<long long>(std::floor(p.x3 / cell))};
    };
    for (std::size_t v = 0; v < raw.vertices.size(); ++v) {
      const Nil3Point& p = raw.vertices[v];
      const auto c = key(p);
      int found = -1;
      double gap = 0.0;
      for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
        for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
          for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
            auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
            if (it == grid.end()) continue;
            for (int k : it->second) {
              const double d = (out.vertices[k].vec() - p.vec()).norm();
              if (d <= kWeld) {
                found = k;
                gap = d;
                break;
              }
            }
          }
        }
      }
      if (found >= 0) {
        remap[v] = found;
        ++rep.welded;
        rep.weld_gap = std::max(rep.weld_gap, gap);
      } else {
        remap[v] = out.add_vertex(p, raw.tags[v], false);
        grid[c].push_back(remap[v]);
      }
    }
  }
  for (const auto& t : raw.triangles) out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});

  // Symmetry checks on matched vertices.
  const PointIndex index(out.vertices, 1e-6);
  for (const Nil3Point& p : out.vertices) {
    double d = 0.0;
    if (rotation_copies == 2 * n && index.nearest(rot(p), 1e-6, &d) >= 0) {
      ++rep.rotation_matched;
      rep.rotation_error = std::max(rep.rotation_error, d);
    }
    if (index.nearest(lift(p), 1e-6, &d) >= 0) {
      ++rep.translation_matched;
      rep.translation_error = std::max(rep.translation_error, d);
    }
  }

  TriMesh3 topo = out;
  rep.pinched = topo.split_pinched_vertices();
  rep.euler_characteristic = topo.euler_characteristic();
  rep.boundary_components = topo.boundary_components();
  const long twice_genus = 2 - rep.boundary_components - rep.euler_characteristic;
  rep.genus = twice_genus % 2 == 0 ? static_cast<int>(twice_genus / 2) : -1;
  rep.z_min = std::numeric_limits<double>::infinity();
  rep.z_max = -std::numeric_limits<double>::infinity();
  for (const Nil3Point& p : out.vertices) {
    rep.z_min = std::min(rep.z_min, p.x3);
    rep.z_max = std::max(rep.z_max, p.x3);
  }
  if (report) *report = rep;
  return out;
}

EndAsymptoticsReport end_asymptotics_report(const TriMesh3& assembly, int n, const std::vector<double>& radii) {
  EndAsymptoticsReport rep;
  const double tn = std::numbers::pi / n;
  rep.all_decreasing = true;
  for (int k = 0; k < 2 * n; ++k) {
    EndReport e;
    e.k = k;
    e.angle = k * tn;
    for (double r0 : radii) {
      EndSample s;
      s.rho = r0;
      const double band = 0.05 * r0;
      for (const Nil3Point& p : assembly.vertices) {
        const double rho = std::hypot(p.x1, p.x2);
        if (std::abs(rho - r0) > band) continue;
        const double dt = wrap_angle(std::atan2(p.x2, p.x1) - e.angle);
        if (std::abs(dt) >= 0.5 * tn) continue;
        s.deviation = std::max(s.deviation, rho * std::abs(std::sin(dt)));
        ++s.count;
      }
      e.samples.push_back(s);
    }
    std::vector<EndSample> used;
    for (const auto& s : e.samples) {
      if (s.count > 0) used.push_back(s);
    }
    e.decreasing = used.size() >= 2;
    for (std::size_t j = 1; j < used.size(); ++j) {
      if (!(used[j].deviation < used[j - 1].deviation)) e.decreasing = false;
    }
    rep.all_decreasing = rep.all_decreasing && e.decreasing;
    rep.ends.push_back(std::move(e));
  }
  return rep;
}

}  // namespace nil3
