#include "nil3/plateau.hpp"
#include "nil3/parallel.hpp"

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/AutoDiff>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace nil3 {

namespace {

// Unit vector at angle k pi / n, exact on the coordinate axes.
std::pair<double, double> direction(int k, int n) {
  const int m = ((k % (2 * n)) + 2 * n) % (2 * n);
  if (m == 0) return {1.0, 0.0};
  if (2 * m == n) return {0.0, 1.0};
  if (m == n) return {-1.0, 0.0};
  if (2 * m == 3 * n) return {0.0, -1.0};
  const double t = k * std::numbers::pi / n;
  return {std::cos(t), std::sin(t)};
}

double kahan_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

struct TriEval {
  std::vector<double> area;
  std::vector<std::array<Vec3, 3>> grad;
};

void eval_triangles(const TriMesh3& m, const std::vector<Nil3Point>& x, bool with_grad, TriEval& out) {
  const std::size_t T = m.triangles.size();
  out.area.resize(T);
  if (with_grad) out.grad.resize(T);
  parallel_for(T, [&](std::size_t t) {
    const auto& tri = m.triangles[t];
    const Nil3Point &p = x[tri[0]], &q = x[tri[1]], &s = x[tri[2]];
    if (with_grad) {
      const Vec3 u = q.vec() - p.vec(), v = s.vec() - p.vec();
      const Mat3 F = frame_matrix(Nil3Point::from((p.vec() + q.vec() + s.vec()) / 3.0));
      if (!((F * u).cross(F * v).norm() > 0.0)) {
        out.area[t] = 0.0;
        out.grad[t] = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
        return;
      }
      const AreaGradient g = triangle_area_gradient(p, q, s);
      out.area[t] = g.area;
      out.grad[t] = g.grad;
    } else {
      const Vec3 u = q.vec() - p.vec(), v = s.vec() - p.vec();
      const Mat3 F = frame_matrix(Nil3Point::from((p.vec() + q.vec() + s.vec()) / 3.0));
      out.area[t] = 0.5 * (F * u).cross(F * v).norm();
    }
  });
}

std::vector<Vec3> accumulate(const TriMesh3& m, const TriEval& e) {
  std::vector<Vec3> g(m.vertices.size(), Vec3::Zero());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) g[m.triangles[t][k]] += e.grad[t][k];
  }
  return g;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Closest point on triangle (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
  }
  const double den = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * den) + ac * (vc * den))).norm();
}

template <class T>
std::array<T, 9> area_gradient_t(const std::array<T, 9>& x) {
  std::array<T, 3> u, v, bar;
  for (int i = 0; i < 3; ++i) {
    u[i] = x[3 + i] - x[i];
    v[i] = x[6 + i] - x[i];
    bar[i] = (x[i] + x[3 + i] + x[6 + i]) / 3.0;
  }
  auto frame = [&](const std::array<T, 3>& w) {
    return std::array<T, 3>{w[0], w[1], w[2] + bar[1] / 2.0 * w[0] - bar[0] / 2.0 * w[1]};
  };
  auto cross = [](const std::array<T, 3>& a, const std::array<T, 3>& b) {
    return std::array<T, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  const auto A = frame(u), B = frame(v);
  auto N = cross(A, B);
  using std::sqrt;
  const T len = sqrt(N[0] * N[0] + N[1] * N[1] + N[2] * N[2]);
  for (auto& c : N) c = c / len;
  const auto al = cross(B, N), be = cross(N, A);
  const std::array<T, 3> ga{(al[0] + bar[1] / 2.0 * al[2]) / 2.0, (al[1] - bar[0] / 2.0 * al[2]) / 2.0, al[2] / 2.0};
  const std::array<T, 3> gb{(be[0] + bar[1] / 2.0 * be[2]) / 2.0, (be[1] - bar[0] / 2.0 * be[2]) / 2.0, be[2] / 2.0};
  const std::array<T, 3> gbar{-(al[2] * u[1] + be[2] * v[1]) / 12.0, (al[2] * u[0] + be[2] * v[0]) / 12.0, T(0.0)};
  std::array<T, 9> g;
  for (int i = 0; i < 3; ++i) {
    g[i] = gbar[i] - ga[i] - gb[i];
    g[3 + i] = ga[i] + gbar[i];
    g[6 + i] = gb[i] + gbar[i];
  }
  return g;
}

// Cotangent Laplacian of the free vertices, angles measured in the metric frozen
// at each barycenter; approximates the area Hessian for each coordinate.
class LaplacePreconditioner {
 public:
  LaplacePreconditioner(const TriMesh3& m, const std::vector<int>& free_ids) : slot_(m.vertices.size(), -1) {
    for (std::size_t k = 0; k < free_ids.size(); ++k) slot_[free_ids[k]] = static_cast<int>(k);
    n_ = static_cast<int>(free_ids.size());
  }

  bool update(const TriMesh3& m, const std::vector<Nil3Point>& x) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * m.triangles.size());
    for (const auto& t : m.triangles) {
      const Mat3 F = frame_matrix(Nil3Point::from((x[t[0]].vec() + x[t[1]].vec() + x[t[2]].vec()) / 3.0));
      for (int k = 0; k < 3; ++k) {
        const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
        const Vec3 e1 = F * (x[i].vec() - x[t[k]].vec()), e2 = F * (x[j].vec() - x[t[k]].vec());
        const double cross = e1.cross(e2).norm();
        const double w = std::max(0.5 * e1.dot(e2) / std::max(cross, 1e-300), 1e-3);
        const int a = slot_[i], b = slot_[j];
        if (a >= 0) trip.emplace_back(a, a, w);
        if (b >= 0) trip.emplace_back(b, b, w);
        if (a >= 0 && b >= 0) {
          trip.emplace_back(a, b, -w);
          trip.emplace_back(b, a, -w);
        }
      }
    }
    Eigen::SparseMatrix<double> L(n_, n_);
    L.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      solver_.analyzePattern(L);
      analyzed_ = true;
    }
    solver_.factorize(L);
    return solver_.info() == Eigen::Success;
  }

  void invalidate() { analyzed_ = false; }

  Eigen::VectorXd solve(const Eigen::VectorXd& g) const {
    Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> G(g.data(), 3, n_);
    Eigen::Matrix<double, Eigen::Dynamic, 3> X = solver_.solve(Eigen::MatrixXd(G.transpose()));
    Eigen::VectorXd out(3 * n_);
    Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>>(out.data(), 3, n_) = X.transpose();
    return out;
  }

 private:
  std::vector<int> slot_;
  int n_ = 0;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

// Free-vertex block of the discrete area Hessian, shifted by mu times its mean diagonal.
class NewtonSystem {
 public:
  NewtonSystem(const TriMesh3& m, const std::vector<int>& free_ids) : slot_(m.vertices.size(), -1) {
    for (std::size_t k = 0; k < free_ids.size(); ++k) slot_[free_ids[k]] = static_cast<int>(k);
    n_ = 3 * static_cast<int>(free_ids.size());
  }

  void assemble(const TriMesh3& m, const std::vector<Nil3Point>& x) {
    std::vector<std::array<double, 81>> local(m.triangles.size());
    parallel_for(m.triangles.size(), [&](std::size_t t) {
      const auto& tri = m.triangles[t];
      local[t] = triangle_area_hessian(x[tri[0]], x[tri[1]], x[tri[2]]);
    });
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(81 * m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& tri = m.triangles[t];
      for (int a = 0; a < 3; ++a) {
        const int sa = slot_[tri[a]];
        if (sa < 0) continue;
        for (int b = 0; b < 3; ++b) {
          const int sb = slot_[tri[b]];
          if (sb < 0) continue;
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) trip.emplace_back(3 * sa + i, 3 * sb + j, local[t][9 * (3 * a + i) + 3 * b + j]);
          }
        }
      }
    }
    H_.resize(n_, n_);
    H_.setFromTriplets(trip.begin(), trip.end());
    scale_ = H_.diagonal().cwiseAbs().mean();
  }

  void invalidate() { analyzed_ = false; }

  // Solves (H + mu scale I) d = -g; false unless the shifted matrix is positive definite.
  bool direction(double mu, const Eigen::VectorXd& g, Eigen::VectorXd& d) {
    Eigen::SparseMatrix<double> K = H_;
    for (int i = 0; i < n_; ++i) K.coeffRef(i, i) += mu * scale_;
    if (!analyzed_) {
      solver_.analyzePattern(K);
      analyzed_ = true;
    }
    solver_.factorize(K);
    if (solver_.info() != Eigen::Success || !(solver_.vectorD().minCoeff() > 0)) return false;
    d = -solver_.solve(g);
    return d.allFinite() && g.dot(d) < 0;
  }

 private:
  std::vector<int> slot_;
  int n_ = 0;
  double scale_ = 1.0;
  bool analyzed_ = false;
  Eigen::SparseMatrix<double> H_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

// Flips interior edges whose opposite angles sum past pi, when the flip does not
// increase the area; angles and areas use the metric frozen at each barycenter.
int equiangulate(TriMesh3& m, double area_floor) {
  auto angle = [&](int apex, int p, int q, const Mat3& F) {
    const Vec3 e1 = F * (m.vertices[p].vec() - m.vertices[apex].vec());
    const Vec3 e2 = F * (m.vertices[q].vec() - m.vertices[apex].vec());
    return std::atan2(e1.cross(e2).norm(), e1.dot(e2));
  };
  auto frame_of = [&](int a, int b, int c) {
    return frame_matrix(Nil3Point::from((m.vertices[a].vec() + m.vertices[b].vec() + m.vertices[c].vec()) / 3.0));
  };
  auto area = [&](int a, int b, int c) {
    const Mat3 F = frame_of(a, b, c);
    return 0.5 * (F * (m.vertices[b].vec() - m.vertices[a].vec())).cross(F * (m.vertices[c].vec() - m.vertices[a].vec())).norm();
  };
  int flips = 0;
  for (int pass = 0; pass < 50; ++pass) {
    std::map<std::pair<int, int>, std::pair<int, int>> directed;  // (i, j) -> (triangle, apex)
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& tri = m.triangles[t];
      for (int k = 0; k < 3; ++k) directed[{tri[k], tri[(k + 1) % 3]}] = {static_cast<int>(t), tri[(k + 2) % 3]};
    }
    std::vector<char> touched(m.triangles.size(), 0);
    int count = 0;
    for (const auto& [edge, t1] : directed) {
      const auto [i, j] = edge;
      if (i > j) continue;
      auto it = directed.find({j, i});
      if (it == directed.end()) continue;
      const auto t2 = it->second;
      if (touched[t1.first] || touched[t2.first]) continue;
      const int k = t1.second, l = t2.second;
      if (k == l || directed.count({k, l}) || directed.count({l, k})) continue;
      const double sum = angle(k, i, j, frame_of(i, j, k)) + angle(l, j, i, frame_of(j, i, l));
      if (sum <= std::numbers::pi + 1e-9) continue;
      const double na = area(i, l, k), nb = area(j, k, l);
      if (na < area_floor || nb < area_floor) continue;
      if (na + nb > area(i, j, k) + area(j, i, l)) continue;
      m.triangles[t1.first] = {i, l, k};
      m.triangles[t2.first] = {j, k, l};
      touched[t1.first] = touched[t2.first] = 1;
      ++count;
    }
    flips += count;
    if (count == 0) break;
  }
  return flips;
}

}  // namespace

double JordanContour::theta_n() const { return std::numbers::pi / n; }

std::vector<Nil3Point> JordanContour::corners() const {
  auto [c, s] = direction(1, n);
  return {{0, 0, 0}, {b, 0, 0}, {b, 0, a}, {0, 0, a}, {b * c, b * s, a}, {b * c, b * s, 0}};
}

JordanContour build_contour(double a, double b, int n, double samples_per_unit) {
  if (!(a > 0) || !(b > 0) || n < 2 || !(samples_per_unit > 0)) {
    throw std::invalid_argument("build_contour: need a, b > 0, n >= 2, samples_per_unit > 0");
  }
  JordanContour C;
  C.a = a;
  C.b = b;
  C.n = n;
  C.samples_h = std::max(2, static_cast<int>(std::ceil(b * samples_per_unit - 1e-9)));
  C.samples_v = std::max(2, static_cast<int>(std::ceil(a * samples_per_unit - 1e-9)));
  const int nh = C.samples_h, nv = C.samples_v;
  auto [c, s] = direction(1, n);
  auto push = [&](double x1, double x2, double x3, SegmentTag t) { C.samples.push_back({{x1, x2, x3}, t}); };
  for (int k = 0; k < nh; ++k) push(b * k / nh, 0, 0, SegmentTag::h1);
  for (int k = 0; k < nv; ++k) push(b, 0, a * k / nv, SegmentTag::v1);
  for (int k = 0; k < nh; ++k) push(b * (nh - k) / nh, 0, a, SegmentTag::ht1);
  for (int k = 0; k < nh; ++k) {
    const double t = b * k / nh;
    push(t * c, t * s, a, SegmentTag::ht2);
  }
  for (int k = 0; k < nv; ++k) push(b * c, b * s, a * (nv - k) / nv, SegmentTag::v2);
  for (int k = 0; k < nh; ++k) {
    const double t = b * (nh - k) / nh;
    push(t * c, t * s, 0, SegmentTag::h2);
  }
  push(0, 0, 0, SegmentTag::h2);
  return C;
}

TriMesh3 initial_spanning_mesh(const JordanContour& C, double bulge) {
  const int nh = C.samples_h, nv = C.samples_v;
  const double d0 = bulge > 0 ? bulge : 0.5 * std::min(C.a, C.b);
  auto [c1, s1] = direction(1, C.n);
  auto [ch, sh] = direction(1, 2 * C.n);
  TriMesh3 m;
  auto id = [&](int is, int iv) { return iv * (2 * nh + 1) + is; };
  for (int iv = 0; iv <= nv; ++iv) {
    const double v = static_cast<double>(iv) / nv;
    const double mv = iv == 0 || iv == nv ? 0.0 : d0 * std::sin(std::numbers::pi * v);
    for (int is = 0; is <= 2 * nh; ++is) {
      const int k = is - nh;  // s = k / nh
      const double s = static_cast<double>(k) / nh;
      double x1, x2;
      if (k >= 0) {
        x1 = mv * ch * (1 - s) + C.b * s;
        x2 = mv * sh * (1 - s);
      } else {
        x1 = mv * ch * (1 + s) - s * C.b * c1;
        x2 = mv * sh * (1 + s) - s * C.b * s1;
      }
      const double x3 = iv == nv ? C.a : C.a * v;
      SegmentTag tag = SegmentTag::none;
      if (is == 2 * nh) tag = SegmentTag::v1;
      else if (is == 0) tag = SegmentTag::v2;
      else if (iv == 0) tag = k >= 0 ? SegmentTag::h1 : SegmentTag::h2;
      else if (iv == nv) tag = k >= 0 ? SegmentTag::ht1 : SegmentTag::ht2;
      m.add_vertex({x1, x2, x3}, tag, tag != SegmentTag::none);
    }
  }
  for (int iv = 0; iv < nv; ++iv) {
    for (int is = 0; is < 2 * nh; ++is) {
      const int a = id(is, iv), b = id(is + 1, iv), c = id(is + 1, iv + 1), d = id(is, iv + 1);
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
  return m;
}

AreaGradient triangle_area_gradient(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s) {
  const Vec3 u = q.vec() - p.vec(), v = s.vec() - p.vec();
  const Vec3 bar = (p.vec() + q.vec() + s.vec()) / 3.0;
  const Mat3 F = frame_matrix(Nil3Point::from(bar));
  const Vec3 A = F * u, B = F * v;
  const Vec3 N = A.cross(B);
  const double len = N.norm();
  if (!(len > 0.0)) throw std::domain_error("triangle_area: degenerate triangle");
  const Vec3 nh = N / len;
  const Vec3 alpha = B.cross(nh), beta = nh.cross(A);
  AreaGradient g;
  g.area = 0.5 * len;
  const Vec3 ga = 0.5 * F.transpose() * alpha, gb = 0.5 * F.transpose() * beta;
  // Barycenter dependence of F: row 3 is (x2/2, -x1/2, 1).
  const double w1 = -(alpha[2] * u[1] + beta[2] * v[1]) / 4.0;
  const double w2 = (alpha[2] * u[0] + beta[2] * v[0]) / 4.0;
  const Vec3 gbar = Vec3(w1, w2, 0.0) / 3.0;
  g.grad[0] = -ga - gb + gbar;
  g.grad[1] = ga + gbar;
  g.grad[2] = gb + gbar;
  return g;
}

double triangle_area(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s) {
  return triangle_area_gradient(p, q, s).area;
}

std::array<double, 81> triangle_area_hessian(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s) {
  using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
  std::array<AD, 9> x;
  const std::array<double, 9> v{p.x1, p.x2, p.x3, q.x1, q.x2, q.x3, s.x1, s.x2, s.x3};
  for (int i = 0; i < 9; ++i) x[i] = AD(v[i], 9, i);
  const auto g = area_gradient_t(x);
  std::array<double, 81> H;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) H[9 * i + j] = 0.5 * (g[i].derivatives()[j] + g[j].derivatives()[i]);
  }
  return H;
}

double mesh_area(const TriMesh3& m) {
  TriEval e;
  eval_triangles(m, m.vertices, false, e);
  return kahan_sum(e.area);
}

std::vector<Vec3> mesh_area_gradient(const TriMesh3& m, double* area) {
  TriEval e;
  eval_triangles(m, m.vertices, true, e);
  if (area) *area = kahan_sum(e.area);
  return accumulate(m, e);
}

std::vector<double> mean_curvature_proxy(const TriMesh3& m) {
  TriEval e;
  eval_triangles(m, m.vertices, true, e);
  std::vector<Vec3> g = accumulate(m, e);
  std::vector<double> lumped(m.vertices.size(), 0.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) lumped[m.triangles[t][k]] += e.area[t] / 3.0;
  }
  const std::vector<bool> on_boundary = m.boundary_vertices();
  std::vector<double> out(m.vertices.size(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (m.fixed[v] || on_boundary[v] || lumped[v] <= 0.0) continue;
    out[v] = g[v].norm() / lumped[v];
  }
  return out;
}

void MinimizeConfig::validate() const {
  if (!(shrink > 0 && shrink < 1) || !(armijo > 0 && armijo < 1) || !(grad_tol > 0) || max_iter <= 0 ||
      memory <= 0 || !(area_floor > 0) || smoothing < 0 || newton_below < 0) {
    throw std::invalid_argument("MinimizeConfig: invalid parameters");
  }
}

const char* status_name(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::converged: return "converged";
    case MinimizeStatus::max_iterations: return "max_iterations";
    case MinimizeStatus::line_search_failure: return "line_search_failure";
    case MinimizeStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

TriMesh3 minimize_area(const TriMesh3& mesh, const MinimizeConfig& cfg, MinimizeReport* report) {
  cfg.validate();
  MinimizeReport rep;
  TriMesh3 m = mesh;
  std::vector<int> free_ids;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (!m.fixed[v]) free_ids.push_back(static_cast<int>(v));
  }
  const int F = static_cast<int>(free_ids.size());
  using VecX = Eigen::VectorXd;

  auto gather_grad = [&](const std::vector<Vec3>& g) {
    VecX out(3 * F);
    for (int k = 0; k < F; ++k) out.segment<3>(3 * k) = g[free_ids[k]];
    return out;
  };
  auto max_vertex_norm = [&](const VecX& g) {
    double mx = 0.0;
    for (int k = 0; k < F; ++k) mx = std::max(mx, g.segment<3>(3 * k).norm());
    return mx;
  };

  // Shortest initial edge caps the displacement of any vertex per step.
  double hmin = std::numeric_limits<double>::infinity();
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) hmin = std::min(hmin, (m.vertices[t[k]].vec() - m.vertices[t[(k + 1) % 3]].vec()).norm());
  }
  const double max_step = 0.25 * hmin;

  TriEval cur;
  eval_triangles(m, m.vertices, true, cur);
  double area = kahan_sum(cur.area);
  VecX g = gather_grad(accumulate(m, cur));
  rep.initial_area = area;
  rep.area_history.push_back(area);

  constexpr int kRefresh = 20;
  LaplacePreconditioner precond(m, free_ids);
  std::unique_ptr<NewtonSystem> hessian;
  double mu = 0.0;
  std::deque<VecX> S, Y;
  std::vector<Nil3Point> trial(m.vertices);
  TriEval next;
  auto remesh = [&]() {
    const int f = equiangulate(m, cfg.area_floor);
    if (f == 0) return false;
    rep.flips += f;
    precond.invalidate();
    precond.update(m, m.vertices);
    if (hessian) hessian->invalidate();
    S.clear();
    Y.clear();
    trial = m.vertices;
    eval_triangles(m, m.vertices, true, cur);
    const double fresh = kahan_sum(cur.area);
    if (fresh > area * (1 + 1e-13)) rep.monotone = false;
    area = fresh;
    rep.area_history.push_back(area);
    g = gather_grad(accumulate(m, cur));
    rep.max_gradient = max_vertex_norm(g);
    return true;
  };
  int it = 0;
  bool steepest = false;
  for (;; ++it) {
    rep.max_gradient = max_vertex_norm(g);
    if (rep.max_gradient < cfg.grad_tol) {
      rep.status = MinimizeStatus::converged;
      break;
    }
    if (it >= cfg.max_iter) {
      rep.status = MinimizeStatus::max_iterations;
      break;
    }
    const bool newton = cfg.newton_below > 0 && rep.max_gradient < cfg.newton_below;
    if ((newton || it % kRefresh == 0) && remesh()) {
      --it;
      continue;
    }
    if (it % kRefresh == 0 && !precond.update(m, m.vertices)) {
      rep.status = MinimizeStatus::degenerate;
      rep.diagnostic = "preconditioner factorization failed";
      break;
    }
    VecX d;
    if (newton) {
      if (!hessian) hessian = std::make_unique<NewtonSystem>(m, free_ids);
      hessian->assemble(m, m.vertices);
      while (!hessian->direction(mu, g, d)) {
        mu = std::max(10 * mu, 1e-10);
        if (mu > 1e6) break;
      }
      if (mu > 1e6) {
        rep.status = MinimizeStatus::line_search_failure;
        rep.diagnostic = "no positive definite Newton shift";
        break;
      }
    } else {
      d = -precond.solve(g);
    }
    if (!newton && !steepest && !S.empty()) {
      std::vector<double> alpha(S.size());
      VecX q = g;
      for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
        alpha[k] = S[k].dot(q) / Y[k].dot(S[k]);
        q -= alpha[k] * Y[k];
      }
      const VecX py = precond.solve(Y.back());
      q = precond.solve(q) * (S.back().dot(Y.back()) / Y.back().dot(py));
      for (std::size_t k = 0; k < S.size(); ++k) {
        const double beta = Y[k].dot(q) / Y[k].dot(S[k]);
        q += (alpha[k] - beta) * S[k];
      }
      d = -q;
      if (g.dot(d) >= 0) d = -precond.solve(g);
    }
    double t = 1.0;
    const double dmax = max_vertex_norm(d);
    if (dmax * t > max_step) t = max_step / dmax;
    const double t0 = t;
    const double slope = g.dot(d);
    bool accepted = false;
    double delta = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (int k = 0; k < F; ++k) {
        trial[free_ids[k]] = Nil3Point::from(m.vertices[free_ids[k]].vec() + t * d.segment<3>(3 * k));
      }
      eval_triangles(m, trial, true, next);
      bool degenerate = false;
      delta = 0.0;
      for (std::size_t tr = 0; tr < next.area.size(); ++tr) {
        if (next.area[tr] < cfg.area_floor) degenerate = true;
        delta += next.area[tr] - cur.area[tr];
      }
      if (!degenerate && delta <= cfg.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.shrink;
    }
    if (newton) {
      if (accepted && t == 1.0) mu = mu < 1e-12 ? 0.0 : mu / 10;
      else mu = std::max(4 * mu, 1e-8);
      if (!accepted && mu <= 1e6) {
        --it;
        continue;
      }
    }
    if (!accepted) {
      if (!newton && !steepest && !S.empty()) {
        S.clear();
        Y.clear();
        steepest = true;
        --it;
        continue;
      }
      rep.status = MinimizeStatus::line_search_failure;
      rep.diagnostic = "no sufficient decrease along the steepest-descent direction";
      break;
    }
    steepest = false;
    if (newton) ++rep.newton_steps;
    (void)t0;
    const VecX gnew = gather_grad(accumulate(m, next));
    VecX s = t * d, y = gnew - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      if (static_cast<int>(S.size()) > cfg.memory) {
        S.pop_front();
        Y.pop_front();
      }
    }
    m.vertices.swap(trial);
    trial = m.vertices;
    std::swap(cur, next);
    g = gnew;
    if (delta > 0) rep.monotone = false;
    area += delta;
    rep.area_history.push_back(area);

    if (cfg.smoothing > 0 && !newton) {
      // Tangential relaxation toward the neighbour average (first-order phase only).
      std::vector<Vec3> avg(m.vertices.size(), Vec3::Zero()), nrm(m.vertices.size(), Vec3::Zero());
      std::vector<int> cnt(m.vertices.size(), 0);
      for (const auto& tri : m.triangles) {
        const Vec3 n = (m.vertices[tri[1]].vec() - m.vertices[tri[0]].vec())
                           .cross(m.vertices[tri[2]].vec() - m.vertices[tri[0]].vec());
        for (int k = 0; k < 3; ++k) {
          avg[tri[k]] += m.vertices[tri[(k + 1) % 3]].vec() + m.vertices[tri[(k + 2) % 3]].vec();
          cnt[tri[k]] += 2;
          nrm[tri[k]] += n;
        }
      }
      for (int k = 0; k < F; ++k) {
        const int v = free_ids[k];
        Vec3 move = avg[v] / cnt[v] - m.vertices[v].vec();
        const Vec3 nv = nrm[v].norm() > 0 ? Vec3(nrm[v].normalized()) : Vec3::Zero();
        move -= nv * nv.dot(move);
        m.vertices[v] = Nil3Point::from(m.vertices[v].vec() + cfg.smoothing * move);
      }
      trial = m.vertices;
      eval_triangles(m, m.vertices, true, cur);
      area = kahan_sum(cur.area);
      g = gather_grad(accumulate(m, cur));
      S.clear();
      Y.clear();
    }
  }
  rep.iterations = it;
  rep.final_area = area;
  for (double a : cur.area) {
    if (a < cfg.area_floor) {
      rep.status = MinimizeStatus::degenerate;
      rep.diagnostic = "triangle area below floor";
      break;
    }
  }
  if (report) *report = std::move(rep);
  return m;
}

double graph_height(const ScalarDiskField& eta, double x1, double x2) {
  const double rho = std::hypot(x1, x2);
  const double th = std::atan2(x2, x1);
  const double r = rho_to_r(rho);
  const double e = interpolate(eta, r, th < 0 ? th + 2 * std::numbers::pi : th);
  return e * (1 + r * r) / (1 - r * r);
}

BarrierReport barrier_check(const TriMesh3& mesh, const DeformationState& sn, double a, int n, double tol) {
  BarrierReport rep;
  rep.tol = tol;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double tn = std::numbers::pi / n;
  for (const Nil3Point& p : mesh.vertices) {
    const double rho = std::hypot(p.x1, p.x2);
    const double th = std::atan2(p.x2, p.x1);
    if (!(rho > 0) || !(th > 1e-12 && th < tn - 1e-12)) {
      ++rep.skipped;
      continue;
    }
    ++rep.checked;
    const double H = graph_height(sn.eta, p.x1, p.x2);
    const double below = H - p.x3;         // > 0 means under S_n
    const double above = p.x3 - (a - H);   // > 0 means over a - S_n
    const double excess = std::max(below, above);
    rep.min_margin = std::min(rep.min_margin, -excess);
    if (excess > rep.worst_violation) {
      rep.worst_violation = excess;
      rep.worst_vertex = p;
    }
    if (excess > tol) ++rep.violations;
  }
  if (rep.checked == 0) {
    rep.worst_violation = 0.0;
    rep.min_margin = 0.0;
  }
  return rep;
}

TriMesh3 extend_spanning_mesh(const TriMesh3& solved, const JordanContour& from, const JordanContour& to) {
  if (to.n != from.n || to.a != from.a || to.samples_v != from.samples_v || !(to.b > from.b) ||
      to.samples_h <= from.samples_h) {
    throw std::invalid_argument("extend_spanning_mesh: contours are not nested");
  }
  const int nv = from.samples_v, extra = to.samples_h - from.samples_h;
  TriMesh3 m = solved;
  // Outer columns of the solved piece, ordered bottom to top.
  std::array<std::vector<int>, 2> column;
  const std::array<SegmentTag, 2> side{SegmentTag::v1, SegmentTag::v2};
  for (int c = 0; c < 2; ++c) {
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
      if (m.tags[v] == side[c]) column[c].push_back(static_cast<int>(v));
    }
    std::sort(column[c].begin(), column[c].end(),
              [&](int i, int j) { return m.vertices[i].x3 < m.vertices[j].x3; });
    if (static_cast<int>(column[c].size()) != nv + 1) {
      throw std::invalid_argument("extend_spanning_mesh: outer column does not match the contour");
    }
  }
  auto [cn, sn] = direction(1, from.n);
  const std::array<std::array<double, 2>, 2> dir{{{1.0, 0.0}, {cn, sn}}};
  const std::array<SegmentTag, 2> low{SegmentTag::h1, SegmentTag::h2}, high{SegmentTag::ht1, SegmentTag::ht2};
  for (int c = 0; c < 2; ++c) {
    std::vector<int> prev = column[c];
    for (int iv = 0; iv <= nv; ++iv) {
      const int v = prev[iv];
      const bool edge = iv == 0 || iv == nv;
      m.tags[v] = iv == 0 ? low[c] : iv == nv ? high[c] : SegmentTag::none;
      m.fixed[v] = edge;
    }
    for (int k = 1; k <= extra; ++k) {
      const double rho = from.b + (to.b - from.b) * k / extra;
      std::vector<int> next(nv + 1);
      for (int iv = 0; iv <= nv; ++iv) {
        const double z = iv == nv ? from.a : from.a * iv / nv;
        SegmentTag tag = iv == 0 ? low[c] : iv == nv ? high[c] : SegmentTag::none;
        if (k == extra) tag = side[c];
        next[iv] = m.add_vertex({rho * dir[c][0], rho * dir[c][1], z}, tag, tag != SegmentTag::none);
      }
      for (int iv = 0; iv < nv; ++iv) {
        if (c == 0) {
          m.triangles.push_back({prev[iv], next[iv], next[iv + 1]});
          m.triangles.push_back({prev[iv], next[iv + 1], prev[iv + 1]});
        } else {
          m.triangles.push_back({next[iv], prev[iv], prev[iv + 1]});
          m.triangles.push_back({next[iv], prev[iv + 1], next[iv + 1]});
        }
      }
      prev = std::move(next);
    }
  }
  return m;
}

double region_deviation(const TriMesh3& from, const TriMesh3& to, double radius) {
  std::vector<std::size_t> tris;
  double reach = 0.0;
  for (const auto& t : to.triangles) {
    double e = 0.0;
    for (int k = 0; k < 3; ++k) e = std::max(e, (to.vertices[t[k]].vec() - to.vertices[t[(k + 1) % 3]].vec()).norm());
    reach = std::max(reach, e);
  }
  for (std::size_t t = 0; t < to.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const Nil3Point& p = to.vertices[to.triangles[t][k]];
      if (std::hypot(p.x1, p.x2) <= radius + 2 * reach + 1.0) {
        tris.push_back(t);
        break;
      }
    }
  }
  std::vector<std::size_t> pts;
  for (std::size_t v = 0; v < from.vertices.size(); ++v) {
    if (std::hypot(from.vertices[v].x1, from.vertices[v].x2) <= radius) pts.push_back(v);
  }
  std::vector<double> dist(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t k) {
    const Vec3 p = from.vertices[pts[k]].vec();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t : tris) {
      const auto& tri = to.triangles[t];
      best = std::min(best, point_triangle_distance(p, to.vertices[tri[0]].vec(), to.vertices[tri[1]].vec(),
                                                    to.vertices[tri[2]].vec()));
    }
    dist[k] = best;
  });
  double mx = 0.0;
  for (double d : dist) mx = std::max(mx, d);
  return mx;
}

ContinuationReport continuation_in_b(double a, int n, const std::vector<double>& b_list, const MinimizeConfig& cfg,
                                     double samples_per_unit) {
  if (b_list.size() < 3) throw std::invalid_argument("continuation_in_b: need at least three values of b");
  for (std::size_t k = 1; k < b_list.size(); ++k) {
    if (!(b_list[k] > b_list[k - 1])) throw std::invalid_argument("continuation_in_b: b_list must be ascending");
  }
  ContinuationReport rep;
  rep.a = a;
  rep.n = n;
  rep.region_radius = b_list.front() / 2;
  JordanContour prev;
  for (double b : b_list) {
    JordanContour C = build_contour(a, b, n, samples_per_unit);
    MinimizeReport mr;
    const TriMesh3 start =
        rep.meshes.empty() ? initial_spanning_mesh(C) : extend_spanning_mesh(rep.meshes.back(), prev, C);
    TriMesh3 sol = minimize_area(start, cfg, &mr);
    prev = C;
    if (!mr.converged()) {
      throw std::runtime_error(std::string("continuation_in_b: minimization failed (") + status_name(mr.status) + ")");
    }
    rep.steps.push_back({b, mr.final_area, mr.iterations, sol.num_triangles(), mr.converged(), mr.max_gradient});
    rep.meshes.push_back(std::move(sol));
  }
  for (std::size_t k = 1; k < rep.meshes.size(); ++k) {
    rep.deviations.push_back(std::max(region_deviation(rep.meshes[k - 1], rep.meshes[k], rep.region_radius),
                                      region_deviation(rep.meshes[k], rep.meshes[k - 1], rep.region_radius)));
  }
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.deviations.size(); ++k) {
    if (!(rep.deviations[k] < rep.deviations[k - 1])) rep.decreasing = false;
  }
  return rep;
}

}  // namespace nil3
