#include "nil3/graph_operator.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <stdexcept>

namespace nil3 {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

// Forward-mode dual number, one direction.
struct Dual {
  double v = 0.0;
  double d = 0.0;
  Dual() = default;
  Dual(double x) : v(x) {}
  Dual(double x, double dx) : v(x), d(dx) {}

  friend Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(Dual a) { return {-a.v, -a.d}; }
  friend Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(Dual a, Dual b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
  Dual& operator+=(Dual b) { return *this = *this + b; }
  friend Dual sqrt(Dual a) {
    double s = std::sqrt(a.v);
    return {s, 0.5 * a.d / s};
  }
};

template <class T>
struct Jet {
  T r, eta, e1, e2, e11, e12, e22;
};

template <class T>
Jet<T> lift(const DiskJet2& j) {
  return {T(j.r), T(j.eta), T(j.eta1), T(j.eta2), T(j.eta11), T(j.eta12), T(j.eta22)};
}

template <class T>
T w2_closed(const Jet<T>& j) {
  const T r = j.r, s = 1 - r * r, p = 1 + r * r;
  const T &e = j.eta, &e1 = j.e1, &e2 = j.e2;
  return 1 - e2 * s / p + (r * r * e * e / (p * p * p * p) + e2 * e2 / (16 * r * r)) * s * s +
         r * e * e1 * s * s * s / (2 * p * p * p) + e1 * e1 * s * s * s * s / (16 * p * p);
}

template <class T>
struct ClosedParts {
  T a11, a12, a22, Q, w2;
};

template <class T>
ClosedParts<T> closed_parts(const Jet<T>& j) {
  const T r = j.r, s = 1 - r * r, p = 1 + r * r;
  const T &e = j.eta, &e1 = j.e1, &e2 = j.e2;
  const T r2 = r * r, p2 = p * p, s2 = s * s;
  ClosedParts<T> c;
  c.a11 = 1 - e2 * s / p + e2 * e2 * s2 / (16 * r2);
  c.a12 = (2 * r / p2) *
          (e + (p / (4 * r)) * (e1 - e * e2 / (2 * r)) * s - p2 * e1 * e2 * s2 / (32 * r2 * r));
  c.a22 = (1 + r2 * e * e / p2 + r * e * e1 * s / (2 * p) + e1 * e1 * s2 / 16) / r2;
  c.Q = 4 * r2 * e * e * e / (p2 * p2) + 3 * r * s * e * e * e1 / (p2 * p) +
        3 * s2 * e * e1 * e1 / (4 * p2) + 3 * s2 * e * e2 * e2 / (4 * r2 * p2) -
        8 * s * e * e2 / (p2 * p) + 8 * e / p2 + s2 * s * e1 * e1 * e1 / (16 * r * p) +
        s2 * e1 * e2 * e2 / (8 * r2 * r * p) - s * e1 * e2 / (r * p) + e1 / r;
  c.w2 = w2_closed(j);
  return c;
}

template <class T>
T hbar_closed(const Jet<T>& j) {
  ClosedParts<T> c = closed_parts(j);
  using std::sqrt;
  T w3 = c.w2 * sqrt(c.w2);
  return (c.a11 * j.e11 + 2 * c.a12 * j.e12 + c.a22 * j.e22 + c.Q) / w3;
}

template <class T>
struct Contraction {
  T num, det, det0;
};

// Direct route: conormal derivatives in the cylindrical frame contracted with
// the adjugate metric and the unnormalized normal X1 x X2.
template <class T>
Contraction<T> direct_contraction(const Jet<T>& j) {
  const T r = j.r, s = 1 - r * r, p = 1 + r * r;
  const T &e = j.eta, &e1 = j.e1, &e2 = j.e2;
  const T a = 4 * p / (s * s);
  const T b = 4 * r * e / (s * s) + p * e1 / s;
  const T c = 4 * r / s;
  const T d = -8 * r * r / (s * s) + p * e2 / s;
  const T a_r = 8 * r / (s * s) + 16 * r * p / (s * s * s);
  const T b_r = 4 * e / (s * s) + 4 * r * e1 / (s * s) + 16 * r * r * e / (s * s * s) +
                2 * r * e1 / s + p * j.e11 / s + 2 * r * p * e1 / (s * s);
  const T c_r = 4 / s + 8 * r * r / (s * s);
  const T d_r = -16 * r / (s * s) - 32 * r * r * r / (s * s * s) + 2 * r * e2 / s +
                p * j.e12 / s + 2 * r * p * e2 / (s * s);
  const T d_t = p * j.e22 / s;

  const T D11[3] = {a_r, -a * b, b_r};
  const T D12[3] = {c * b / 2, c_r - d * a / 2, d_r + c * a / 2};
  const T D22[3] = {c * (d - 1), T(0), d_t};
  const T n[3] = {-b * c, -a * d, a * c};
  auto dot = [&](const T* u) { return u[0] * n[0] + u[1] * n[1] + u[2] * n[2]; };

  const T g11 = a * a + b * b, g12 = b * d, g22 = c * c + d * d;
  const T sq0 = 16 * r * p * p / (s * s * s * s);
  return {g22 * dot(D11) - 2 * g12 * dot(D12) + g11 * dot(D22), g11 * g22 - g12 * g12, sq0 * sq0};
}

void check_chart(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("graph chart: r outside [0,1)");
}

}  // namespace

double CoefficientMatrix::min_eigenvalue() const {
  double m = 0.5 * (A11 + A22);
  double q = std::hypot(0.5 * (A11 - A22), A12);
  return m - q;
}

double phi0(double r) { return (1.0 - r * r) / (1.0 + r * r); }

DiskJet2 phi0_jet(double r, double theta, double lambda) {
  const double p = 1.0 + r * r;
  DiskJet2 j;
  j.r = r;
  j.theta = theta;
  j.eta = lambda * (1.0 - r * r) / p;
  j.eta1 = lambda * (-4.0 * r / (p * p));
  j.eta11 = lambda * (12.0 * r * r - 4.0) / (p * p * p);
  return j;
}

Nil3Point model_chart(double r, double theta) {
  check_chart(r);
  const double rho = 4.0 * r / (1.0 - r * r);
  return {rho * std::cos(theta), rho * std::sin(theta), 0.0};
}

Nil3Point graph_chart(double r, double theta, double eta) {
  Nil3Point x = model_chart(r, theta);
  x.x3 = eta * (1.0 + r * r) / (1.0 - r * r);
  return x;
}

ChartFrame chart_frame(const DiskJet2& j) {
  check_chart(j.r);
  const double r = j.r, s = 1 - r * r, p = 1 + r * r;
  return {4 * p / (s * s), 4 * r * j.eta / (s * s) + p * j.eta1 / s, 4 * r / s,
          -8 * r * r / (s * s) + p * j.eta2 / s};
}

double w_squared(const DiskJet2& jet) { return w2_closed(lift<double>(jet)); }

MetricData first_fundamental_form(const DiskJet2& jet) {
  ChartFrame f = chart_frame(jet);
  const double r = jet.r, s = 1 - r * r, p = 1 + r * r;
  MetricData m;
  m.g11 = f.a * f.a + f.b * f.b;
  m.g12 = f.b * f.d;
  m.g22 = f.c * f.c + f.d * f.d;
  m.det = m.g11 * m.g22 - m.g12 * m.g12;
  const double sq0 = 16 * r * p * p / (s * s * s * s);
  m.det0 = sq0 * sq0;
  const double w2 = w_squared(jet);
  if (!(w2 > 0.0)) throw std::domain_error("first_fundamental_form: degenerate jet");
  m.w = std::sqrt(w2);
  Vec3 n(-f.b * f.c, -f.a * f.d, f.a * f.c);
  m.normal = n / n.norm();
  return m;
}

NormalizedMetric normalized_metric(const DiskJet2& jet) {
  const double r = jet.r, s = 1 - r * r, p = 1 + r * r;
  if (!(r > 0.0 && r <= 1.0)) throw std::domain_error("normalized_metric: r outside (0,1]");
  const double B = 4 * r * jet.eta + s * p * jet.eta1;
  const double D = -8 * r * r + s * p * jet.eta2;
  const double k = 16 * r * p * p;
  return {1.0 / r + B * B / k, B * D / k, (16 * r * r * s * s + D * D) / k};
}

double mean_curvature(const DiskJet2& jet) {
  check_chart(jet.r);
  if (!(w_squared(jet) > 0.0)) throw std::domain_error("mean_curvature: degenerate jet");
  Contraction<double> c = direct_contraction(lift<double>(jet));
  return c.num / (2.0 * c.det * std::sqrt(c.det));
}

double compactified_H(const DiskJet2& jet) {
  if (!(jet.r > 0.0 && jet.r <= 1.0)) throw std::domain_error("compactified_H: r outside (0,1]");
  Jet<double> j = lift<double>(jet);
  if (!(w2_closed(j) > 0.0)) throw std::domain_error("compactified_H: degenerate jet");
  return hbar_closed(j);
}

double compactified_H_direct(const DiskJet2& jet) {
  check_chart(jet.r);
  if (!(jet.r > 0.0)) throw std::domain_error("compactified_H_direct: r = 0");
  Contraction<Quad> c = direct_contraction(lift<Quad>(jet));
  Quad w2 = c.det / c.det0;
  Quad h = c.num / (Quad(jet.r) * c.det0 * w2 * sqrt(w2));
  return static_cast<double>(h);
}

CoefficientMatrix coefficient_matrix(const DiskJet2& jet) {
  if (!(jet.r > 0.0 && jet.r <= 1.0)) throw std::domain_error("coefficient_matrix: r outside (0,1]");
  ClosedParts<double> c = closed_parts(lift<double>(jet));
  if (!(c.w2 > 0.0)) throw std::domain_error("coefficient_matrix: degenerate jet");
  const double w3 = c.w2 * std::sqrt(c.w2);
  return {c.a11 / w3, c.a12 / w3, c.a22 / w3, c.Q / w3};
}

std::array<double, 6> compactified_H_partials(const DiskJet2& jet) {
  ClosedParts<double> c = closed_parts(lift<double>(jet));
  const double w3 = c.w2 * std::sqrt(c.w2);
  std::array<double, 6> out{};
  Jet<Dual> base = lift<Dual>(jet);
  for (int k = 0; k < 3; ++k) {
    Jet<Dual> j = base;
    Dual* slot = k == 0 ? &j.eta : (k == 1 ? &j.e1 : &j.e2);
    slot->d = 1.0;
    out[k] = hbar_closed(j).d;
  }
  out[3] = c.a11 / w3;
  out[4] = 2.0 * c.a12 / w3;
  out[5] = c.a22 / w3;
  return out;
}

}  // namespace nil3
