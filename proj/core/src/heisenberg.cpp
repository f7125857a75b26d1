#include "nil3/heisenberg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nil3 {

namespace {

// sin(x)/x, (1-cos x)/x^2 and (x-sin x)/x^3 without cancellation near 0.
double sinc1(double x) {
  if (std::abs(x) < 0.5) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 12; ++k) {
      term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term;
    }
    return sum;
  }
  return std::sin(x) / x;
}

double cosc2(double x) {
  double h = 0.5 * x;
  double s = std::abs(h) < 1e-300 ? 1.0 : sinc1(h);
  return 0.5 * s * s;
}

double sinc3(double x) {
  if (std::abs(x) < 0.5) {
    double term = 1.0 / 6.0, sum = term;
    for (int k = 1; k < 12; ++k) {
      term *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      sum += term;
    }
    return sum;
  }
  return (x - std::sin(x)) / (x * x * x);
}

}  // namespace

GeodesicParams GeodesicParams::from_direction(double phi, double gamma) {
  return {std::sqrt(std::max(0.0, 1.0 - gamma * gamma)), phi, gamma};
}

Nil3Point group_mul(const Nil3Point& p, const Nil3Point& q) {
  return {p.x1 + q.x1, p.x2 + q.x2, p.x3 + q.x3 + 0.5 * (p.x1 * q.x2 - p.x2 * q.x1)};
}

Nil3Point group_inv(const Nil3Point& p) { return {-p.x1, -p.x2, -p.x3}; }

Cylindrical to_cylindrical(const Nil3Point& p) {
  return {std::hypot(p.x1, p.x2), std::atan2(p.x2, p.x1), p.x3};
}

Nil3Point from_cylindrical(double rho, double theta, double x3) {
  return {rho * std::cos(theta), rho * std::sin(theta), x3};
}

Mat3 frame_matrix(const Nil3Point& p) {
  Mat3 F = Mat3::Identity();
  F(2, 0) = 0.5 * p.x2;
  F(2, 1) = -0.5 * p.x1;
  return F;
}

TangentVector to_frame(const Nil3Point& p, const Vec3& a) {
  return {p, a[0], a[1], a[2] + 0.5 * (p.x2 * a[0] - p.x1 * a[1])};
}

Vec3 from_frame(const TangentVector& v) {
  const Nil3Point& p = v.base;
  return {v.v1, v.v2, v.v3 - 0.5 * (p.x2 * v.v1 - p.x1 * v.v2)};
}

Vec3 cylindrical_components(const TangentVector& v) {
  double th = std::atan2(v.base.x2, v.base.x1);
  double c = std::cos(th), s = std::sin(th);
  return {c * v.v1 + s * v.v2, -s * v.v1 + c * v.v2, v.v3};
}

TangentVector from_cylindrical_components(const Nil3Point& p, const Vec3& cyl) {
  double th = std::atan2(p.x2, p.x1);
  double c = std::cos(th), s = std::sin(th);
  return {p, c * cyl[0] - s * cyl[1], s * cyl[0] + c * cyl[1], cyl[2]};
}

double metric_at(const Nil3Point& p, const Vec3& v, const Vec3& w) {
  double tv = 0.5 * (p.x2 * v[0] - p.x1 * v[1]) + v[2];
  double tw = 0.5 * (p.x2 * w[0] - p.x1 * w[1]) + w[2];
  return v[0] * w[0] + v[1] * w[1] + tv * tw;
}

Vec3 connection_cylindrical(CylFrame i, CylFrame j, double rho) {
  const int a = static_cast<int>(i), b = static_cast<int>(j);
  if (a == 1 && (b == 0 || b == 1) && !(rho > 0.0)) {
    throw std::domain_error("connection_coefficient: 1/rho term on the axis");
  }
  switch (a * 3 + b) {
    case 0: return {0, 0, 0};
    case 1: return {0, 0, 0.5};
    case 2: return {0, -0.5, 0};
    case 3: return {0, 1.0 / rho, -0.5};
    case 4: return {-1.0 / rho, 0, 0};
    case 5: return {0.5, 0, 0};
    case 6: return {0, -0.5, 0};
    case 7: return {0.5, 0, 0};
    default: return {0, 0, 0};
  }
}

TangentVector connection_coefficient(CylFrame i, CylFrame j, const Nil3Point& p) {
  double rho = std::hypot(p.x1, p.x2);
  return from_cylindrical_components(p, connection_cylindrical(i, j, rho));
}

Vec3 connection_canonical(int i, int j) {
  static const double T[3][3][3] = {
      {{0, 0, 0}, {0, 0, 0.5}, {0, -0.5, 0}},
      {{0, 0, -0.5}, {0, 0, 0}, {0.5, 0, 0}},
      {{0, -0.5, 0}, {0.5, 0, 0}, {0, 0, 0}},
  };
  return {T[i][j][0], T[i][j][1], T[i][j][2]};
}

Nil3Point geodesic_point(const Nil3Point& p0, const GeodesicParams& gp, double t) {
  const double R = gp.R, g = gp.gamma;
  const double u = g * t;
  const double S = sinc1(u), C = cosc2(u), K = sinc3(u);
  const double c = std::cos(gp.phi), s = std::sin(gp.phi);
  Nil3Point q{R * (c * t * S - s * g * t * t * C),
              R * (c * g * t * t * C + s * t * S),
              0.5 * R * R * g * t * t * t * K + g * t};
  return group_mul(p0, q);
}

TangentVector geodesic_velocity(const Nil3Point& p0, const GeodesicParams& gp, double t) {
  const double a = gp.phi + gp.gamma * t;
  return {geodesic_point(p0, gp, t), gp.R * std::cos(a), gp.R * std::sin(a), gp.gamma};
}

Nil3Point equidistant_point(double rho, double theta, double t) {
  const double c = std::sqrt(4.0 + rho * rho);
  const double ang = 2.0 * t / c;
  return {rho * std::cos(theta) + 0.5 * rho * (std::cos(ang + theta) - std::cos(theta)),
          rho * std::sin(theta) + 0.5 * rho * (std::sin(ang + theta) - std::sin(theta)),
          rho * rho / 8.0 * std::sin(ang) + (8.0 + rho * rho) * t / (4.0 * c)};
}

double asymptotic_quadric_residual(double t, double rho, double theta) {
  Nil3Point x = equidistant_point(rho, theta, t);
  return t * t * (x.x1 * x.x1 + x.x2 * x.x2) - 4.0 * x.x3 * x.x3 - t * t * (4.0 - t * t / 3.0);
}

IsometryElement IsometryElement::rotation(double alpha) {
  IsometryElement e;
  e.kind = IsometryKind::rotation;
  e.alpha = alpha;
  return e;
}

IsometryElement IsometryElement::vertical_translation(double h) {
  IsometryElement e;
  e.kind = IsometryKind::vertical_translation;
  e.h = h;
  return e;
}

IsometryElement IsometryElement::reflection(double beta, double u) {
  IsometryElement e;
  e.kind = IsometryKind::reflection;
  e.beta = beta;
  e.u = u;
  return e;
}

IsometryElement IsometryElement::reflection_k(int k, int n, double u) {
  return reflection(k * std::numbers::pi / n, u);
}

IsometryElement IsometryElement::left_translation(const Nil3Point& g) {
  IsometryElement e;
  e.kind = IsometryKind::left_translation;
  e.g = g;
  return e;
}

IsometryElement IsometryElement::inverse() const {
  switch (kind) {
    case IsometryKind::rotation: return rotation(-alpha);
    case IsometryKind::vertical_translation: return vertical_translation(-h);
    case IsometryKind::reflection: return *this;
    case IsometryKind::left_translation: return left_translation(group_inv(g));
  }
  return *this;
}

AffineMap as_affine(const IsometryElement& e) {
  AffineMap m;
  switch (e.kind) {
    case IsometryKind::rotation: {
      double c = std::cos(e.alpha), s = std::sin(e.alpha);
      m.L << c, -s, 0, s, c, 0, 0, 0, 1;
      break;
    }
    case IsometryKind::vertical_translation:
      m.o = {0, 0, e.h};
      break;
    case IsometryKind::reflection: {
      double c = std::cos(2 * e.beta), s = std::sin(2 * e.beta);
      m.L << c, s, 0, s, -c, 0, 0, 0, -1;
      m.o = {0, 0, 2 * e.u};
      break;
    }
    case IsometryKind::left_translation:
      m.L(2, 0) = -0.5 * e.g.x2;
      m.L(2, 1) = 0.5 * e.g.x1;
      m.o = e.g.vec();
      break;
  }
  return m;
}

Nil3Point apply_isometry(const IsometryElement& e, const Nil3Point& p) {
  switch (e.kind) {
    case IsometryKind::rotation: {
      double co = std::cos(e.alpha), si = std::sin(e.alpha);
      return {co * p.x1 - si * p.x2, si * p.x1 + co * p.x2, p.x3};
    }
    case IsometryKind::vertical_translation:
      return {p.x1, p.x2, p.x3 + e.h};
    case IsometryKind::reflection: {
      // rotate by -beta, drop by u, flip (x1,-x2,-x3), undo.
      double co = std::cos(e.beta), si = std::sin(e.beta);
      double y1 = co * p.x1 + si * p.x2;
      double y2 = -si * p.x1 + co * p.x2;
      double y3 = p.x3 - e.u;
      y2 = -y2;
      y3 = -y3;
      return {co * y1 - si * y2, si * y1 + co * y2, y3 + e.u};
    }
    case IsometryKind::left_translation:
      return group_mul(e.g, p);
  }
  return p;
}

Vec3 push_forward(const IsometryElement& e, const Vec3& coords) { return as_affine(e).L * coords; }

}  // namespace nil3
