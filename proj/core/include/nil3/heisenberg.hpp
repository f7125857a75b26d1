#pragma once

#include <Eigen/Core>

#include <array>

namespace nil3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Nil3Point {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Vec3 vec() const { return {x1, x2, x3}; }
  static Nil3Point from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

// Components v1, v2, v3 are taken in the canonical frame (E1, E2, E3).
struct TangentVector {
  Nil3Point base;
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  Vec3 vec() const { return {v1, v2, v3}; }
  double norm2() const { return v1 * v1 + v2 * v2 + v3 * v3; }
};

struct GeodesicParams {
  double R = 1.0;
  double phi = 0.0;
  double gamma = 0.0;

  static GeodesicParams from_direction(double phi, double gamma);
};

struct Cylindrical {
  double rho = 0.0;
  double theta = 0.0;
  double x3 = 0.0;
};

Nil3Point group_mul(const Nil3Point& p, const Nil3Point& q);
Nil3Point group_inv(const Nil3Point& p);

Cylindrical to_cylindrical(const Nil3Point& p);
Nil3Point from_cylindrical(double rho, double theta, double x3);

// Matrix F(p) with frame components = F(p) * coordinate components.
Mat3 frame_matrix(const Nil3Point& p);

TangentVector to_frame(const Nil3Point& p, const Vec3& coords);
Vec3 from_frame(const TangentVector& v);

// Rotates (v1, v2) by -theta(base) to get (E_rho, E_theta, E3) components.
Vec3 cylindrical_components(const TangentVector& v);
TangentVector from_cylindrical_components(const Nil3Point& p, const Vec3& c);

double metric_at(const Nil3Point& p, const Vec3& v, const Vec3& w);

enum class CylFrame { rho = 0, theta = 1, vertical = 2 };

// nabla_{E_i} E_j for the cylindrical frame, returned in canonical components.
// Throws std::domain_error for the 1/rho entries on the axis.
TangentVector connection_coefficient(CylFrame i, CylFrame j, const Nil3Point& p);

// Same table in cylindrical components (E_rho, E_theta, E3).
Vec3 connection_cylindrical(CylFrame i, CylFrame j, double rho);

// Covariant derivative terms for the canonical frame: nabla_{E_i} E_j.
Vec3 connection_canonical(int i, int j);

Nil3Point geodesic_point(const Nil3Point& p0, const GeodesicParams& params, double t);
TangentVector geodesic_velocity(const Nil3Point& p0, const GeodesicParams& params, double t);

Nil3Point equidistant_point(double rho, double theta, double t);
double asymptotic_quadric_residual(double t, double rho, double theta);

enum class IsometryKind { rotation, vertical_translation, reflection, left_translation };

struct IsometryElement {
  IsometryKind kind = IsometryKind::rotation;
  double alpha = 0.0;
  double h = 0.0;
  double beta = 0.0;
  double u = 0.0;
  Nil3Point g;

  static IsometryElement rotation(double alpha);
  static IsometryElement vertical_translation(double h);
  static IsometryElement reflection(double beta, double u);
  // Reflection along gamma_{k,u}: horizontal geodesic at angle k*pi/n through (0,0,u).
  static IsometryElement reflection_k(int k, int n, double u);
  static IsometryElement left_translation(const Nil3Point& g);

  IsometryElement inverse() const;
};

// Every supported isometry is affine in exponential coordinates: x -> L x + o.
struct AffineMap {
  Mat3 L = Mat3::Identity();
  Vec3 o = Vec3::Zero();

  Vec3 operator()(const Vec3& x) const { return L * x + o; }
  Nil3Point operator()(const Nil3Point& p) const { return Nil3Point::from(L * p.vec() + o); }
  AffineMap then(const AffineMap& next) const { return {next.L * L, next.L * o + next.o}; }
};

AffineMap as_affine(const IsometryElement& e);
Nil3Point apply_isometry(const IsometryElement& e, const Nil3Point& p);
// Push forward of a coordinate tangent vector at p.
Vec3 push_forward(const IsometryElement& e, const Vec3& coords);

}  // namespace nil3
