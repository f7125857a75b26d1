#pragma once

// Reference computations built only from the coordinate metric
// dx1^2 + dx2^2 + (x2 dx1 / 2 - x1 dx2 / 2 + dx3)^2.

#include "nil3/graph_operator.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <type_traits>

namespace oracle {

using Eigen::Matrix3d;
using Eigen::Vector3d;

inline Matrix3d metric(const Vector3d& x) {
  const double a = x[0], b = x[1];
  Matrix3d g;
  g << 1 + b * b / 4, -a * b / 4, b / 2,
      -a * b / 4, 1 + a * a / 4, -a / 2,
      b / 2, -a / 2, 1;
  return g;
}

// dg[k] = d metric / dx_k
inline std::array<Matrix3d, 3> metric_derivatives(const Vector3d& x) {
  const double a = x[0], b = x[1];
  Matrix3d d1, d2;
  d1 << 0, -b / 4, 0,
      -b / 4, a / 2, -0.5,
      0, -0.5, 0;
  d2 << b / 2, -a / 4, 0.5,
      -a / 4, 0, 0,
      0.5, 0, 0;
  return {d1, d2, Matrix3d::Zero()};
}

// Gamma^i(v, w) = Gamma^i_jk v^j w^k
inline Vector3d christoffel(const Vector3d& x, const Vector3d& v, const Vector3d& w) {
  const Matrix3d gi = metric(x).inverse();
  const auto dg = metric_derivatives(x);
  Vector3d low = Vector3d::Zero();
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        low[l] += 0.5 * v[j] * w[k] * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
  return gi * low;
}

// RK4 for x'' = -Gamma(x', x') from coordinate position and velocity.
inline Vector3d geodesic(Vector3d x, Vector3d v, double t, int steps) {
  const double h = t / steps;
  auto acc = [](const Vector3d& p, const Vector3d& q) -> Vector3d { return -christoffel(p, q, q); };
  for (int s = 0; s < steps; ++s) {
    Vector3d k1x = v, k1v = acc(x, v);
    Vector3d k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
    Vector3d k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
    Vector3d k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return x;
}

template <class F>
auto d4(F&& f, double h) -> std::decay_t<decltype(f(h))> {
  return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h);
}

// H = (1/2) g^ij <nabla_{X_i} X_j, N> for the graph_chart embedding of the
// quadratic Taylor polynomial of the jet, normal oriented along X_r x X_theta.
inline double mean_curvature(const nil3::DiskJet2& j, double h = 1e-3) {
  auto X = [&](double dr, double dt) -> Vector3d {
    const double e = j.eta + j.eta1 * dr + j.eta2 * dt + 0.5 * j.eta11 * dr * dr + j.eta12 * dr * dt +
                     0.5 * j.eta22 * dt * dt;
    const double r = j.r + dr, th = j.theta + dt, s = 1 - r * r;
    return {4 * r / s * std::cos(th), 4 * r / s * std::sin(th), e * (1 + r * r) / s};
  };
  auto D = [&](int k, double dr, double dt) -> Vector3d {
    return k == 0 ? d4([&](double s) { return X(dr + s, dt); }, h) : d4([&](double s) { return X(dr, dt + s); }, h);
  };
  const Vector3d x = X(0, 0);
  const Matrix3d g = metric(x);
  const Vector3d T[2] = {D(0, 0, 0), D(1, 0, 0)};
  Vector3d N = g.inverse() * T[0].cross(T[1]);
  N /= std::sqrt(N.dot(g * N));
  double G[2][2], B[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      G[a][b] = T[a].dot(g * T[b]);
      Vector3d second = a == 0 ? d4([&](double s) { return D(b, s, 0); }, h) : d4([&](double s) { return D(b, 0, s); }, h);
      B[a][b] = (second + christoffel(x, T[a], T[b])).dot(g * N);
    }
  const double det = G[0][0] * G[1][1] - G[0][1] * G[1][0];
  return 0.5 * (G[1][1] * B[0][0] - 2 * G[0][1] * B[0][1] + G[0][0] * B[1][1]) / det;
}

// Value of D1 kappa(0, 0) . 1: <Lbar 1, phi0> / |phi0|^2 = 2 pi / (pi (3 - 4 ln 2)).
inline double d1_kappa() { return 2.0 / (3.0 - 4.0 * std::log(2.0)); }

}  // namespace oracle
