#pragma once

#include "nil3/heisenberg.hpp"

#include <array>

namespace nil3 {

struct DiskJet2 {
  double r = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta11 = 0.0;
  double eta12 = 0.0;
  double eta22 = 0.0;

  std::array<double, 6> values() const { return {eta, eta1, eta2, eta11, eta12, eta22}; }
  static DiskJet2 from(double r, double theta, const std::array<double, 6>& v) {
    return {r, theta, v[0], v[1], v[2], v[3], v[4], v[5]};
  }
};

// Cylindrical-frame data of the chart X^eta; the normal is unit, components (E_rho, E_theta, E3).
struct MetricData {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
  double det = 0.0;
  double det0 = 0.0;
  double w = 1.0;
  Vec3 normal = Vec3::Zero();
};

// g_ij / sqrt|g(0)|, finite up to r = 1.
struct NormalizedMetric {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
};

struct CoefficientMatrix {
  double A11 = 0.0;
  double A12 = 0.0;
  double A22 = 0.0;
  double B = 0.0;

  double det() const { return A11 * A22 - A12 * A12; }
  double min_eigenvalue() const;
};

// Tangent vectors X1 = a E_rho + b E3, X2 = c E_theta + d E3 of the chart.
struct ChartFrame {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

double phi0(double r);
DiskJet2 phi0_jet(double r, double theta, double lambda);

Nil3Point model_chart(double r, double theta);
Nil3Point graph_chart(double r, double theta, double eta);

ChartFrame chart_frame(const DiskJet2& jet);
MetricData first_fundamental_form(const DiskJet2& jet);
NormalizedMetric normalized_metric(const DiskJet2& jet);
double w_squared(const DiskJet2& jet);

// Exact H from the conormal derivatives of the chart (double precision).
double mean_curvature(const DiskJet2& jet);

// Compactified operator (2/r) sqrt|g(0)| H through its regular closed form.
double compactified_H(const DiskJet2& jet);

// Direct conormal contraction of (2/r) sqrt|g(0)| H evaluated in quad precision.
double compactified_H_direct(const DiskJet2& jet);

CoefficientMatrix coefficient_matrix(const DiskJet2& jet);

// Partial derivatives of compactified_H with respect to
// (eta, eta1, eta2, eta11, eta12, eta22).
std::array<double, 6> compactified_H_partials(const DiskJet2& jet);

}  // namespace nil3
