#pragma once

#include "nil3/graph_operator.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nil3 {

// Half-offset polar grid: r_i = (i + 1/2)/Nr, theta_j = 2 pi j / Ntheta, trace at r = 1.
class ScalarDiskField {
 public:
  ScalarDiskField() = default;
  ScalarDiskField(int nr, int ntheta);

  static ScalarDiskField sample(int nr, int ntheta, const std::function<double(double, double)>& f);

  int nr() const { return nr_; }
  int ntheta() const { return nt_; }
  std::size_t size() const { return values_.size(); }
  double dr() const { return 1.0 / nr_; }
  double dtheta() const;
  double r(int i) const { return (i + 0.5) / nr_; }
  double theta(int j) const;
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nt_ + j; }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& trace(int j) { return trace_[j]; }
  double trace(int j) const { return trace_[j]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& trace() { return trace_; }
  const std::vector<double>& trace() const { return trace_; }

  ScalarDiskField& operator+=(const ScalarDiskField& o);
  ScalarDiskField& operator-=(const ScalarDiskField& o);
  ScalarDiskField& operator*=(double c);

  double max_abs() const;

 private:
  int nr_ = 0;
  int nt_ = 0;
  std::vector<double> values_;
  std::vector<double> trace_;
};

ScalarDiskField operator+(ScalarDiskField a, const ScalarDiskField& b);
ScalarDiskField operator-(ScalarDiskField a, const ScalarDiskField& b);
ScalarDiskField operator*(double c, ScalarDiskField a);

// Fourth-order derivative stencils: jet component k at every node is
// D[k] * values + T[k] * trace. D[0] is the identity, T[0] zero.
struct StencilOperators {
  int nr = 0;
  int ntheta = 0;
  std::array<Eigen::SparseMatrix<double, Eigen::RowMajor>, 6> D;
  std::array<Eigen::SparseMatrix<double, Eigen::RowMajor>, 6> T;
};

const StencilOperators& stencil_operators(int nr, int ntheta);

// Jet components D[k] v + T[k] t. Theta-derivative components are applied to
// ring-mean-free data, which is exact for the stencils and limits cancellation.
std::array<Eigen::VectorXd, 6> apply_stencils(const StencilOperators& ops, const Eigen::VectorXd& v,
                                              const Eigen::VectorXd& t);

std::vector<DiskJet2> field_jets(const ScalarDiskField& f);

ScalarDiskField flat_laplacian(const ScalarDiskField& f);
ScalarDiskField jacobi_apply(const ScalarDiskField& f);
ScalarDiskField compactified_H_field(const ScalarDiskField& f);

// Quadrature: midpoint in r, trapezoid in theta, area element r dr dtheta.
double integrate(const ScalarDiskField& f);
double inner_product(const ScalarDiskField& u, const ScalarDiskField& v);
double trace_integral(const ScalarDiskField& f);

// Second-order one-sided d/dr at r = 1 from the trace and the last two rings.
double boundary_derivative(const ScalarDiskField& f, int j);

struct GreenTerms {
  double interior = 0.0;
  double boundary = 0.0;
  double residual = 0.0;
};

GreenTerms green_terms(const ScalarDiskField& u, const ScalarDiskField& v);
double green_residual(const ScalarDiskField& u, const ScalarDiskField& v);

struct FluxReport {
  double radius = 0.0;
  double integral_route = 0.0;
  double limit_route = 0.0;
  double difference = 0.0;
};

// The integral route is evaluated on the ring nearest to R.
FluxReport vertical_flux(const ScalarDiskField& f, double R);

struct AsymptoticDistanceReport {
  std::vector<double> gamma;
  double check_radius = 0.0;
  std::vector<double> two_h_over_rho;
  double max_deviation = 0.0;
};

AsymptoticDistanceReport asymptotic_distance(const ScalarDiskField& f, double check_radius = 0.99);

// Fourth-order Lagrange interpolation in r (trace included as a node) and theta.
double interpolate(const ScalarDiskField& f, double r, double theta);

// Height at r = 0 by quadratic extrapolation of the first two ring means.
double center_value(const ScalarDiskField& f);

void write_field_csv(std::ostream& os, const ScalarDiskField& f);
void write_field_csv(const std::string& path, const ScalarDiskField& f);
ScalarDiskField read_field_csv(std::istream& is);
ScalarDiskField read_field_csv(const std::string& path);

}  // namespace nil3
