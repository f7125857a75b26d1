#pragma once

#include "nil3/disk_field.hpp"
#include "nil3/mesh.hpp"

#include <array>
#include <numbers>
#include <string>
#include <vector>

namespace nil3 {

// Samples of gamma on theta_j = 2 pi j / N with its real DFT:
// gamma = a_0 + sum_{k=1}^{N/2} (a_k cos k theta + b_k sin k theta).
class BoundaryData {
 public:
  BoundaryData() = default;
  explicit BoundaryData(std::vector<double> samples);

  template <class F>
  static BoundaryData sample(int ntheta, F&& f);
  static BoundaryData sine(int ntheta, int n, double eps);
  // coeffs = c0, a1, b1, a2, b2, ...
  static BoundaryData fourier(int ntheta, const std::vector<double>& coeffs);

  int ntheta() const { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }
  double mean() const { return a_.empty() ? 0.0 : a_[0]; }

  double evaluate(double theta) const;
  BoundaryData resampled(int ntheta) const;

 private:
  void transform();

  std::vector<double> samples_;
  std::vector<double> a_;
  std::vector<double> b_;
};

template <class F>
BoundaryData BoundaryData::sample(int ntheta, F&& f) {
  std::vector<double> s(ntheta);
  for (int j = 0; j < ntheta; ++j) s[j] = f(2.0 * std::numbers::pi * j / ntheta);
  return BoundaryData(std::move(s));
}

enum class JacobianMode { analytic, finite_difference };

struct SolverConfig {
  int nr = 64;
  int ntheta = 256;
  double newton_tol = 1e-10;
  int max_iter = 30;
  double fd_step = 1e-7;
  double kernel_tol = 1e-8;
  JacobianMode jacobian = JacobianMode::analytic;

  void validate() const;
};

struct DeformationState {
  BoundaryData gamma;
  double lambda = 0.0;
  ScalarDiskField sigma;
  ScalarDiskField eta;
  double kappa = 0.0;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  bool converged = false;
  bool obstructed = false;
  double orthogonality = 0.0;
  std::vector<double> residual_history;

  bool minimal() const { return converged && !obstructed; }
};

// Exact jets of mu(gamma) at the nodes of an nr x ntheta grid.
std::vector<std::array<double, 6>> harmonic_jets(const BoundaryData& gamma, int nr, int ntheta);
ScalarDiskField harmonic_extension(const BoundaryData& gamma, int nr, int ntheta);
ScalarDiskField phi0_field(int nr, int ntheta);

DeformationState solve_minimal_graph(const BoundaryData& gamma, double lambda, const SolverConfig& config);

// Chain-rule Jacobian vs the colored finite-difference Jacobian at a given sigma.
struct JacobianCheck {
  double max_abs_difference = 0.0;
  double max_abs_entry = 0.0;
};
JacobianCheck compare_jacobians(const BoundaryData& gamma, double lambda, const ScalarDiskField& sigma,
                                const SolverConfig& config);

double kappa_map(const BoundaryData& gamma, double lambda, const SolverConfig& config);

DeformationState make_symmetric_graph(int n, double epsilon, const SolverConfig& config);

struct SectorDomain {
  int k = 0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  int sign = 0;
  double min_margin = 0.0;  // min of sign * eta over interior nodes of the sector
  double max_value = 0.0;   // max of sign * eta
  bool certified = false;
};

struct DisjointReport {
  int n = 0;
  double epsilon = 0.0;
  std::vector<SectorDomain> sectors;
  double ray_max_abs = 0.0;  // |eta| on nodes lying on the rays theta = k pi / n
  bool all_certified = false;
  DeformationState state;
};

DisjointReport disjoint_graph_domains(int n, double epsilon, const SolverConfig& config);

// Triangulates graph_chart over rho <= rho_max with `resolution` rings; the outer
// ring carries the asymptotic trace gamma as vertex scalar.
TriMesh3 export_graph_mesh(const DeformationState& state, double rho_max, int resolution);

double rho_to_r(double rho);

}  // namespace nil3
