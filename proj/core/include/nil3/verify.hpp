#pragma once

#include "nil3/graph_operator.hpp"
#include "nil3/heisenberg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nil3 {

enum class Bound { at_most, at_least };

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Bound bound = Bound::at_most;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct VerifyConfig {
  int nr = 32;
  int ntheta = 128;
  double newton_tol = 1e-10;
  std::uint64_t seed = 1;
  int samples = 100;
  double samples_per_unit = 4.0;

  void validate() const;
};

const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyConfig& config);

SuiteReport verify_geometry(const VerifyConfig& config);
SuiteReport verify_operator(const VerifyConfig& config);
SuiteReport verify_solver(const VerifyConfig& config);
SuiteReport verify_plateau(const VerifyConfig& config);

// Classical RK4 on x' = F(x)^-1 v, v'_k = -v_i v_j Gamma_ij^k (canonical frame).
Nil3Point integrate_geodesic(const Nil3Point& p0, const Vec3& frame_velocity, double t, int steps);

// Mean curvature of graph_chart from finite differences of the embedding of the
// jet's quadratic Taylor polynomial and the canonical connection table.
double extrinsic_mean_curvature(const DiskJet2& jet, double h = 1e-3);

}  // namespace nil3
