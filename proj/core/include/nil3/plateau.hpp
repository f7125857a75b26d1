#pragma once

#include "nil3/asymptotic_solver.hpp"
#include "nil3/mesh.hpp"

#include <array>
#include <string>
#include <vector>

namespace nil3 {

struct ContourSample {
  Nil3Point p;
  SegmentTag tag = SegmentTag::none;
};

// Closed polyline h1, v1, ht1, ht2, v2, h2 starting and ending at the origin.
struct JordanContour {
  double a = 0.0;
  double b = 0.0;
  int n = 2;
  int samples_h = 0;  // segments per horizontal side
  int samples_v = 0;  // segments per vertical side
  std::vector<ContourSample> samples;

  double theta_n() const;
  std::vector<Nil3Point> corners() const;
};

JordanContour build_contour(double a, double b, int n, double samples_per_unit);

// Disk spanned by the contour, parametrized over [-1,1] x [0,1]; symmetric
// under the reflection along the horizontal geodesic at angle theta_n/2, height a/2.
TriMesh3 initial_spanning_mesh(const JordanContour& contour, double bulge = -1.0);

// Continues a solved piece for `from` to the larger contour `to` (same a, n, vertical
// sampling): the outer vertical columns become interior and planar strips are added out to to.b.
TriMesh3 extend_spanning_mesh(const TriMesh3& solved, const JordanContour& from, const JordanContour& to);

struct AreaGradient {
  double area = 0.0;
  std::array<Vec3, 3> grad;
};

// Area with the metric frozen at the barycenter, and its gradient with respect
// to the three vertices (coordinates). Throws on degenerate triangles.
AreaGradient triangle_area_gradient(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s);
double triangle_area(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s);
// Hessian of triangle_area with respect to (p, q, s), row-major 9x9.
std::array<double, 81> triangle_area_hessian(const Nil3Point& p, const Nil3Point& q, const Nil3Point& s);

double mesh_area(const TriMesh3& m);
// Gradient of the total area per vertex (free and fixed).
std::vector<Vec3> mesh_area_gradient(const TriMesh3& m, double* area = nullptr);
// Per-vertex |area gradient| / (one third of the incident area), interior vertices only.
std::vector<double> mean_curvature_proxy(const TriMesh3& m);

struct MinimizeConfig {
  double shrink = 0.5;
  double armijo = 1e-4;
  double grad_tol = 1e-7;
  int max_iter = 200000;
  int memory = 8;
  double area_floor = 1e-14;
  double smoothing = 0.0;
  // Damped Newton steps (exact discrete Hessian) once the max gradient drops below this; 0 disables.
  double newton_below = 1e-3;

  void validate() const;
};

enum class MinimizeStatus { converged, max_iterations, line_search_failure, degenerate };

struct MinimizeReport {
  MinimizeStatus status = MinimizeStatus::max_iterations;
  int iterations = 0;
  int newton_steps = 0;
  int flips = 0;  // edge flips during the run
  double initial_area = 0.0;
  double final_area = 0.0;
  double max_gradient = 0.0;
  bool monotone = true;
  std::vector<double> area_history;  // every accepted step
  std::string diagnostic;

  bool converged() const { return status == MinimizeStatus::converged; }
};

const char* status_name(MinimizeStatus s);

TriMesh3 minimize_area(const TriMesh3& mesh, const MinimizeConfig& config, MinimizeReport* report = nullptr);

struct BarrierReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  double worst_violation = 0.0;  // largest amount by which a bound is exceeded (<= 0 when clean)
  double min_margin = 0.0;
  Nil3Point worst_vertex;
  double tol = 1e-4;
};

// Height of the graph S_n over the point (x1, x2) through the chart and field interpolation.
double graph_height(const ScalarDiskField& eta, double x1, double x2);

BarrierReport barrier_check(const TriMesh3& mesh, const DeformationState& sn, double a, int n, double tol = 1e-4);

struct ContinuationStep {
  double b = 0.0;
  double area = 0.0;
  int iterations = 0;
  std::size_t triangles = 0;
  bool converged = false;
  double max_gradient = 0.0;
};

struct ContinuationReport {
  double a = 0.0;
  int n = 2;
  double region_radius = 0.0;
  std::vector<ContinuationStep> steps;
  std::vector<double> deviations;  // between consecutive solutions on rho <= region_radius
  bool decreasing = false;
  std::vector<TriMesh3> meshes;
};

// Each b after the first starts from the previous solution extended by extend_spanning_mesh.
// Largest distance from vertices of `from` inside rho <= radius to the triangles of `to`.
double region_deviation(const TriMesh3& from, const TriMesh3& to, double radius);

ContinuationReport continuation_in_b(double a, int n, const std::vector<double>& b_list,
                                     const MinimizeConfig& config, double samples_per_unit);

}  // namespace nil3
