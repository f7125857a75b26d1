#pragma once

#include "nil3/mesh.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace nil3 {

struct AssemblyReport {
  int copies = 0;
  int periods = 0;
  std::size_t welded = 0;
  double seam_error = 0.0;        // max |reflect(v) - v| over seam vertices
  double weld_gap = 0.0;          // largest distance between welded vertex pairs
  double rotation_error = 0.0;    // rotation by 2 theta_n on matched vertices
  std::size_t rotation_matched = 0;
  double translation_error = 0.0; // vertical translation by 2a on matched vertices
  std::size_t translation_matched = 0;
  double double_reflection_error = 0.0;
  std::size_t pinched = 0;         // axis vertices split into separate fans for the topology count
  long euler_characteristic = 0;
  int boundary_components = 0;
  int genus = -1;
  double z_min = 0.0;
  double z_max = 0.0;
};

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(const std::string& what, const Nil3Point& where) : std::runtime_error(what), location(where) {}
  Nil3Point location;
};

// Copies of the fundamental piece (sector [0, theta_n], slab [0, a]) produced by
// reflections along gamma_{0,0}, gamma_{theta_n,0}, gamma_{0,a}, gamma_{theta_n,a}.
// The copy in sector k occupies slabs j = k (mod 2); `rotation_copies` sectors
// (2n closes one turn) and `vertical_periods` periods of height 2a.
TriMesh3 assemble_saddle_tower(const TriMesh3& fundamental, int n, double a, int rotation_copies,
                               int vertical_periods, AssemblyReport* report = nullptr);

struct EndSample {
  double rho = 0.0;
  double deviation = 0.0;
  std::size_t count = 0;
};

struct EndReport {
  int k = 0;
  double angle = 0.0;
  std::vector<EndSample> samples;
  bool decreasing = false;
};

struct EndAsymptoticsReport {
  std::vector<EndReport> ends;
  bool all_decreasing = false;
};

// Horizontal deviation rho |sin(theta - k theta_n)| from the vertical plane of
// gamma_{k,0}, sampled on rings at the given radii.
EndAsymptoticsReport end_asymptotics_report(const TriMesh3& assembly, int n, const std::vector<double>& radii);

}  // namespace nil3
