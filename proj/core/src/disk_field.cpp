#include "nil3/disk_field.hpp"
#include "nil3/parallel.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nil3 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(int j, int n) { return ((j % n) + n) % n; }

// Degree-5 extrapolation through the trace and the last five rings,
// for the two ghost rings r = 1 + h/2 and r = 1 + 3h/2.
constexpr double kGhost[2][6] = {
    {256.0 / 63.0, -5.0, 10.0 / 3.0, -2.0, 5.0 / 7.0, -1.0 / 9.0},
    {512.0 / 21.0, -45.0, 40.0, -27.0, 72.0 / 7.0, -5.0 / 3.0},
};

constexpr double kD1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
constexpr double kD2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

using Trip = Eigen::Triplet<double>;

struct Builder {
  int nr, nt;
  std::vector<Trip> node, trace;

  void add(int row, int ii, int jj, double c) {
    if (c == 0.0) return;
    jj = wrap(jj, nt);
    if (ii < 0) {
      add(row, -1 - ii, jj + nt / 2, c);
      return;
    }
    if (ii >= nr) {
      const double* g = kGhost[ii - nr];
      trace.emplace_back(row, jj, c * g[0]);
      for (int m = 1; m <= 5; ++m) node.emplace_back(row, (nr - m) * nt + jj, c * g[m]);
      return;
    }
    node.emplace_back(row, ii * nt + jj, c);
  }
};

std::unique_ptr<StencilOperators> build_operators(int nr, int nt) {
  if (nr < 5) throw std::invalid_argument("stencil_operators: need at least 5 radial nodes");
  if (nt < 8 || nt % 2 != 0) throw std::invalid_argument("stencil_operators: Ntheta must be even and >= 8");
  auto ops = std::make_unique<StencilOperators>();
  ops->nr = nr;
  ops->ntheta = nt;
  const int N = nr * nt;
  const double h = 1.0 / nr, k = kTwoPi / nt;
  std::array<Builder, 6> b;
  for (auto& x : b) x = Builder{nr, nt, {}, {}};
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int row = i * nt + j;
      b[0].add(row, i, j, 1.0);
      for (int a = 0; a < 5; ++a) {
        b[1].add(row, i + a - 2, j, kD1[a] / (12 * h));
        b[2].add(row, i, j + a - 2, kD1[a] / (12 * k));
        b[3].add(row, i + a - 2, j, kD2[a] / (12 * h * h));
        b[5].add(row, i, j + a - 2, kD2[a] / (12 * k * k));
        for (int c = 0; c < 5; ++c) {
          b[4].add(row, i + a - 2, j + c - 2, kD1[a] * kD1[c] / (144 * h * k));
        }
      }
    }
  }
  for (int m = 0; m < 6; ++m) {
    ops->D[m].resize(N, N);
    ops->D[m].setFromTriplets(b[m].node.begin(), b[m].node.end());
    ops->T[m].resize(N, nt);
    ops->T[m].setFromTriplets(b[m].trace.begin(), b[m].trace.end());
  }
  return ops;
}

double lagrange(const double* x, const double* y, int n, double at) {
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    double l = 1.0;
    for (int b = 0; b < n; ++b) {
      if (b != a) l *= (at - x[b]) / (x[a] - x[b]);
    }
    sum += l * y[a];
  }
  return sum;
}

// Cubic extrapolation of the last four rings to r = 1.
void extrapolate_trace(ScalarDiskField& f) {
  const int nr = f.nr();
  double x[4], y[4];
  for (int j = 0; j < f.ntheta(); ++j) {
    for (int m = 0; m < 4; ++m) {
      x[m] = f.r(nr - 4 + m);
      y[m] = f(nr - 4 + m, j);
    }
    f.trace(j) = lagrange(x, y, 4, 1.0);
  }
}

void check_same_grid(const ScalarDiskField& a, const ScalarDiskField& b) {
  if (a.nr() != b.nr() || a.ntheta() != b.ntheta()) {
    throw std::invalid_argument("ScalarDiskField: grid mismatch");
  }
}

}  // namespace

ScalarDiskField::ScalarDiskField(int nr, int ntheta)
    : nr_(nr), nt_(ntheta), values_(static_cast<std::size_t>(nr) * ntheta, 0.0), trace_(ntheta, 0.0) {
  if (nr <= 0 || ntheta <= 0) throw std::invalid_argument("ScalarDiskField: empty grid");
}

ScalarDiskField ScalarDiskField::sample(int nr, int ntheta,
                                        const std::function<double(double, double)>& f) {
  ScalarDiskField out(nr, ntheta);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ntheta; ++j) out(i, j) = f(out.r(i), out.theta(j));
  }
  for (int j = 0; j < ntheta; ++j) out.trace(j) = f(1.0, out.theta(j));
  return out;
}

double ScalarDiskField::dtheta() const { return kTwoPi / nt_; }
double ScalarDiskField::theta(int j) const { return kTwoPi * j / nt_; }

ScalarDiskField& ScalarDiskField::operator+=(const ScalarDiskField& o) {
  check_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  for (int j = 0; j < nt_; ++j) trace_[j] += o.trace_[j];
  return *this;
}

ScalarDiskField& ScalarDiskField::operator-=(const ScalarDiskField& o) {
  check_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  for (int j = 0; j < nt_; ++j) trace_[j] -= o.trace_[j];
  return *this;
}

ScalarDiskField& ScalarDiskField::operator*=(double c) {
  for (double& v : values_) v *= c;
  for (double& v : trace_) v *= c;
  return *this;
}

double ScalarDiskField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarDiskField operator+(ScalarDiskField a, const ScalarDiskField& b) { return a += b; }
ScalarDiskField operator-(ScalarDiskField a, const ScalarDiskField& b) { return a -= b; }
ScalarDiskField operator*(double c, ScalarDiskField a) { return a *= c; }

const StencilOperators& stencil_operators(int nr, int ntheta) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<StencilOperators>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nr, ntheta}];
  if (!slot) slot = build_operators(nr, ntheta);
  return *slot;
}

std::array<Eigen::VectorXd, 6> apply_stencils(const StencilOperators& ops, const Eigen::VectorXd& v,
                                              const Eigen::VectorXd& t) {
  const int nr = ops.nr, nt = ops.ntheta;
  Eigen::VectorXd vc = v, tc = t.array() - t.mean();
  for (int i = 0; i < nr; ++i) vc.segment(i * nt, nt).array() -= v.segment(i * nt, nt).mean();
  std::array<Eigen::VectorXd, 6> out;
  for (int m = 0; m < 6; ++m) {
    const bool angular = m == 2 || m == 4 || m == 5;
    out[m] = angular ? Eigen::VectorXd(ops.D[m] * vc + ops.T[m] * tc) : Eigen::VectorXd(ops.D[m] * v + ops.T[m] * t);
  }
  return out;
}

std::vector<DiskJet2> field_jets(const ScalarDiskField& f) {
  const StencilOperators& ops = stencil_operators(f.nr(), f.ntheta());
  Eigen::Map<const Eigen::VectorXd> v(f.values().data(), f.values().size());
  Eigen::Map<const Eigen::VectorXd> t(f.trace().data(), f.trace().size());
  const std::array<Eigen::VectorXd, 6> comp = apply_stencils(ops, v, t);
  std::vector<DiskJet2> jets(f.size());
  for (int i = 0; i < f.nr(); ++i) {
    for (int j = 0; j < f.ntheta(); ++j) {
      const std::size_t k = f.index(i, j);
      jets[k] = {f.r(i), f.theta(j), comp[0][k], comp[1][k], comp[2][k], comp[3][k], comp[4][k], comp[5][k]};
    }
  }
  return jets;
}

ScalarDiskField flat_laplacian(const ScalarDiskField& f) {
  ScalarDiskField out(f.nr(), f.ntheta());
  std::vector<DiskJet2> jets = field_jets(f);
  for (std::size_t k = 0; k < jets.size(); ++k) {
    const DiskJet2& q = jets[k];
    out.values()[k] = q.eta11 + q.eta1 / q.r + q.eta22 / (q.r * q.r);
  }
  extrapolate_trace(out);
  return out;
}

ScalarDiskField jacobi_apply(const ScalarDiskField& f) {
  ScalarDiskField out(f.nr(), f.ntheta());
  std::vector<DiskJet2> jets = field_jets(f);
  for (int i = 0; i < f.nr(); ++i) {
    const double r = f.r(i), p = 1.0 + r * r;
    for (int j = 0; j < f.ntheta(); ++j) {
      const DiskJet2& q = jets[f.index(i, j)];
      out(i, j) = q.eta11 + q.eta1 / r + q.eta22 / (r * r) + 8.0 * q.eta / (p * p);
    }
  }
  extrapolate_trace(out);
  return out;
}

ScalarDiskField compactified_H_field(const ScalarDiskField& f) {
  ScalarDiskField out(f.nr(), f.ntheta());
  std::vector<DiskJet2> jets = field_jets(f);
  parallel_for(jets.size(), [&](std::size_t k) { out.values()[k] = compactified_H(jets[k]); });
  extrapolate_trace(out);
  return out;
}

double integrate(const ScalarDiskField& f) {
  double sum = 0.0;
  for (int i = 0; i < f.nr(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < f.ntheta(); ++j) ring += f(i, j);
    sum += ring * f.r(i);
  }
  return sum * f.dr() * f.dtheta();
}

double inner_product(const ScalarDiskField& u, const ScalarDiskField& v) {
  check_same_grid(u, v);
  double sum = 0.0;
  for (int i = 0; i < u.nr(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < u.ntheta(); ++j) ring += u(i, j) * v(i, j);
    sum += ring * u.r(i);
  }
  return sum * u.dr() * u.dtheta();
}

double trace_integral(const ScalarDiskField& f) {
  double sum = 0.0;
  for (double v : f.trace()) sum += v;
  return sum * f.dtheta();
}

double boundary_derivative(const ScalarDiskField& f, int j) {
  const int n = f.nr();
  return (8.0 * f.trace(j) - 9.0 * f(n - 1, j) + f(n - 2, j)) / (3.0 * f.dr());
}

GreenTerms green_terms(const ScalarDiskField& u, const ScalarDiskField& v) {
  check_same_grid(u, v);
  ScalarDiskField Lu = jacobi_apply(u), Lv = jacobi_apply(v);
  GreenTerms g;
  g.interior = inner_product(u, Lv) - inner_product(v, Lu);
  double b = 0.0;
  for (int j = 0; j < u.ntheta(); ++j) {
    b += u.trace(j) * boundary_derivative(v, j) - v.trace(j) * boundary_derivative(u, j);
  }
  g.boundary = b * u.dtheta();
  g.residual = g.interior - g.boundary;
  return g;
}

double green_residual(const ScalarDiskField& u, const ScalarDiskField& v) {
  return green_terms(u, v).residual;
}

FluxReport vertical_flux(const ScalarDiskField& f, double R) {
  if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("vertical_flux: R must lie in (0,1)");
  const int i = std::clamp(static_cast<int>(std::lround(R * f.nr() - 0.5)), 0, f.nr() - 1);
  std::vector<DiskJet2> jets = field_jets(f);
  const double r = f.r(i), s = 1.0 - r * r, p = 1.0 + r * r;
  double sum = 0.0;
  for (int j = 0; j < f.ntheta(); ++j) {
    const DiskJet2& q = jets[f.index(i, j)];
    const double w = std::sqrt(w_squared(q));
    sum += (4.0 * r * r * q.eta + r * s * p * q.eta1) / (p * p * w);
  }
  FluxReport rep;
  rep.radius = r;
  rep.integral_route = sum * f.dtheta();
  rep.limit_route = trace_integral(f);
  rep.difference = rep.integral_route - rep.limit_route;
  return rep;
}

AsymptoticDistanceReport asymptotic_distance(const ScalarDiskField& f, double check_radius) {
  AsymptoticDistanceReport rep;
  rep.gamma = f.trace();
  rep.check_radius = check_radius;
  rep.two_h_over_rho.resize(f.ntheta());
  const double r = check_radius, s = 1.0 - r * r, p = 1.0 + r * r;
  for (int j = 0; j < f.ntheta(); ++j) {
    const double eta = interpolate(f, r, f.theta(j));
    const double h = eta * p / s, rho = 4.0 * r / s;
    rep.two_h_over_rho[j] = 2.0 * h / rho;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.two_h_over_rho[j] - f.trace(j)));
  }
  return rep;
}

double interpolate(const ScalarDiskField& f, double r, double theta) {
  const int nr = f.nr(), nt = f.ntheta();
  const double h = f.dr(), k = f.dtheta();

  auto ring = [&](int ii, double th) {
    if (ii < 0) {
      ii = -1 - ii;
      th += std::numbers::pi;
    }
    double t = th / k;
    int j0 = static_cast<int>(std::floor(t));
    double x[4], y[4];
    for (int m = 0; m < 4; ++m) {
      int jj = j0 - 1 + m;
      x[m] = jj;
      y[m] = ii == nr ? f.trace(wrap(jj, nt)) : f(ii, wrap(jj, nt));
    }
    return lagrange(x, y, 4, t);
  };

  int i0 = static_cast<int>(std::floor(r / h - 0.5)) - 1;
  i0 = std::clamp(i0, -2, nr - 3);
  double x[4], y[4];
  for (int m = 0; m < 4; ++m) {
    const int ii = i0 + m;
    x[m] = ii == nr ? 1.0 : (ii + 0.5) * h;
    y[m] = ring(ii, theta);
  }
  return lagrange(x, y, 4, r);
}

double center_value(const ScalarDiskField& f) {
  double m0 = 0.0, m1 = 0.0;
  for (int j = 0; j < f.ntheta(); ++j) {
    m0 += f(0, j);
    m1 += f(1, j);
  }
  m0 /= f.ntheta();
  m1 /= f.ntheta();
  return (9.0 * m0 - m1) / 8.0;
}

void write_field_csv(std::ostream& os, const ScalarDiskField& f) {
  char buf[128];
  os << "r,theta,eta\n";
  for (int i = 0; i < f.nr(); ++i) {
    for (int j = 0; j < f.ntheta(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.r(i), f.theta(j), f(i, j));
      os << buf;
    }
  }
  for (int j = 0; j < f.ntheta(); ++j) {
    std::snprintf(buf, sizeof buf, "1,%.17g,%.17g\n", f.theta(j), f.trace(j));
    os << buf;
  }
}

void write_field_csv(const std::string& path, const ScalarDiskField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_field_csv(os, f);
}

ScalarDiskField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,theta,eta", 0) != 0) {
    throw std::runtime_error("field csv: missing header r,theta,eta");
  }
  struct Row {
    double r, theta, eta;
  };
  std::vector<Row> interior, boundary;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw std::runtime_error("field csv: malformed row '" + line + "'");
    }
    Row row{std::stod(a), std::stod(b), std::stod(c)};
    (row.r == 1.0 ? boundary : interior).push_back(row);
  }
  const int nt = static_cast<int>(boundary.size());
  if (nt == 0 || interior.size() % nt != 0) throw std::runtime_error("field csv: inconsistent grid");
  const int nr = static_cast<int>(interior.size() / nt);
  ScalarDiskField f(nr, nt);
  const double k = f.dtheta();
  for (const Row& row : interior) {
    const int i = static_cast<int>(std::lround(row.r * nr - 0.5));
    const int j = wrap(static_cast<int>(std::lround(row.theta / k)), nt);
    if (i < 0 || i >= nr) throw std::runtime_error("field csv: radius off grid");
    f(i, j) = row.eta;
  }
  for (const Row& row : boundary) f.trace(wrap(static_cast<int>(std::lround(row.theta / k)), nt)) = row.eta;
  return f;
}

ScalarDiskField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_field_csv(is);
}

}  // namespace nil3
