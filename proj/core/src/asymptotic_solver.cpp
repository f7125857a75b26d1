#include "nil3/asymptotic_solver.hpp"
#include "nil3/parallel.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nil3 {

namespace {

using SpRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Vec = Eigen::VectorXd;

double grid_cos(long m, long N) {
  m %= N;
  if (2 * m > N) m = N - m;
  return std::cos(2.0 * std::numbers::pi * m / N);
}

double grid_sin(long m, long N) {
  m %= N;
  if (2 * m > N) return -std::sin(2.0 * std::numbers::pi * (N - m) / N);
  return std::sin(2.0 * std::numbers::pi * m / N);
}

// Column coloring of the stencil coupling for finite-difference Jacobians.
struct Coloring {
  SpCol pattern;
  std::vector<std::vector<int>> groups;
};

const Coloring& stencil_coloring(int nr, int nt) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Coloring>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nr, nt}];
  if (slot) return *slot;
  const StencilOperators& ops = stencil_operators(nr, nt);
  SpRow rows = ops.D[0];
  for (int k = 1; k < 6; ++k) rows += ops.D[k];
  for (int r = 0; r < rows.outerSize(); ++r) {
    for (SpRow::InnerIterator it(rows, r); it; ++it) it.valueRef() = 1.0;
  }
  auto c = std::make_unique<Coloring>();
  c->pattern = SpCol(rows);
  const int N = static_cast<int>(rows.cols());
  std::vector<int> color(N, -1), mark;
  for (int col = 0; col < N; ++col) {
    std::vector<char> used(mark.size() + 1, 0);
    for (SpCol::InnerIterator it(c->pattern, col); it; ++it) {
      for (SpRow::InnerIterator jt(rows, it.row()); jt; ++jt) {
        const int other = color[jt.col()];
        if (other >= 0) {
          if (static_cast<std::size_t>(other) >= used.size()) used.resize(other + 1, 0);
          used[other] = 1;
        }
      }
    }
    int pick = 0;
    while (pick < static_cast<int>(used.size()) && used[pick]) ++pick;
    color[col] = pick;
    if (static_cast<std::size_t>(pick) >= mark.size()) mark.resize(pick + 1, 0);
  }
  c->groups.resize(mark.size());
  for (int col = 0; col < N; ++col) c->groups[color[col]].push_back(col);
  slot = std::move(c);
  return *slot;
}

struct Problem {
  int nr = 0;
  int nt = 0;
  int N = 0;
  const StencilOperators* ops = nullptr;
  std::vector<std::array<double, 6>> base;
  Vec phi;
  Vec weight;
  std::vector<double> radius;
  std::vector<double> angle;

  Problem(const BoundaryData& gamma, double lambda, int nr_, int nt_)
      : nr(nr_), nt(nt_), N(nr_ * nt_), ops(&stencil_operators(nr_, nt_)) {
    base = harmonic_jets(gamma, nr, nt);
    phi.resize(N);
    weight.resize(N);
    radius.resize(N);
    angle.resize(N);
    const double dr = 1.0 / nr;
    for (int i = 0; i < nr; ++i) {
      const double r = (i + 0.5) * dr;
      DiskJet2 pj = phi0_jet(r, 0.0, 1.0);
      for (int j = 0; j < nt; ++j) {
        const int k = i * nt + j;
        radius[k] = r;
        angle[k] = 2.0 * std::numbers::pi * j / nt;
        phi[k] = pj.eta;
        weight[k] = r * pj.eta;
        base[k][0] += lambda * pj.eta;
        base[k][1] += lambda * pj.eta1;
        base[k][3] += lambda * pj.eta11;
      }
    }
  }

  std::vector<DiskJet2> jets(const Vec& sigma) const {
    const std::array<Vec, 6> d = apply_stencils(*ops, sigma, Vec::Zero(nt));
    std::vector<DiskJet2> out(N);
    for (int k = 0; k < N; ++k) {
      std::array<double, 6> v;
      for (int m = 0; m < 6; ++m) v[m] = base[k][m] + d[m][k];
      out[k] = DiskJet2::from(radius[k], angle[k], v);
    }
    return out;
  }

  Vec hbar(const Vec& sigma) const {
    std::vector<DiskJet2> js = jets(sigma);
    Vec h(N);
    parallel_for(N, [&](std::size_t k) { h[k] = compactified_H(js[k]); });
    return h;
  }

  SpRow analytic_jacobian(const Vec& sigma) const {
    std::vector<DiskJet2> js = jets(sigma);
    std::vector<std::array<double, 6>> partial(N);
    parallel_for(N, [&](std::size_t k) { partial[k] = compactified_H_partials(js[k]); });
    std::vector<Eigen::Triplet<double>> trip;
    for (int m = 0; m < 6; ++m) {
      const SpRow& D = ops->D[m];
      for (int r = 0; r < N; ++r) {
        for (SpRow::InnerIterator it(D, r); it; ++it) trip.emplace_back(r, it.col(), partial[r][m] * it.value());
      }
    }
    SpRow J(N, N);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  SpRow fd_jacobian(const Vec& sigma, double step) const {
    const Coloring& col = stencil_coloring(nr, nt);
    const Vec h0 = hbar(sigma);
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& group : col.groups) {
      Vec s = sigma;
      for (int c : group) s[c] += step;
      const Vec h1 = hbar(s);
      for (int c : group) {
        for (SpCol::InnerIterator it(col.pattern, c); it; ++it) {
          trip.emplace_back(it.row(), c, (h1[it.row()] - h0[it.row()]) / step);
        }
      }
    }
    SpRow J(N, N);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  SpCol bordered(const SpRow& J) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(J.nonZeros() + 2 * N);
    for (int r = 0; r < N; ++r) {
      for (SpRow::InnerIterator it(J, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
      trip.emplace_back(r, N, -phi[r]);
      trip.emplace_back(N, r, weight[r]);
    }
    SpCol M(N + 1, N + 1);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
  }

  double orthogonality(const Vec& sigma) const { return weight.dot(sigma); }
};

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void assemble_fields(const Problem& P, const BoundaryData& gamma, const Vec& sigma, DeformationState& st) {
  st.sigma = ScalarDiskField(P.nr, P.nt);
  std::copy(sigma.data(), sigma.data() + P.N, st.sigma.values().begin());
  st.eta = ScalarDiskField(P.nr, P.nt);
  for (int k = 0; k < P.N; ++k) st.eta.values()[k] = P.base[k][0] + sigma[k];
  BoundaryData g = gamma.resampled(P.nt);
  st.eta.trace() = g.samples();
}

}  // namespace

void SolverConfig::validate() const {
  if (nr < 5) throw std::invalid_argument("SolverConfig: Nr must be >= 5");
  if (ntheta < 8 || ntheta % 2 != 0) throw std::invalid_argument("SolverConfig: Ntheta must be even and >= 8");
  if (!(newton_tol > 0) || max_iter <= 0 || !(fd_step > 0) || !(kernel_tol > 0)) {
    throw std::invalid_argument("SolverConfig: tolerances and iteration counts must be positive");
  }
}

std::vector<std::array<double, 6>> harmonic_jets(const BoundaryData& gamma_in, int nr, int nt) {
  const BoundaryData gamma = gamma_in.resampled(nt);
  const auto& a = gamma.cos_coeffs();
  const auto& b = gamma.sin_coeffs();
  const int K = static_cast<int>(a.size()) - 1;
  std::vector<std::array<double, 6>> out(static_cast<std::size_t>(nr) * nt);
  parallel_for(out.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / nt, j = static_cast<int>(idx) % nt;
    const double r = (i + 0.5) / nr;
    std::array<double, 6> v{a[0], 0, 0, 0, 0, 0};
    double rk = 1.0;  // r^k
    double rk1 = 0.0;  // r^(k-1)
    double rk2 = 0.0;  // r^(k-2)
    for (int k = 1; k <= K; ++k) {
      rk2 = rk1;
      rk1 = rk;
      rk *= r;
      if (rk1 == 0.0) break;
      const double c = grid_cos(static_cast<long>(k) * j, nt), s = grid_sin(static_cast<long>(k) * j, nt);
      const double f = a[k] * c + b[k] * s;
      const double ft = k * (-a[k] * s + b[k] * c);
      v[0] += rk * f;
      v[1] += k * rk1 * f;
      v[2] += rk * ft;
      v[3] += k * (k - 1) * rk2 * f;
      v[4] += k * rk1 * ft;
      v[5] += -static_cast<double>(k) * k * rk * f;
    }
    out[idx] = v;
  });
  return out;
}

ScalarDiskField harmonic_extension(const BoundaryData& gamma, int nr, int nt) {
  ScalarDiskField f(nr, nt);
  auto jets = harmonic_jets(gamma, nr, nt);
  for (std::size_t k = 0; k < jets.size(); ++k) f.values()[k] = jets[k][0];
  f.trace() = gamma.resampled(nt).samples();
  return f;
}

ScalarDiskField phi0_field(int nr, int nt) {
  return ScalarDiskField::sample(nr, nt, [](double r, double) { return phi0(r); });
}

DeformationState solve_minimal_graph(const BoundaryData& gamma, double lambda, const SolverConfig& cfg) {
  cfg.validate();
  Problem P(gamma, lambda, cfg.nr, cfg.ntheta);
  DeformationState st;
  st.gamma = gamma.resampled(cfg.ntheta);
  st.lambda = lambda;

  Vec sigma = Vec::Zero(P.N);
  double kappa = 0.0;
  Eigen::SparseLU<SpCol, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  double first = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Vec h = P.hbar(sigma);
    const Vec F = h - kappa * P.phi;
    const double res = max_abs(F);
    st.residual_history.push_back(res);
    st.newton_iterations = it;
    st.residual_norm = res;
    if (it == 1) first = res;
    if (!std::isfinite(res) || res > 1e6 * std::max(first, 1.0)) break;
    if (res < cfg.newton_tol) {
      st.converged = true;
      break;
    }
    if (it == cfg.max_iter) break;
    const SpRow J = cfg.jacobian == JacobianMode::analytic ? P.analytic_jacobian(sigma)
                                                           : P.fd_jacobian(sigma, cfg.fd_step);
    const SpCol M = P.bordered(J);
    if (!analyzed) {
      lu.analyzePattern(M);
      analyzed = true;
    }
    lu.factorize(M);
    if (lu.info() != Eigen::Success) break;
    Vec rhs(P.N + 1);
    rhs.head(P.N) = -F;
    rhs[P.N] = -P.orthogonality(sigma);
    const Vec delta = lu.solve(rhs);
    sigma += delta.head(P.N);
    kappa += delta[P.N];
  }
  st.kappa = kappa;
  st.orthogonality = P.orthogonality(sigma) * (1.0 / cfg.nr) * (2.0 * std::numbers::pi / cfg.ntheta);
  st.obstructed = st.converged && std::abs(kappa) > cfg.kernel_tol;
  assemble_fields(P, gamma, sigma, st);
  return st;
}

JacobianCheck compare_jacobians(const BoundaryData& gamma, double lambda, const ScalarDiskField& sigma,
                                const SolverConfig& cfg) {
  cfg.validate();
  Problem P(gamma, lambda, cfg.nr, cfg.ntheta);
  Vec s = Eigen::Map<const Vec>(sigma.values().data(), P.N);
  const SpRow A = P.analytic_jacobian(s);
  const SpRow B = P.fd_jacobian(s, cfg.fd_step);
  const SpRow D = A - B;
  JacobianCheck c;
  for (int r = 0; r < D.outerSize(); ++r) {
    for (SpRow::InnerIterator it(D, r); it; ++it) c.max_abs_difference = std::max(c.max_abs_difference, std::abs(it.value()));
  }
  for (int r = 0; r < A.outerSize(); ++r) {
    for (SpRow::InnerIterator it(A, r); it; ++it) c.max_abs_entry = std::max(c.max_abs_entry, std::abs(it.value()));
  }
  return c;
}

double kappa_map(const BoundaryData& gamma, double lambda, const SolverConfig& cfg) {
  DeformationState st = solve_minimal_graph(gamma, lambda, cfg);
  if (!st.converged) throw std::runtime_error("kappa_map: solver did not converge");
  return st.kappa;
}

DeformationState make_symmetric_graph(int n, double epsilon, const SolverConfig& cfg) {
  if (n < 2) throw std::invalid_argument("make_symmetric_graph: n must be >= 2");
  if (!(epsilon > 0)) throw std::invalid_argument("make_symmetric_graph: epsilon must be > 0");
  if (cfg.ntheta % (4 * n) != 0) throw std::invalid_argument("make_symmetric_graph: Ntheta must be a multiple of 4n");
  BoundaryData gamma = BoundaryData::sine(cfg.ntheta, n, epsilon);
  DeformationState st = solve_minimal_graph(gamma, 0.0, cfg);
  if (!st.converged) return st;
  // Vertical translation along phi0 so that the surface passes through the origin.
  const double c = center_value(st.eta);
  if (c != 0.0) {
    st.lambda -= c;
    for (int i = 0; i < st.eta.nr(); ++i) {
      const double p = phi0(st.eta.r(i));
      for (int j = 0; j < st.eta.ntheta(); ++j) st.eta(i, j) -= c * p;
    }
    Problem P(st.gamma, st.lambda, cfg.nr, cfg.ntheta);
    Vec s = Eigen::Map<const Vec>(st.sigma.values().data(), P.N);
    st.residual_norm = max_abs(P.hbar(s) - st.kappa * P.phi);
  }
  return st;
}

DisjointReport disjoint_graph_domains(int n, double epsilon, const SolverConfig& cfg) {
  if (!(epsilon > 0)) throw std::invalid_argument("disjoint_graph_domains: epsilon must be > 0");
  DisjointReport rep;
  rep.n = n;
  rep.epsilon = epsilon;
  rep.state = make_symmetric_graph(n, epsilon, cfg);
  if (!rep.state.minimal()) return rep;
  const ScalarDiskField& eta = rep.state.eta;
  const int nt = eta.ntheta();
  const int per = nt / (2 * n);
  rep.all_certified = true;
  for (int k = 0; k < 2 * n; ++k) {
    SectorDomain d;
    d.k = k;
    d.theta_lo = k * std::numbers::pi / n;
    d.theta_hi = (k + 1) * std::numbers::pi / n;
    d.sign = k % 2 == 0 ? 1 : -1;
    d.min_margin = std::numeric_limits<double>::infinity();
    d.max_value = -std::numeric_limits<double>::infinity();
    for (int j = k * per + 1; j < (k + 1) * per; ++j) {
      for (int i = 0; i < eta.nr(); ++i) {
        const double v = d.sign * eta(i, j);
        d.min_margin = std::min(d.min_margin, v);
        d.max_value = std::max(d.max_value, v);
      }
      const double t = d.sign * eta.trace(j);
      d.min_margin = std::min(d.min_margin, t);
    }
    d.certified = d.min_margin > -1e-12 && d.max_value > 0.0;
    rep.all_certified = rep.all_certified && d.certified;
    rep.sectors.push_back(d);
    for (int i = 0; i < eta.nr(); ++i) rep.ray_max_abs = std::max(rep.ray_max_abs, std::abs(eta(i, k * per)));
  }
  return rep;
}

double rho_to_r(double rho) {
  if (rho <= 0.0) return 0.0;
  return rho / (2.0 + std::sqrt(4.0 + rho * rho));
}

TriMesh3 export_graph_mesh(const DeformationState& state, double rho_max, int resolution) {
  if (!(rho_max > 0) || resolution < 1) throw std::invalid_argument("export_graph_mesh: bad parameters");
  const ScalarDiskField& eta = state.eta;
  const int nt = eta.ntheta();
  const double rmax = rho_to_r(rho_max);
  TriMesh3 m;
  m.scalar.clear();
  const double c = center_value(eta);
  m.add_vertex({0.0, 0.0, c});
  for (int ring = 1; ring <= resolution; ++ring) {
    const double r = rmax * ring / resolution;
    for (int j = 0; j < nt; ++j) {
      const double th = eta.theta(j);
      const double e = interpolate(eta, r, th);
      const bool outer = ring == resolution;
      m.add_vertex(graph_chart(r, th, e), outer ? SegmentTag::ring : SegmentTag::none, outer);
    }
  }
  auto vid = [&](int ring, int j) { return 1 + (ring - 1) * nt + ((j % nt) + nt) % nt; };
  for (int j = 0; j < nt; ++j) m.triangles.push_back({0, vid(1, j), vid(1, j + 1)});
  for (int ring = 1; ring < resolution; ++ring) {
    for (int j = 0; j < nt; ++j) {
      m.triangles.push_back({vid(ring, j), vid(ring + 1, j), vid(ring + 1, j + 1)});
      m.triangles.push_back({vid(ring, j), vid(ring + 1, j + 1), vid(ring, j + 1)});
    }
  }
  m.scalar.assign(m.vertices.size(), 0.0);
  const BoundaryData g = state.gamma.resampled(nt);
  for (int j = 0; j < nt; ++j) m.scalar[vid(resolution, j)] = g.samples()[j];
  return m;
}

}  // namespace nil3
