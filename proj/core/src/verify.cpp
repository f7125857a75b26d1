#include "nil3/verify.hpp"

#include "nil3/asymptotic_solver.hpp"
#include "nil3/disk_field.hpp"
#include "nil3/plateau.hpp"
#include "nil3/tower.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace nil3 {

namespace {

constexpr double kPi = std::numbers::pi;

class Builder {
 public:
  explicit Builder(std::string suite) { rep_.suite = std::move(suite); }

  void at_most(const std::string& name, double value, double threshold, std::string detail = {}) {
    rep_.checks.push_back({name, value, threshold, Bound::at_most, value <= threshold, std::move(detail)});
  }
  void at_least(const std::string& name, double value, double threshold, std::string detail = {}) {
    rep_.checks.push_back({name, value, threshold, Bound::at_least, value >= threshold, std::move(detail)});
  }
  void flag(const std::string& name, bool ok, std::string detail = {}) {
    at_least(name, ok ? 1.0 : 0.0, 1.0, std::move(detail));
  }
  // Runs body; an exception becomes a failed check carrying the message.
  void guard(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rep_.checks.push_back({name, std::nan(""), 0.0, Bound::at_most, false, e.what()});
    }
  }
  SuiteReport finish(std::chrono::steady_clock::time_point t0) {
    rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(rep_);
  }

 private:
  SuiteReport rep_;
};

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os.precision(6);
  os << label << "=" << v;
  return os.str();
}

Vec3 geodesic_rhs_v(const Vec3& v) {
  Vec3 a = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a -= v[i] * v[j] * connection_canonical(i, j);
  return a;
}

Vec3 coords_of(const Vec3& x, const Vec3& v) { return from_frame({Nil3Point::from(x), v[0], v[1], v[2]}); }

template <class F>
auto d4(F&& f, double h) -> std::decay_t<decltype(f(h))> {
  return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h);
}

double rel(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

ScalarDiskField polynomial_field(int nr, int nt, const std::array<double, 10>& c) {
  return ScalarDiskField::sample(nr, nt, [&](double r, double th) {
    const double x = r * std::cos(th), y = r * std::sin(th);
    return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
           c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
  });
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void VerifyConfig::validate() const {
  if (nr < 8 || nr % 2 != 0) throw std::invalid_argument("verify: nr must be even and >= 8");
  if (ntheta < 16 || ntheta % 8 != 0) throw std::invalid_argument("verify: ntheta must be a multiple of 8, >= 16");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("verify: tolerance must be positive");
  if (samples < 1) throw std::invalid_argument("verify: samples must be positive");
  if (!(samples_per_unit >= 2.0)) throw std::invalid_argument("verify: samples_per_unit must be >= 2");
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"geometry", "operator", "solver", "plateau"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyConfig& config) {
  config.validate();
  if (name == "geometry") return verify_geometry(config);
  if (name == "operator") return verify_operator(config);
  if (name == "solver") return verify_solver(config);
  if (name == "plateau") return verify_plateau(config);
  throw std::invalid_argument("unknown suite: " + name);
}

Nil3Point integrate_geodesic(const Nil3Point& p0, const Vec3& v0, double t, int steps) {
  if (steps < 1) throw std::invalid_argument("integrate_geodesic: steps must be positive");
  const double h = t / steps;
  Vec3 x = p0.vec(), v = v0;
  for (int s = 0; s < steps; ++s) {
    const Vec3 kx1 = coords_of(x, v), kv1 = geodesic_rhs_v(v);
    const Vec3 x2 = x + 0.5 * h * kx1, v2 = v + 0.5 * h * kv1;
    const Vec3 kx2 = coords_of(x2, v2), kv2 = geodesic_rhs_v(v2);
    const Vec3 x3 = x + 0.5 * h * kx2, v3 = v + 0.5 * h * kv2;
    const Vec3 kx3 = coords_of(x3, v3), kv3 = geodesic_rhs_v(v3);
    const Vec3 x4 = x + h * kx3, v4 = v + h * kv3;
    const Vec3 kx4 = coords_of(x4, v4), kv4 = geodesic_rhs_v(v4);
    x += h / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    v += h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
  }
  return Nil3Point::from(x);
}

double extrinsic_mean_curvature(const DiskJet2& jet, double h) {
  auto X = [&](double dr, double dt) {
    const double e = jet.eta + jet.eta1 * dr + jet.eta2 * dt + 0.5 * jet.eta11 * dr * dr + jet.eta12 * dr * dt +
                     0.5 * jet.eta22 * dt * dt;
    return graph_chart(jet.r + dr, jet.theta + dt, e).vec();
  };
  // Frame components of the coordinate tangent X_k at offset (dr, dt).
  auto V = [&](int k, double dr, double dt) -> Vec3 {
    Vec3 c = k == 0 ? Vec3(d4([&](double s) { return X(dr + s, dt); }, h))
                    : Vec3(d4([&](double s) { return X(dr, dt + s); }, h));
    return frame_matrix(Nil3Point::from(X(dr, dt))) * c;
  };
  std::array<Vec3, 2> T{V(0, 0, 0), V(1, 0, 0)};
  Vec3 N = T[0].cross(T[1]).normalized();
  double g[2][2], b[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      g[i][j] = T[i].dot(T[j]);
      Vec3 dv = i == 0 ? Vec3(d4([&](double s) { return V(j, s, 0); }, h))
                       : Vec3(d4([&](double s) { return V(j, 0, s); }, h));
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) dv += T[i][p] * T[j][q] * connection_canonical(p, q);
      b[i][j] = dv.dot(N);
    }
  }
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return 0.5 * (g[1][1] * b[0][0] - g[0][1] * (b[0][1] + b[1][0]) + g[0][0] * b[1][1]) / det;
}

SuiteReport verify_geometry(const VerifyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Builder out("geometry");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto point = [&](double s) { return Nil3Point{s * U(rng), s * U(rng), s * U(rng)}; };
  auto vec = [&] { return Vec3(U(rng), U(rng), U(rng)); };

  out.guard("group_law", [&] {
    double assoc = 0.0, inv = 0.0;
    for (int k = 0; k < cfg.samples; ++k) {
      Nil3Point p = point(5), q = point(5), s = point(5);
      assoc = std::max(assoc, (group_mul(group_mul(p, q), s).vec() - group_mul(p, group_mul(q, s)).vec()).norm());
      inv = std::max(inv, group_mul(p, group_inv(p)).vec().norm() + group_mul(group_inv(p), p).vec().norm());
    }
    out.at_most("group_associativity", assoc, 1e-12);
    out.at_most("group_inverse_exact", inv, 0.0);
  });

  out.guard("frames", [&] {
    double round = 0.0, left = 0.0;
    for (int k = 0; k < cfg.samples; ++k) {
      Nil3Point p = point(5), g = point(5);
      Vec3 a = vec(), b = vec();
      round = std::max(round, (from_frame(to_frame(p, a)) - a).norm() / a.norm());
      Mat3 J = Mat3::Identity();
      J(2, 0) = -0.5 * g.x2;
      J(2, 1) = 0.5 * g.x1;
      const double m0 = metric_at(p, a, b), m1 = metric_at(group_mul(g, p), J * a, J * b);
      left = std::max(left, std::abs(m1 - m0) / std::max(1.0, std::abs(m0)));
    }
    out.at_most("frame_roundtrip", round, 1e-14);
    out.at_most("left_invariance", left, 1e-12);
  });

  out.guard("geodesics", [&] {
    double ode = 0.0, speed = 0.0, vel = 0.0;
    std::uniform_real_distribution<double> A(0.0, 2 * kPi), T(-10.0, 10.0);
    for (int k = 0; k < cfg.samples; ++k) {
      Nil3Point p0 = point(2);
      GeodesicParams gp = GeodesicParams::from_direction(A(rng), U(rng));
      const double t = T(rng);
      Vec3 v0(gp.R * std::cos(gp.phi), gp.R * std::sin(gp.phi), gp.gamma);
      const int steps = static_cast<int>(std::ceil(std::abs(t) / 2e-3)) + 1;
      ode = std::max(ode, (integrate_geodesic(p0, v0, t, steps).vec() - geodesic_point(p0, gp, t).vec()).norm());
      Vec3 fd = d4([&](double s) { return geodesic_point(p0, gp, t + s).vec(); }, 1e-3);
      Nil3Point x = geodesic_point(p0, gp, t);
      speed = std::max(speed, std::abs(std::sqrt(metric_at(x, fd, fd)) - 1.0));
      vel = std::max(vel, (from_frame(geodesic_velocity(p0, gp, t)) - fd).norm());
    }
    out.at_most("geodesic_ode_max_error", ode, 1e-8);
    out.at_most("geodesic_unit_speed", speed, 1e-8);
    out.at_most("geodesic_velocity_fd", vel, 1e-8);
  });

  out.guard("equidistant", [&] {
    double err = 0.0;
    std::uniform_real_distribution<double> Rh(0.0, 5.0), A(0.0, 2 * kPi), T(-5.0, 5.0);
    for (int k = 0; k < cfg.samples; ++k) {
      const double rho = Rh(rng), th = A(rng), t = T(rng);
      GeodesicParams gp = GeodesicParams::from_direction(th + kPi / 2, 2.0 / std::sqrt(4.0 + rho * rho));
      Nil3Point g = geodesic_point(from_cylindrical(rho, th, 0.0), gp, t);
      err = std::max(err, (equidistant_point(rho, th, t).vec() - g.vec()).norm());
    }
    out.at_most("equidistant_vs_normal_geodesic", err, 1e-10);
  });

  out.guard("isometries", [&] {
    double metric = 0.0, geo = 0.0, invol = 0.0, fixed = 0.0;
    std::uniform_real_distribution<double> A(0.0, 2 * kPi), T(-3.0, 3.0);
    for (int k = 0; k < cfg.samples; ++k) {
      IsometryElement es[] = {IsometryElement::rotation(A(rng)), IsometryElement::vertical_translation(T(rng)),
                              IsometryElement::reflection(A(rng), T(rng)),
                              IsometryElement::left_translation(point(3))};
      for (const IsometryElement& e : es) {
        Nil3Point p = point(3);
        Vec3 a = vec(), b = vec();
        const double m0 = metric_at(p, a, b);
        metric = std::max(metric, std::abs(metric_at(apply_isometry(e, p), push_forward(e, a), push_forward(e, b)) -
                                           m0) / std::max(1.0, std::abs(m0)));
        GeodesicParams gp = GeodesicParams::from_direction(A(rng), U(rng));
        TangentVector v = geodesic_velocity(p, gp, 0.0);
        Nil3Point q = apply_isometry(e, p);
        TangentVector w = to_frame(q, push_forward(e, from_frame(v)));
        GeodesicParams gq{std::hypot(w.v1, w.v2), std::atan2(w.v2, w.v1), w.v3};
        for (double t : {-4.0, -1.0, 2.5, 6.0}) {
          geo = std::max(geo, (apply_isometry(e, geodesic_point(p, gp, t)).vec() - geodesic_point(q, gq, t).vec()).norm());
        }
      }
      IsometryElement r = IsometryElement::reflection(A(rng), T(rng));
      Nil3Point p = point(3);
      invol = std::max(invol, (apply_isometry(r, apply_isometry(r, p)).vec() - p.vec()).norm());
      const double s = 3.0 * U(rng);
      Nil3Point on{s * std::cos(r.beta), s * std::sin(r.beta), r.u};
      fixed = std::max(fixed, (apply_isometry(r, on).vec() - on.vec()).norm());
    }
    out.at_most("isometry_metric", metric, 1e-12);
    out.at_most("isometry_maps_geodesics", geo, 1e-8);
    out.at_most("reflection_involution", invol, 1e-13);
    out.at_most("reflection_fixes_axis_geodesic", fixed, 1e-13);

    double dbl = 0.0;
    for (int n : {2, 3, 5}) {
      const double a = 0.5 + 0.5 * n;
      IsometryElement r0 = IsometryElement::reflection_k(0, n, 0.0), ra = IsometryElement::reflection_k(0, n, a);
      for (int k = 0; k < 10; ++k) {
        Nil3Point p = point(3);
        Vec3 d = apply_isometry(ra, apply_isometry(r0, p)).vec() - p.vec() - Vec3(0, 0, 2 * a);
        dbl = std::max(dbl, d.norm());
      }
    }
    out.at_most("double_reflection_translation", dbl, 1e-12);
  });

  out.guard("connection", [&] {
    double tors = 0.0;
    auto field = [](CylFrame f) {
      return [f](const Vec3& x) {
        Vec3 c = Vec3::Zero();
        c[static_cast<int>(f)] = 1.0;
        return from_frame(from_cylindrical_components(Nil3Point::from(x), c));
      };
    };
    const std::pair<CylFrame, CylFrame> pairs[] = {
        {CylFrame::rho, CylFrame::theta}, {CylFrame::rho, CylFrame::vertical}, {CylFrame::theta, CylFrame::vertical}};
    std::uniform_real_distribution<double> Rh(0.3, 3.0), A(0.0, 2 * kPi);
    for (int k = 0; k < cfg.samples; ++k) {
      Nil3Point p = from_cylindrical(Rh(rng), A(rng), 2.0 * U(rng));
      for (auto [i, j] : pairs) {
        auto X = field(i), Y = field(j);
        const Vec3 x = p.vec(), xv = X(x), yv = Y(x);
        Vec3 DYX = d4([&](double s) { return Y(x + s * xv); }, 1e-3);
        Vec3 DXY = d4([&](double s) { return X(x + s * yv); }, 1e-3);
        Vec3 br = to_frame(p, DYX - DXY).vec();
        Vec3 nab = connection_coefficient(i, j, p).vec() - connection_coefficient(j, i, p).vec();
        tors = std::max(tors, (br - nab).norm());
      }
    }
    out.at_most("torsion_free_fd_bracket", tors, 1e-6);
  });

  return out.finish(t0);
}

SuiteReport verify_operator(const VerifyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Builder out("operator");
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  out.guard("minimality", [&] {
    double zero = 0.0, trans = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double r = 0.05 + (0.999 - 0.05) * i / 49.0;
      for (int j = 0; j < 50; ++j) {
        const double th = 2 * kPi * j / 50.0;
        for (int l = 0; l < 5; ++l) {
          const double lam = -1.0 + 0.5 * l;
          zero = std::max(zero, std::abs(compactified_H(DiskJet2{r, th})));
          trans = std::max(trans, std::abs(compactified_H(phi0_jet(r, th, lam))));
        }
      }
    }
    out.at_most("H_zero_jet", zero, 1e-11);
    out.at_most("H_lambda_phi0_jet", trans, 1e-11);
  });

  out.guard("structure", [&] {
    std::uniform_real_distribution<double> R(0.05, 0.999), A(0.0, 2 * kPi);
    double route = 0.0;
    for (int k = 0; k < 1000; ++k) {
      DiskJet2 j{R(rng), A(rng), U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
      route = std::max(route, rel(compactified_H(j), compactified_H_direct(j), 1e-12));
    }
    out.at_most("route_equivalence", route, 1e-9);

    double abnd = 0.0, det = 0.0, bzero = 0.0, coer = 1e300;
    for (int k = 0; k < 200; ++k) {
      const double eta = 2.0 * U(rng);
      CoefficientMatrix A1 = coefficient_matrix(DiskJet2{1.0, A(rng), eta});
      abnd = std::max({abnd, std::abs(A1.A11 - 1.0), std::abs(A1.A12 - eta / 2), std::abs(A1.A22 - (1 + eta * eta / 4))});
      det = std::max(det, std::abs(A1.det() - 1.0));
      const double r = 0.9 + 0.1 * (U(rng) + 1.0) / 2.0;
      CoefficientMatrix Ab = coefficient_matrix(DiskJet2{r, A(rng), U(rng), U(rng), U(rng)});
      coer = std::min(coer, Ab.min_eigenvalue());
    }
    for (int i = 1; i <= 100; ++i) bzero = std::max(bzero, std::abs(coefficient_matrix(DiskJet2{i / 100.0, 0.3}).B));
    out.at_most("A_boundary_values", abnd, 1e-14);
    out.at_most("A_boundary_det", det, 1e-14);
    out.at_most("B_zero_jet", bzero, 1e-12);
    out.at_least("A_coercivity_band", coer, 0.1);
  });

  out.guard("normal", [&] {
    std::uniform_real_distribution<double> R(0.05, 0.99), A(0.0, 2 * kPi);
    double unit = 0.0, orth = 0.0;
    for (int k = 0; k < 1000; ++k) {
      DiskJet2 j{R(rng), A(rng), U(rng), U(rng), U(rng)};
      MetricData m = first_fundamental_form(j);
      ChartFrame f = chart_frame(j);
      Vec3 X1(f.a, 0, f.b), X2(0, f.c, f.d);
      unit = std::max(unit, std::abs(m.normal.norm() - 1.0));
      orth = std::max({orth, std::abs(m.normal.dot(X1)) / X1.norm(), std::abs(m.normal.dot(X2)) / X2.norm()});
    }
    out.at_most("normal_unit", unit, 1e-12);
    out.at_most("normal_orthogonal", orth, 1e-10);
  });

  out.guard("extrinsic", [&] {
    std::uniform_real_distribution<double> R(0.1, 0.9), A(0.0, 2 * kPi);
    double err = 0.0;
    for (int k = 0; k < cfg.samples; ++k) {
      DiskJet2 j{R(rng), A(rng), U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
      err = std::max(err, std::abs(mean_curvature(j) - extrinsic_mean_curvature(j)));
    }
    out.at_most("mean_curvature_vs_fd_extrinsic", err, 1e-5);
  });

  const int nr = cfg.nr, nt = cfg.ntheta;
  out.guard("jacobi", [&] {
    const double fine = jacobi_apply(phi0_field(nr, nt)).max_abs();
    const double coarse = jacobi_apply(phi0_field(nr / 2, nt / 2)).max_abs();
    out.at_most("jacobi_phi0_residual", fine, 5e-4, fmt("grid_nr", nr));
    out.at_least("jacobi_phi0_order", std::log2(coarse / fine), 1.8);

    ScalarDiskField c = ScalarDiskField::sample(nr, nt, [](double, double) { return 0.7; });
    ScalarDiskField Lc = jacobi_apply(c);
    double cerr = 0.0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const double p = 1 + c.r(i) * c.r(i);
        cerr = std::max(cerr, std::abs(Lc(i, j) - 8 * 0.7 / (p * p)));
      }
    out.at_most("jacobi_constant", cerr, 1e-10);

    std::array<double, 10> co{};
    for (double& x : co) x = U(rng);
    co[0] = 0.0;
    for (double& x : co) x *= 0.3;
    ScalarDiskField f = polynomial_field(nr, nt, co);
    const double t = 1e-5;
    ScalarDiskField zero(nr, nt);
    ScalarDiskField fd = (1.0 / t) * (compactified_H_field(t * f) - compactified_H_field(zero));
    double ferr = 0.0;
    const ScalarDiskField L = jacobi_apply(f);
    for (std::size_t k = 0; k < L.size(); ++k) ferr = std::max(ferr, std::abs(fd.values()[k] - L.values()[k]));
    out.at_most("jacobi_frechet_fd", ferr, 1e-4);
  });

  out.guard("green", [&] {
    ScalarDiskField one = ScalarDiskField::sample(nr, nt, [](double, double) { return 1.0; });
    GreenTerms g = green_terms(phi0_field(nr, nt), one);
    out.at_most("green_boundary_2pi", std::abs(g.boundary - 2 * kPi), 2e-2, fmt("boundary", g.boundary));
    out.at_most("green_phi0_one_residual", std::abs(g.residual), 2e-2);

    std::array<double, 10> cu{}, cv{};
    for (double& x : cu) x = U(rng);
    for (double& x : cv) x = U(rng);
    auto res = [&](int a, int b) {
      return std::abs(green_residual(polynomial_field(a, b, cu), polynomial_field(a, b, cv)));
    };
    const double rf = res(nr, nt), rc = res(nr / 2, nt / 2);
    out.at_most("green_residual_random", rf, 1e-2);
    // Order is only meaningful above rounding.
    const double order = rc > 1e-11 ? std::log2(rc / rf) : 2.0;
    out.at_least("green_residual_order", order, 1.8, fmt("coarse", rc));

    ScalarDiskField u = polynomial_field(nr, nt, cu);
    out.at_most("green_antisymmetry", std::abs(green_residual(u, u)), 0.0);
  });

  out.guard("flux", [&] {
    const double c = 0.3;
    ScalarDiskField f = ScalarDiskField::sample(nr, nt, [&](double r, double) { return c * (1 + 0.5 * r * r) / 1.5; });
    FluxReport fr = vertical_flux(f, 0.95);
    out.at_most("flux_limit_constant", std::abs(fr.limit_route - 2 * kPi * c), 1e-12);
    ScalarDiskField s = ScalarDiskField::sample(nr, nt, [](double r, double th) { return (2 * r * r - r * r * r * r) * std::sin(2 * th); });
    out.at_most("flux_zero_mean", std::abs(vertical_flux(s, 0.95).limit_route), 1e-12);
    AsymptoticDistanceReport ad = asymptotic_distance(s);
    out.at_most("asymptotic_distance", ad.max_deviation, 1e-2);
  });

  return out.finish(t0);
}

SuiteReport verify_solver(const VerifyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Builder out("solver");
  SolverConfig sc;
  sc.nr = cfg.nr;
  sc.ntheta = cfg.ntheta;
  sc.newton_tol = cfg.newton_tol;
  const int nt = cfg.ntheta;

  out.guard("symmetric", [&] {
    for (int n : {2, 4}) {
      if (nt % (4 * n) != 0) continue;
      const std::string tag = "S" + std::to_string(n) + "_";
      DeformationState st = make_symmetric_graph(n, 0.05, sc);
      out.flag(tag + "converged", st.minimal());
      out.at_most(tag + "newton_iterations", st.newton_iterations, 10);
      out.at_most(tag + "residual", st.residual_norm, 1e-8);
      out.at_most(tag + "kappa", std::abs(st.kappa), 1e-7);
      out.at_most(tag + "flux", std::abs(vertical_flux(st.eta, 0.9).integral_route), 1e-6);
      const ScalarDiskField& e = st.eta;
      double odd = 0.0, rot = 0.0, neg = 0.0;
      for (int i = 0; i < e.nr(); ++i)
        for (int j = 0; j < nt; ++j) {
          odd = std::max(odd, std::abs(e(i, j) + e(i, (nt - j) % nt)));
          rot = std::max(rot, std::abs(e(i, j) - e(i, (j + nt / n) % nt)));
          if (j <= nt / (2 * n)) neg = std::max(neg, -e(i, j));
        }
      out.at_most(tag + "odd_symmetry", odd, 1e-8);
      out.at_most(tag + "rotation_symmetry", rot, 1e-8);
      out.at_most(tag + "sector_negativity", neg, 1e-8);
    }
  });

  out.guard("obstruction", [&] {
    DeformationState fine = solve_minimal_graph(BoundaryData::fourier(nt, {0.1}), 0.0, sc);
    SolverConfig half = sc;
    half.nr /= 2;
    half.ntheta /= 2;
    DeformationState coarse = solve_minimal_graph(BoundaryData::fourier(half.ntheta, {0.1}), 0.0, half);
    out.flag("constant_obstructed", fine.obstructed && coarse.obstructed);
    out.at_least("constant_kappa", std::abs(fine.kappa), 1e-3, fmt("kappa", fine.kappa));
    out.at_most("constant_kappa_refinement", rel(coarse.kappa, fine.kappa), 0.05);

    const double t = 1e-6;
    const double d1 = kappa_map(BoundaryData::fourier(nt, {t}), 0.0, sc) / t;
    const double expect = 2.0 / (3.0 - 4.0 * std::log(2.0));
    out.at_most("kappa_derivative_constant", rel(d1, expect), 1e-2, fmt("D1kappa", d1));
    out.at_most("kappa_zero_datum", std::abs(kappa_map(BoundaryData(std::vector<double>(nt, 0.0)), 0.4, sc)),
                1e-10);
  });

  out.guard("translation", [&] {
    BoundaryData g = BoundaryData::sine(nt, 2, 0.05);
    DeformationState s0 = solve_minimal_graph(g, 0.0, sc);
    DeformationState s1 = solve_minimal_graph(g, 0.2, sc);
    ScalarDiskField d = s1.eta - s0.eta - 0.2 * phi0_field(cfg.nr, nt);
    out.at_most("translation_equivariance", d.max_abs(), 1e-6);
  });

  out.guard("jacobian", [&] {
    BoundaryData g = BoundaryData::sine(nt, 3, 0.05);
    ScalarDiskField sigma = ScalarDiskField::sample(cfg.nr, nt, [](double r, double th) {
      return 0.02 * (1 - r * r) * std::cos(th) * r;
    });
    for (double& t : sigma.trace()) t = 0.0;
    JacobianCheck jc = compare_jacobians(g, 0.1, sigma, sc);
    out.at_most("jacobian_analytic_vs_fd", jc.max_abs_difference / jc.max_abs_entry, 1e-5);
  });

  return out.finish(t0);
}

SuiteReport verify_plateau(const VerifyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Builder out("plateau");
  std::mt19937_64 rng(cfg.seed + 3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto point = [&](double s) { return Nil3Point{s * U(rng), s * U(rng), s * U(rng)}; };

  out.guard("triangle", [&] {
    double gerr = 0.0, herr = 0.0, inv = 0.0;
    std::uniform_real_distribution<double> A(0.0, 2 * kPi);
    for (int k = 0; k < cfg.samples; ++k) {
      std::array<Nil3Point, 3> v{point(2), point(2), point(2)};
      AreaGradient ag = triangle_area_gradient(v[0], v[1], v[2]);
      std::array<double, 81> H = triangle_area_hessian(v[0], v[1], v[2]);
      const double h = 1e-6;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          auto shifted = [&](double s) {
            std::array<Nil3Point, 3> w = v;
            Vec3 x = w[a].vec();
            x[c] += s;
            w[a] = Nil3Point::from(x);
            return w;
          };
          auto wp = shifted(h), wm = shifted(-h);
          const double fd = (triangle_area(wp[0], wp[1], wp[2]) - triangle_area(wm[0], wm[1], wm[2])) / (2 * h);
          gerr = std::max(gerr, std::abs(fd - ag.grad[a][c]) / std::max(1.0, ag.area));
          AreaGradient gp = triangle_area_gradient(wp[0], wp[1], wp[2]);
          AreaGradient gm = triangle_area_gradient(wm[0], wm[1], wm[2]);
          for (int b = 0; b < 3; ++b)
            for (int d = 0; d < 3; ++d) {
              const double hd = (gp.grad[b][d] - gm.grad[b][d]) / (2 * h);
              herr = std::max(herr, std::abs(hd - H[(3 * a + c) * 9 + 3 * b + d]) / std::max(1.0, ag.area));
            }
        }
      IsometryElement es[] = {IsometryElement::rotation(A(rng)), IsometryElement::vertical_translation(U(rng)),
                              IsometryElement::reflection(A(rng), U(rng)),
                              IsometryElement::left_translation(point(3))};
      for (const IsometryElement& e : es) {
        const double moved = triangle_area(apply_isometry(e, v[0]), apply_isometry(e, v[1]), apply_isometry(e, v[2]));
        inv = std::max(inv, rel(moved, ag.area));
      }
    }
    out.at_most("area_gradient_fd", gerr, 1e-6);
    out.at_most("area_hessian_fd", herr, 1e-5);
    out.at_most("area_isometry_invariance", inv, 1e-12);
  });

  const double a = 1.0, b = 4.0, spu = cfg.samples_per_unit;
  const int n = 2;
  TriMesh3 piece;
  MinimizeConfig mc;
  out.guard("minimize", [&] {
    JordanContour contour = build_contour(a, b, n, spu);
    TriMesh3 init = initial_spanning_mesh(contour);
    MinimizeReport rep;
    piece = minimize_area(init, mc, &rep);
    out.flag("minimize_converged", rep.converged(), status_name(rep.status));
    out.at_most("minimize_max_gradient", rep.max_gradient, mc.grad_tol);
    out.flag("area_monotone", rep.monotone);
    double zlo = 1e300, zhi = -1e300;
    for (const Nil3Point& p : piece.vertices) {
      zlo = std::min(zlo, p.x3);
      zhi = std::max(zhi, p.x3);
    }
    out.at_most("slab_violation", std::max(-zlo, zhi - a), 1e-6);
    std::vector<double> proxy = mean_curvature_proxy(piece);
    out.at_most("mean_curvature_proxy", proxy.empty() ? 0.0 : *std::max_element(proxy.begin(), proxy.end()), 1e-3);

    SolverConfig sc;
    sc.nr = cfg.nr;
    sc.ntheta = cfg.ntheta;
    sc.newton_tol = cfg.newton_tol;
    DeformationState s2 = make_symmetric_graph(n, 0.05, sc);
    BarrierReport br = barrier_check(piece, s2, a, n);
    out.at_most("barrier_violations", static_cast<double>(br.violations), 0.0, fmt("margin", br.min_margin));

    // Minimizing a transported contour equals transporting the minimizer.
    AffineMap iso = as_affine(IsometryElement::rotation(0.7)).then(as_affine(IsometryElement::vertical_translation(0.3)));
    TriMesh3 moved = init;
    for (Nil3Point& p : moved.vertices) p = iso(p);
    TriMesh3 solved = minimize_area(moved, mc);
    double eq = 0.0;
    if (solved.num_vertices() != piece.num_vertices()) {
      eq = 1e300;
    } else {
      for (std::size_t k = 0; k < piece.num_vertices(); ++k)
        eq = std::max(eq, (iso(piece.vertices[k]).vec() - solved.vertices[k].vec()).norm());
    }
    out.at_most("isometry_equivariance", eq, 1e-6);
  });

  out.guard("tower", [&] {
    if (piece.num_vertices() == 0) throw std::runtime_error("no fundamental piece");
    AssemblyReport ar;
    TriMesh3 tower = assemble_saddle_tower(piece, n, a, 2 * n, 1, &ar);
    out.at_most("seam_error", ar.seam_error, 1e-9);
    out.at_most("rotation_invariance", ar.rotation_error, 1e-9, fmt("matched", ar.rotation_matched));
    out.at_most("translation_invariance", ar.translation_error, 1e-9, fmt("matched", ar.translation_matched));
    out.at_most("double_reflection", ar.double_reflection_error, 1e-10);
    out.flag("genus_zero", ar.genus == 0, fmt("chi", ar.euler_characteristic));
    out.at_most("vertical_extent", std::abs((ar.z_max - ar.z_min) - 2 * a), 1e-9);
    EndAsymptoticsReport er = end_asymptotics_report(tower, n, {b / 4, b / 2});
    out.flag("end_count", static_cast<int>(er.ends.size()) == 2 * n);
    out.flag("ends_decreasing", er.all_decreasing);
  });

  out.guard("continuation", [&] {
    ContinuationReport cr = continuation_in_b(a, n, {4.0, 6.0, 8.0}, mc, spu);
    bool conv = std::all_of(cr.steps.begin(), cr.steps.end(), [](const ContinuationStep& s) { return s.converged; });
    out.flag("continuation_converged", conv);
    out.flag("continuation_decreasing", cr.decreasing,
             cr.deviations.empty() ? std::string() : fmt("last", cr.deviations.back()));
  });

  return out.finish(t0);
}

}  // namespace nil3
