#include "nil3/asymptotic_solver.hpp"
#include "nil3/disk_field.hpp"
#include "nil3/mesh.hpp"
#include "nil3/plateau.hpp"
#include "nil3/tower.hpp"
#include "nil3/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using nlohmann::ordered_json;
using namespace nil3;

namespace {

enum Exit { ok = 0, verify_failed = 1, config_error = 2, not_converged = 3, assembly_failed = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  int nr = 64;
  int ntheta = 256;
};

Grid parse_grid(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw ConfigError("--grid must look like NRxNT");
  try {
    std::size_t a = 0, b = 0;
    Grid g{std::stoi(s.substr(0, x), &a), std::stoi(s.substr(x + 1), &b)};
    if (a != x || b != s.size() - x - 1) throw ConfigError("--grid must look like NRxNT");
    if (g.nr < 5 || g.ntheta < 8) throw ConfigError("--grid too small");
    return g;
  } catch (const std::logic_error&) {
    throw ConfigError("--grid must look like NRxNT");
  }
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty list in ") + what);
  return out;
}

int round_up(int v, int m) { return (v + m - 1) / m * m; }

BoundaryData parse_gamma(const std::string& spec, int ntheta) {
  if (spec.rfind("sin:", 0) == 0) {
    auto c = spec.substr(4);
    const auto colon = c.find(':');
    if (colon == std::string::npos) throw ConfigError("gamma spec is sin:n:eps");
    std::vector<double> n = parse_list(c.substr(0, colon), "sin:n"), e = parse_list(c.substr(colon + 1), "sin:eps");
    if (n.size() != 1 || e.size() != 1 || n[0] < 1 || n[0] != std::floor(n[0]))
      throw ConfigError("gamma spec is sin:n:eps with integer n >= 1");
    return BoundaryData::sine(ntheta, static_cast<int>(n[0]), e[0]);
  }
  if (spec.rfind("fourier:", 0) == 0) return BoundaryData::fourier(ntheta, parse_list(spec.substr(8), "fourier"));
  std::ifstream in(spec);
  if (!in) throw ConfigError("gamma spec is sin:n:eps, fourier:c0,a1,b1,... or a readable CSV file");
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find_last_of(',');
    const std::string last = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(last, &used);
      samples.push_back(v);
    } catch (const std::logic_error&) {
      if (!samples.empty()) throw ConfigError("unparsable CSV line: " + line);
    }
  }
  if (samples.size() < 4) throw ConfigError("CSV trace needs at least 4 samples");
  return BoundaryData(samples).resampled(ntheta);
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

ordered_json check_json(const CheckResult& c) {
  ordered_json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["bound"] = c.bound == Bound::at_most ? "<=" : ">=";
  j["threshold"] = c.threshold;
  j["pass"] = c.pass;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

ordered_json state_json(const DeformationState& st) {
  ordered_json j;
  j["converged"] = st.converged;
  j["obstructed"] = st.obstructed;
  j["kappa"] = st.kappa;
  j["lambda"] = st.lambda;
  j["residual_norm"] = st.residual_norm;
  j["newton_iterations"] = st.newton_iterations;
  j["residual_history"] = st.residual_history;
  j["orthogonality"] = st.orthogonality;
  return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Common {
  std::string grid;
  double tol = 0.0;
  std::uint64_t seed = 1;
  bool reproducible = false;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_grid) {
  c.grid = default_grid;
  sub->add_option("--grid", c.grid, "Disk grid NRxNT")->capture_default_str();
  sub->add_option("--tol", c.tol, "Newton tolerance (graph, verify) or gradient tolerance (tower); 0 keeps the default")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "Seed for randomized checks")->capture_default_str();
  sub->add_flag("--reproducible", c.reproducible, "Omit timings so reports are byte-identical across runs");
}

int cmd_verify(const std::string& suite, const Common& c, double spu) {
  VerifyConfig vc;
  Grid g = parse_grid(c.grid);
  vc.nr = g.nr;
  vc.ntheta = g.ntheta;
  vc.seed = c.seed;
  vc.samples_per_unit = spu;
  if (c.tol > 0) vc.newton_tol = c.tol;
  try {
    vc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ordered_json rep;
  rep["command"] = "verify";
  rep["suite"] = suite;
  rep["config"] = {{"grid", c.grid}, {"newton_tol", vc.newton_tol}, {"seed", vc.seed},
                   {"samples", vc.samples}, {"samples_per_unit", vc.samples_per_unit}};
  std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  bool all = true;
  rep["suites"] = ordered_json::array();
  for (const std::string& name : names) {
    SuiteReport r = run_suite(name, vc);
    ordered_json s;
    s["suite"] = r.suite;
    s["passed"] = r.passed();
    if (!c.reproducible) s["seconds"] = r.seconds;
    for (const CheckResult& k : r.checks) s["checks"].push_back(check_json(k));
    rep["suites"].push_back(s);
    all = all && r.passed();
  }
  rep["passed"] = all;
  if (c.out.empty()) {
    std::cout << rep.dump(2) << "\n";
  } else {
    write_json(c.out, rep);
  }
  return all ? ok : verify_failed;
}

int cmd_graph(const std::string& gamma_spec, double lambda, const Common& c, double obj_rho, int obj_res) {
  Grid g = parse_grid(c.grid);
  SolverConfig sc;
  sc.nr = g.nr;
  sc.ntheta = g.ntheta;
  if (c.tol > 0) sc.newton_tol = c.tol;
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.out.empty()) throw ConfigError("--out is required");
  BoundaryData gamma = parse_gamma(gamma_spec, sc.ntheta);
  const auto t0 = std::chrono::steady_clock::now();
  DeformationState st = solve_minimal_graph(gamma, lambda, sc);
  ordered_json rep;
  rep["command"] = "graph";
  rep["gamma"] = gamma_spec;
  rep["grid"] = c.grid;
  rep["newton_tol"] = sc.newton_tol;
  rep["gamma_mean"] = gamma.mean();
  rep["state"] = state_json(st);
  FluxReport fr = vertical_flux(st.eta, 0.9);
  rep["flux"] = {{"radius", fr.radius}, {"integral_route", fr.integral_route}, {"limit_route", fr.limit_route},
                 {"difference", fr.difference}};
  rep["center_height"] = center_value(st.eta);
  if (!c.reproducible) rep["seconds"] = seconds_since(t0);
  write_field_csv(c.out + ".csv", st.eta);
  std::vector<std::string> files{c.out + ".csv", c.out + ".json"};
  if (obj_rho > 0 && st.converged) {
    write_obj(c.out + ".obj", export_graph_mesh(st, obj_rho, obj_res));
    files.push_back(c.out + ".obj");
  }
  rep["files"] = files;
  write_json(c.out + ".json", rep);
  std::cout << rep.dump(2) << "\n";
  if (st.obstructed) std::cerr << "obstructed: kappa = " << st.kappa << "\n";
  return st.minimal() ? ok : not_converged;
}

struct TowerArgs {
  int n = 2;
  double a = 1.0;
  double b = 4.0;
  std::string b_list;
  double eps = 0.05;
  int copies = 0;
  int periods = 1;
  double spu = 8.0;
  bool ply = false;
};

ordered_json mesh_stats(const TriMesh3& m) {
  return {{"vertices", m.num_vertices()}, {"triangles", m.num_triangles()}, {"area", mesh_area(m)}};
}

int cmd_tower(const TowerArgs& t, const Common& c) {
  if (t.n < 2) throw ConfigError("--n must be >= 2");
  if (!(t.a > 0)) throw ConfigError("--a must be positive");
  if (!(t.eps > 0)) throw ConfigError("--eps must be positive");
  if (t.periods < 1) throw ConfigError("--periods must be >= 1");
  if (!(t.spu >= 2)) throw ConfigError("--spu must be >= 2");
  const int copies = t.copies > 0 ? t.copies : 2 * t.n;
  if (copies > 2 * t.n) throw ConfigError("--copies must be at most 2n");
  std::vector<double> bs = t.b_list.empty() ? std::vector<double>{t.b} : parse_list(t.b_list, "--b-list");
  for (std::size_t k = 0; k < bs.size(); ++k) {
    if (!(bs[k] > 0)) throw ConfigError("b must be positive");
    if (k > 0 && !(bs[k] > bs[k - 1])) throw ConfigError("--b-list must be ascending");
  }
  if (bs.size() == 2) throw ConfigError("--b-list needs at least 3 values");
  if (c.out.empty()) throw ConfigError("--out is required");

  Grid g = parse_grid(c.grid);
  SolverConfig sc;
  sc.nr = g.nr;
  sc.ntheta = round_up(g.ntheta, 4 * t.n);
  MinimizeConfig mc;
  if (c.tol > 0) mc.grad_tol = c.tol;
  const auto t0 = std::chrono::steady_clock::now();

  ordered_json rep;
  rep["command"] = "tower";
  rep["n"] = t.n;
  rep["a"] = t.a;
  rep["b"] = bs;
  rep["eps"] = t.eps;
  rep["samples_per_unit"] = t.spu;
  rep["grid"] = std::to_string(sc.nr) + "x" + std::to_string(sc.ntheta);

  auto finish = [&](int code) {
    if (!c.reproducible) rep["seconds"] = seconds_since(t0);
    rep["exit_code"] = code;
    write_json(c.out + ".json", rep);
    std::cout << rep.dump(2) << "\n";
    return code;
  };

  DeformationState sn = make_symmetric_graph(t.n, t.eps, sc);
  rep["barrier_graph"] = state_json(sn);
  rep["barrier_graph"].erase("residual_history");
  if (!sn.minimal()) return finish(not_converged);

  TriMesh3 piece;
  if (bs.size() == 1) {
    MinimizeReport mr;
    piece = minimize_area(initial_spanning_mesh(build_contour(t.a, bs[0], t.n, t.spu)), mc, &mr);
    rep["plateau"] = {{"status", status_name(mr.status)}, {"iterations", mr.iterations},
                      {"newton_steps", mr.newton_steps}, {"flips", mr.flips}, {"initial_area", mr.initial_area},
                      {"final_area", mr.final_area}, {"max_gradient", mr.max_gradient}, {"monotone", mr.monotone}};
    if (!mr.converged()) return finish(not_converged);
  } else {
    ContinuationReport cr = continuation_in_b(t.a, t.n, bs, mc, t.spu);
    ordered_json steps = ordered_json::array();
    for (const ContinuationStep& s : cr.steps)
      steps.push_back({{"b", s.b}, {"area", s.area}, {"iterations", s.iterations}, {"triangles", s.triangles},
                       {"converged", s.converged}, {"max_gradient", s.max_gradient}});
    rep["continuation"] = {{"region_radius", cr.region_radius}, {"steps", steps}, {"deviations", cr.deviations},
                           {"decreasing", cr.decreasing}};
    for (const ContinuationStep& s : cr.steps)
      if (!s.converged) return finish(not_converged);
    piece = cr.meshes.back();
  }
  rep["piece"] = mesh_stats(piece);
  double zlo = 1e300, zhi = -1e300;
  for (const Nil3Point& p : piece.vertices) {
    zlo = std::min(zlo, p.x3);
    zhi = std::max(zhi, p.x3);
  }
  rep["piece"]["z_range"] = {zlo, zhi};
  std::vector<double> proxy = mean_curvature_proxy(piece);
  rep["piece"]["max_curvature_proxy"] = proxy.empty() ? 0.0 : *std::max_element(proxy.begin(), proxy.end());

  BarrierReport br = barrier_check(piece, sn, t.a, t.n);
  rep["barrier"] = {{"checked", br.checked}, {"skipped", br.skipped}, {"violations", br.violations},
                    {"worst_violation", br.worst_violation}, {"min_margin", br.min_margin}, {"tol", br.tol}};
  write_obj(c.out + "_piece.obj", piece);

  AssemblyReport ar;
  TriMesh3 tower;
  try {
    tower = assemble_saddle_tower(piece, t.n, t.a, copies, t.periods, &ar);
  } catch (const AssemblyError& e) {
    rep["assembly_error"] = {{"message", e.what()}, {"location", {e.location.x1, e.location.x2, e.location.x3}}};
    return finish(assembly_failed);
  }
  rep["assembly"] = {{"copies", ar.copies},
                     {"periods", ar.periods},
                     {"welded", ar.welded},
                     {"seam_error", ar.seam_error},
                     {"weld_gap", ar.weld_gap},
                     {"rotation_error", ar.rotation_error},
                     {"rotation_matched", ar.rotation_matched},
                     {"translation_error", ar.translation_error},
                     {"translation_matched", ar.translation_matched},
                     {"double_reflection_error", ar.double_reflection_error},
                     {"pinched", ar.pinched},
                     {"euler_characteristic", ar.euler_characteristic},
                     {"boundary_components", ar.boundary_components},
                     {"genus", ar.genus},
                     {"z_range", {ar.z_min, ar.z_max}}};
  rep["tower"] = mesh_stats(tower);
  const double bmax = bs.back();
  EndAsymptoticsReport er = end_asymptotics_report(tower, t.n, {bmax / 4, bmax / 2});
  ordered_json ends = ordered_json::array();
  for (const EndReport& e : er.ends) {
    ordered_json samples = ordered_json::array();
    for (const EndSample& s : e.samples) samples.push_back({{"rho", s.rho}, {"deviation", s.deviation}, {"count", s.count}});
    ends.push_back({{"k", e.k}, {"angle", e.angle}, {"samples", samples}, {"decreasing", e.decreasing}});
  }
  rep["ends"] = {{"all_decreasing", er.all_decreasing}, {"ends", ends}};

  write_obj(c.out + "_tower.obj", tower);
  std::vector<std::string> files{c.out + "_piece.obj", c.out + "_tower.obj"};
  if (t.ply) {
    TriMesh3 colored = tower;
    colored.scalar.resize(colored.num_vertices());
    for (std::size_t k = 0; k < colored.num_vertices(); ++k) colored.scalar[k] = colored.vertices[k].x3;
    write_ply(c.out + "_tower.ply", colored);
    files.push_back(c.out + "_tower.ply");
  }
  files.push_back(c.out + ".json");
  rep["files"] = files;
  return finish(ok);
}

int cmd_demo_disjoint(int n, double eps, const Common& c) {
  if (n < 2) throw ConfigError("--n must be >= 2");
  if (!(eps > 0)) throw ConfigError("--eps must be positive");
  Grid g = parse_grid(c.grid);
  SolverConfig sc;
  sc.nr = g.nr;
  sc.ntheta = round_up(g.ntheta, 4 * n);
  if (c.tol > 0) sc.newton_tol = c.tol;
  const auto t0 = std::chrono::steady_clock::now();
  DisjointReport dr = disjoint_graph_domains(n, eps, sc);
  ordered_json rep;
  rep["command"] = "demo-disjoint";
  rep["n"] = n;
  rep["eps"] = eps;
  rep["grid"] = std::to_string(sc.nr) + "x" + std::to_string(sc.ntheta);
  rep["state"] = state_json(dr.state);
  ordered_json sectors = ordered_json::array();
  for (const SectorDomain& s : dr.sectors)
    sectors.push_back({{"k", s.k}, {"theta_lo", s.theta_lo}, {"theta_hi", s.theta_hi}, {"sign", s.sign},
                       {"min_margin", s.min_margin}, {"max_value", s.max_value}, {"certified", s.certified}});
  rep["sectors"] = sectors;
  rep["ray_max_abs"] = dr.ray_max_abs;
  rep["all_certified"] = dr.all_certified;
  if (!c.reproducible) rep["seconds"] = seconds_since(t0);
  if (!c.out.empty()) write_json(c.out + ".json", rep);
  std::cout << rep.dump(2) << "\n";
  if (!dr.state.minimal()) return not_converged;
  return dr.all_certified ? ok : verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal graphs and saddle towers in Heisenberg space"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Common cv, cg, ct, cd;
  std::string suite = "all";
  double verify_spu = 4.0;
  auto* verify = app.add_subcommand("verify", "Run invariant suites, print a JSON report");
  verify->add_option("--suite", suite, "geometry, operator, solver, plateau or all")
      ->check(CLI::IsMember({"geometry", "operator", "solver", "plateau", "all"}))
      ->capture_default_str();
  verify->add_option("--spu", verify_spu, "Plateau contour samples per unit length")->capture_default_str();
  verify->add_option("--out", cv.out, "Write the report here instead of stdout");
  add_common(verify, cv, "32x128");

  std::string gamma;
  double lambda = 0.0, obj_rho = 0.0;
  int obj_res = 64;
  auto* graph = app.add_subcommand("graph", "Solve for a minimal graph with value at infinity gamma");
  graph->add_option("--gamma", gamma, "sin:n:eps | fourier:c0,a1,b1,... | trace CSV file")->required();
  graph->add_option("--lambda", lambda, "Kernel coefficient (vertical translation)")->capture_default_str();
  graph->add_option("--out", cg.out, "Output prefix: PREFIX.csv, PREFIX.json, PREFIX.obj")->required();
  graph->add_option("--obj-rho", obj_rho, "Also export the graph over rho <= R as OBJ (0 = off)");
  graph->add_option("--obj-res", obj_res, "Rings of the OBJ export")->capture_default_str();
  add_common(graph, cg, "64x256");

  TowerArgs ta;
  auto* tower = app.add_subcommand("tower", "Plateau solve, barrier check and saddle tower assembly");
  tower->add_option("--n", ta.n, "Number of end pairs")->capture_default_str();
  tower->add_option("--a", ta.a, "Half period")->capture_default_str();
  tower->add_option("--b", ta.b, "Contour radius")->capture_default_str();
  tower->add_option("--b-list", ta.b_list, "Ascending radii for continuation, e.g. 4,6,8");
  tower->add_option("--eps", ta.eps, "Amplitude of the barrier graph S_n")->capture_default_str();
  tower->add_option("--copies", ta.copies, "Rotational copies (default 2n)");
  tower->add_option("--periods", ta.periods, "Vertical periods")->capture_default_str();
  tower->add_option("--spu", ta.spu, "Contour samples per unit length")->capture_default_str();
  tower->add_flag("--ply", ta.ply, "Also write the assembly as PLY with height scalar");
  tower->add_option("--out", ct.out, "Output prefix")->required();
  add_common(tower, ct, "64x256");

  int dn = 2;
  double deps = 0.05;
  auto* demo = app.add_subcommand("demo-disjoint", "Sign-certified sector domains of S_n");
  demo->add_option("--n", dn, "Symmetry order")->capture_default_str();
  demo->add_option("--eps", deps, "Amplitude")->capture_default_str();
  demo->add_option("--out", cd.out, "Also write PREFIX.json");
  add_common(demo, cd, "64x256");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*verify) return cmd_verify(suite, cv, verify_spu);
    if (*graph) return cmd_graph(gamma, lambda, cg, obj_rho, obj_res);
    if (*tower) return cmd_tower(ta, ct);
    if (*demo) return cmd_demo_disjoint(dn, deps, cd);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return not_converged;
  }
  return config_error;
}
