#include "ma/config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <thread>

namespace ma {

using nlohmann::json;

namespace {

Vec parse_vec(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

ConvexDomain parse_domain(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "disk")
    return ConvexDomain::disk(parse_vec(j.at("center")),
                              j.at("radius").get<double>());
  if (kind == "ellipse")
    return ConvexDomain::ellipse(parse_vec(j.at("center")),
                                 parse_vec(j.at("semi-axes")));
  if (kind == "polygon") {
    std::vector<Eigen::Vector2d> verts;
    for (const auto& v : j.at("vertices"))
      verts.emplace_back(v[0].get<double>(), v[1].get<double>());
    return ConvexDomain::polygon(std::move(verts));
  }
  throw ConfigError("unknown domain kind: " + kind);
}

RhsSpec parse_rhs(const json& j, int n) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "envelope")
    return RhsSpec::envelope(n, j.value("A", 1.0), j.value("alpha", 0.0),
                             j.at("beta").get<double>(), j.value("gamma", 0.0));
  if (kind == "hilbert") return RhsSpec::hilbert(n);
  if (kind == "minkowski") {
    const double gc = j.value("g-const", 1.0);
    return RhsSpec::minkowski(
        n, [gc](const Vec&) { return gc; }, gc, j.at("alpha").get<double>());
  }
  if (kind == "gauss-curvature") {
    const double gc = j.value("g-const", 1.0);
    return RhsSpec::gauss_curvature(
        n, [gc](const Vec&) { return gc; }, gc, j.value("gamma", 0.0));
  }
  if (kind == "manufactured") {
    const std::string which = j.value("case", "exp-disk");
    if (which != "exp-disk")
      throw ConfigError("unknown manufactured case: " + which);
    // f = exp(z - u*) with u* = (|x|^2 - 1)/2: the exact solution on the
    // unit disk is u*, since f(x, u*, .) = 1 = det D^2 u*.
    return RhsSpec::manufactured(
        n, [](const Vec&) { return 1.0; },
        [](const Vec& x) { return 0.5 * (x.squaredNorm() - 1.0); });
  }
  throw ConfigError("unknown rhs kind: " + kind);
}

SolveConfig parse_solver(const json& j) {
  SolveConfig c;
  const std::string scheme = j.value("scheme", "euler");
  if (scheme == "euler")
    c.scheme = Scheme::Euler;
  else if (scheme == "newton-after-euler")
    c.scheme = Scheme::NewtonAfterEuler;
  else
    throw ConfigError("unknown scheme: " + scheme);
  c.h = j.value("h", c.h);
  c.stencil_width = j.value("stencil-width", c.stencil_width);
  c.dt = j.value("dt", c.dt);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.max_iterations = j.value("max-iterations", c.max_iterations);
  c.zeta0 = j.value("zeta0", c.zeta0);
  c.zeta_min = j.value("zeta-min", c.zeta_min);
  c.boundary_points = j.value("boundary-points", c.boundary_points);
  if (c.tolerance <= 0.0) throw ConfigError("tolerance must be positive");
  if (c.max_iterations < 1) throw ConfigError("max-iterations must be >= 1");
  return c;
}

json flags_to_json(const std::map<std::string, bool>& flags) {
  json out = json::object();
  for (const auto& [k, v] : flags) out[k] = v;
  return out;
}

json report_to_json(const SolveReport& r) {
  // wall time deliberately omitted: reports must be byte-reproducible.
  json out;
  out["schema"] = 1;
  out["stage-iterations"] = r.stage_iterations;
  out["stage-zeta"] = r.stage_zeta;
  out["final-residual"] = r.final_residual;
  out["final-zeta"] = r.final_zeta;
  out["dt"] = r.dt_used;
  out["min-u"] = r.min_u;
  out["convexity-defect"] = r.convexity;
  out["lambda1"] = r.lambda1;
  out["lambda2"] = r.lambda2;
  out["interior-nodes"] = r.interior_nodes;
  out["h"] = r.h;
  out["stencil-width"] = r.stencil_width;
  out["flags"] = flags_to_json(r.flags);
  return out;
}

json barrier_to_json(const BarrierParams& p) {
  json out;
  out["lambda0"] = p.lambda0;
  out["N0"] = p.N0;
  out["M0"] = p.M0;
  out["l"] = p.l;
  out["C1"] = p.C1;
  out["C2"] = p.C2;
  out["inequality-residual"] = p.inequality_residual;
  out["base-point"] = std::vector<double>(
      p.frame.base_point.data(), p.frame.base_point.data() + p.frame.base_point.size());
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.schema = j.value("schema", 1);
  cfg.seed = j.value("seed", std::uint64_t{12345});
  cfg.output_dir = j.value("output-dir", std::string("out"));
  cfg.domain = parse_domain(j.at("domain"));
  cfg.rhs = parse_rhs(j.at("rhs"), cfg.domain.dim());
  if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver"));
  if (j.contains("barrier")) {
    cfg.barrier_samples = j["barrier"].value("samples", cfg.barrier_samples);
    cfg.barrier_boundary_points =
        j["barrier"].value("boundary-points", cfg.barrier_boundary_points);
  }
  cfg.structure_samples = j.value("structure-samples", cfg.structure_samples);
  if (j.contains("diagnostics")) {
    cfg.diag_holder = j["diagnostics"].value("holder", cfg.diag_holder);
    cfg.diag_interior =
        j["diagnostics"].value("interior-bounds", cfg.diag_interior);
    cfg.level_fraction =
        j["diagnostics"].value("level-fraction", cfg.level_fraction);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    auto list = [&](const char* key) {
      std::vector<double> out;
      if (s.contains(key))
        for (const auto& v : s[key]) out.push_back(v.get<double>());
      return out;
    };
    cfg.sweep_alpha = list("alpha");
    cfg.sweep_beta = list("beta");
    cfg.sweep_gamma = list("gamma");
    cfg.sweep_h = list("h");
    cfg.sweep_solve = s.value("solve", false);
    cfg.sweep_workers = s.value("workers", 4);
  }
  return cfg;
}

void write_solution_csv(const GridFunction& u,
                        const std::filesystem::path& file) {
  const Grid& g = *u.grid;
  std::ostringstream out;
  out.precision(17);
  out << "x1,x2,value,classification\n";
  auto row = [&](int node, const char* cls) {
    const auto p = g.pos(node);
    out << p.x() << ',' << p.y() << ',' << u[node] << ',' << cls << '\n';
  };
  for (int node : g.interior_nodes()) row(node, "interior");
  for (int node : g.band_nodes()) row(node, "band");
  write_text(file, out.str());
}

GridFunction read_solution_csv(const std::shared_ptr<const Grid>& grid,
                               const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read " + file.string());
  GridFunction u(grid);
  std::string line;
  std::getline(in, line);  // header
  const double h = grid->h();
  int matched = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string sx, sy, sv, scls;
    std::getline(row, sx, ',');
    std::getline(row, sy, ',');
    std::getline(row, sv, ',');
    std::getline(row, scls, ',');
    const double x = std::stod(sx), y = std::stod(sy), v = std::stod(sv);
    const Eigen::Vector2d p0 = grid->pos(0);
    const int i = static_cast<int>(std::llround((x - p0.x()) / h));
    const int jj = static_cast<int>(std::llround((y - p0.y()) / h));
    if (i < 0 || jj < 0 || i >= grid->nx() || jj >= grid->ny())
      throw ConfigError("solution CSV does not match the configured grid");
    const int node = grid->id(i, jj);
    if (std::abs(grid->pos(node).x() - x) > 1e-9 ||
        std::abs(grid->pos(node).y() - y) > 1e-9)
      throw ConfigError("solution CSV node off-lattice for this config");
    u[node] = v;
    ++matched;
  }
  if (matched == 0) throw ConfigError("empty solution CSV");
  return u;
}

int cmd_barrier(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto pts = cfg.domain.boundary_points(cfg.barrier_boundary_points);
  json out;
  out["schema"] = 1;
  out["points"] = json::array();
  bool all_pass = true;
  for (size_t i = 0; i < pts.size(); ++i) {
    const BarrierParams p = build_barrier(
        cfg.domain, cfg.domain.dim(), cfg.rhs.A(), cfg.rhs.alpha(),
        cfg.rhs.beta(), cfg.rhs.gamma(), pts[i]);
    const SubsolutionReport rep = verify_subsolution(
        p, cfg.rhs, cfg.domain, cfg.barrier_samples, cfg.seed + i);
    json pj = barrier_to_json(p);
    pj["min-ratio"] = rep.min_ratio;
    pj["samples"] = rep.samples;
    pj["pass"] = rep.pass();
    if (rep.argmin.size() > 0)
      pj["argmin"] = std::vector<double>(rep.argmin.data(),
                                         rep.argmin.data() + rep.argmin.size());
    out["points"].push_back(pj);
    all_pass = all_pass && rep.pass();
  }
  out["pass"] = all_pass;
  write_text(cfg.output_dir / "barrier.json", out.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

int cmd_verify(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const StructureReport r =
      check_structure(cfg.rhs, cfg.domain, cfg.structure_samples, cfg.seed);
  json out;
  out["schema"] = 1;
  out["samples"] = r.samples;
  out["max-envelope-gap"] = r.max_envelope_gap;
  out["min-f"] = r.min_f;
  out["positivity"] = r.positivity_pass;
  out["envelope"] = r.envelope_pass;
  out["envelope-checked"] = r.envelope_checked;
  out["monotone"] = r.monotone_pass;
  out["strictly-monotone"] = r.strictly_monotone_pass;
  out["pass"] = r.pass();
  write_text(cfg.output_dir / "verify.json", out.dump(2) + "\n");
  return r.pass() ? 0 : 1;
}

namespace {

json run_diagnostics(const ExperimentConfig& cfg, const GridFunction& u,
                     const BarrierParams& barrier, double zeta) {
  json out = json::object();
  out["convexity-defect"] = convexity_defect(u);
  if (cfg.diag_holder) {
    try {
      const HolderFit fit = holder_exponent_fit(u);
      out["holder"] = {{"exponent", fit.exponent},
                       {"amplitude", fit.amplitude},
                       {"residual", fit.residual},
                       {"samples", fit.samples},
                       {"lambda0", barrier.lambda0},
                       {"pass", fit.exponent >= barrier.lambda0 - 0.05}};
    } catch (const AnalysisError& e) {
      out["holder"] = {{"error", e.what()}};
    }
  }
  if (cfg.diag_interior) {
    double min_u = 0.0;
    for (int node : u.grid->interior_nodes())
      min_u = std::min(min_u, u[node]);
    if (min_u < 0.0) {
      const double t = -cfg.level_fraction * std::abs(min_u);
      const InteriorBounds b = interior_bounds(u, cfg.rhs, barrier, t, zeta);
      out["interior-bounds"] = {{"t", b.t},
                               {"region-nodes", b.region_nodes},
                               {"eig-min", b.eig_min},
                               {"eig-max", b.eig_max},
                               {"det-min", b.det_min},
                               {"det-max", b.det_max},
                               {"f-min", b.f_min},
                               {"f-max", b.f_max},
                               {"grad-max", b.grad_max},
                               {"R0", b.R0},
                               {"strictly-convex", b.strictly_convex},
                               {"det-in-f-range", b.det_in_f_range},
                               {"gradient-bound", b.gradient_bound}};
    }
  }
  return out;
}

}  // namespace

int cmd_solve(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  try {
    const SolveResult res = solve(cfg.domain, cfg.rhs, cfg.solver);
    json out = report_to_json(res.report);
    out["barrier"] = barrier_to_json(res.barrier);
    out["diagnostics"] =
        run_diagnostics(cfg, res.u, res.barrier, res.report.final_zeta);
    write_solution_csv(res.u, cfg.output_dir / "solution.csv");
    const bool ok =
        res.report.final_residual <= cfg.solver.tolerance &&
        res.report.all_flags_pass();
    out["pass"] = ok;
    write_text(cfg.output_dir / "solve.json", out.dump(2) + "\n");
    return ok ? 0 : 1;
  } catch (const SolveError& e) {
    json out;
    out["schema"] = 1;
    out["error"] = e.what();
    out["pass"] = false;
    write_text(cfg.output_dir / "solve.json", out.dump(2) + "\n");
    return 1;
  }
}

int cmd_analyze(const ExperimentConfig& cfg,
                const std::filesystem::path& solution_csv) {
  std::filesystem::create_directories(cfg.output_dir);
  auto grid = build_grid(cfg.domain, cfg.solver.h, cfg.solver.stencil_width);
  const GridFunction u = read_solution_csv(grid, solution_csv);
  const BarrierParams barrier = build_barrier(
      cfg.domain, cfg.domain.dim(), cfg.rhs.A(), cfg.rhs.alpha(),
      cfg.rhs.beta(), cfg.rhs.gamma(), cfg.domain.boundary_points(1)[0]);
  double zeta_min = cfg.solver.zeta_min;
  if (zeta_min <= 0.0)
    zeta_min = cfg.rhs.alpha() > 0.0
                   ? std::pow(cfg.solver.h, barrier.lambda0)
                   : 1e-10;
  json out;
  out["schema"] = 1;
  out["diagnostics"] = run_diagnostics(cfg, u, barrier, zeta_min);
  write_text(cfg.output_dir / "analysis.json", out.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  auto one_or = [](const std::vector<double>& v, double d) {
    return v.empty() ? std::vector<double>{d} : v;
  };
  const auto alphas = one_or(cfg.sweep_alpha, cfg.rhs.alpha());
  const auto betas = one_or(cfg.sweep_beta, cfg.rhs.beta());
  const auto gammas = one_or(cfg.sweep_gamma, cfg.rhs.gamma());
  const auto hs = one_or(cfg.sweep_h, cfg.solver.h);

  struct Row {
    double alpha, beta, gamma, h;
    std::string status;
    double lambda0 = 0, N0 = 0, M0 = 0, C1 = 0, C2 = 0;
    double min_ratio = 0, residual = 0, lambda_hat = 0;
    bool pass = false;
  };
  std::vector<Row> rows;
  for (double a : alphas)
    for (double b : betas)
      for (double g : gammas)
        for (double h : hs) rows.push_back(Row{a, b, g, h, "pending"});

  const int n = cfg.domain.dim();
  auto run_row = [&](Row& row, std::uint64_t seed) {
    try {
      RhsSpec spec = RhsSpec::envelope(n, cfg.rhs.A(), row.alpha, row.beta,
                                       row.gamma);
      const BarrierParams p =
          build_barrier(cfg.domain, n, spec.A(), row.alpha, row.beta, row.gamma,
                        cfg.domain.boundary_points(1)[0]);
      row.lambda0 = p.lambda0;
      row.N0 = p.N0;
      row.M0 = p.M0;
      row.C1 = p.C1;
      row.C2 = p.C2;
      const SubsolutionReport rep =
          verify_subsolution(p, spec, cfg.domain, cfg.barrier_samples, seed);
      row.min_ratio = rep.min_ratio;
      row.pass = rep.pass();
      if (cfg.sweep_solve) {
        SolveConfig sc = cfg.solver;
        sc.h = row.h;
        const SolveResult res = solve(cfg.domain, spec, sc);
        row.residual = res.report.final_residual;
        try {
          row.lambda_hat = holder_exponent_fit(res.u).exponent;
        } catch (const AnalysisError&) {
          row.lambda_hat = std::numeric_limits<double>::quiet_NaN();
        }
        row.pass = row.pass && res.report.all_flags_pass();
      }
      row.status = "ok";
    } catch (const StructureError&) {
      row.status = "rejected";
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  };

  // Bounded worker pool; deterministic per-row seeds and output order.
  const int workers = std::max(1, cfg.sweep_workers);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= rows.size()) return;
        run_row(rows[i], cfg.seed + i);
      }
    });
  for (auto& t : pool) t.join();

  std::ostringstream out;
  out.precision(17);
  out << "alpha,beta,gamma,h,status,lambda0,N0,M0,C1,C2,min_ratio,residual,"
         "lambda_hat,pass\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << r.alpha << ',' << r.beta << ',' << r.gamma << ',' << r.h << ','
        << r.status << ',' << r.lambda0 << ',' << r.N0 << ',' << r.M0 << ','
        << r.C1 << ',' << r.C2 << ',' << r.min_ratio << ',' << r.residual
        << ',' << r.lambda_hat << ',' << (r.pass ? 1 : 0) << '\n';
    if (r.status.rfind("error", 0) == 0) ok = false;
    if (r.status == "ok" && !r.pass) ok = false;
  }
  write_text(cfg.output_dir / "sweep.csv", out.str());
  return ok ? 0 : 1;
}

}  // namespace ma
