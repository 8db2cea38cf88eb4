// porodarcy: command-line driver for the modified Darcy solver.
//
//   porodarcy solve --problem oneD --beta 0.02 --out run1
//   porodarcy sweep --problem regions --betas 0,0.25,0.5,0.75,1 --out sweep
//   porodarcy convergence --element tri3 --sizes 8,16,32,64
//   porodarcy list-problems
//   porodarcy mesh-info --problem leakage-coarse
//
// Exit status: 0 converged, 2 Picard did not converge, 1 error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "porodarcy/cli_io.hpp"
#include "porodarcy/errors.hpp"

namespace fs = std::filesystem;
using namespace porodarcy;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct RunArgs {
  std::string problem;
  std::string config;
  std::optional<double> beta;
  std::string law;
  std::string alpha0;
  std::optional<double> drag_scale;
  std::optional<double> eps_tol;
  std::optional<int> max_iters;
  std::optional<int> resolution;
  std::string element;
  std::optional<int> quadrature_degree;
  std::string linear;
  std::optional<int> threads;
  std::string warm_start;
  std::string data_dir;
  std::string out;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--problem", a.problem, "packaged problem name (see list-problems)");
  cmd->add_option("--config", a.config, "run configuration file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--law", a.law, "drag law: constant, linear or barus");
  cmd->add_option("--alpha0", a.alpha0, "per-region alpha0 overrides, e.g. 1:0.5,2:1");
  cmd->add_option("--drag-scale", a.drag_scale, "non-dimensional drag number A");
  cmd->add_option("--eps-tol", a.eps_tol, "Picard tolerance on ||p(i) - p(i-1)||");
  cmd->add_option("--max-iters", a.max_iters, "Picard iteration limit");
  cmd->add_option("--resolution", a.resolution, "elements per side for generated meshes");
  cmd->add_option("--element", a.element, "element kind for generated 2D meshes: tri3 or quad4");
  cmd->add_option("--quadrature-degree", a.quadrature_degree, "volume quadrature degree");
  cmd->add_option("--linear", a.linear, "linear solver: direct or iterative");
  cmd->add_option("--threads", a.threads, "assembly threads (0 = serial reference path)");
  cmd->add_option("--warm-start", a.warm_start, "initial nodal pressure file (one value per line)");
  cmd->add_option("--data-dir", a.data_dir, "directory with the shipped mesh files");
  cmd->add_option("--out", a.out, "output directory");
}

RunConfig resolve_config(const RunArgs& a) {
  RunConfig c = a.config.empty() ? RunConfig{} : parse_config_file(a.config);
  if (!a.problem.empty()) c.problem = a.problem;
  if (c.problem.empty()) throw InvalidArgument("give --problem or --config");
  ProblemOptions& o = c.options;
  if (a.beta) o.beta = a.beta;
  if (!a.law.empty()) o.law = parse_drag_law(a.law);
  if (!a.alpha0.empty()) o.alpha0 = parse_alpha0_map(a.alpha0);
  if (a.drag_scale) o.drag_scale = a.drag_scale;
  if (a.eps_tol) o.eps_tol = a.eps_tol;
  if (a.max_iters) o.max_iters = a.max_iters;
  if (a.resolution) o.resolution = a.resolution;
  if (!a.element.empty()) o.element = parse_element_kind(a.element);
  if (a.quadrature_degree) o.quadrature_degree = a.quadrature_degree;
  if (!a.data_dir.empty()) o.data_dir = a.data_dir;
  if (!a.linear.empty()) c.linear = parse_linear_solver(a.linear);
  if (a.threads) c.threads = a.threads;
  if (!a.warm_start.empty()) c.warm_start = a.warm_start;
  if (!a.out.empty()) c.output_dir = a.out;
  return c;
}

PackagedProblem prepare(const RunConfig& c) {
  PackagedProblem p = make_problem(c.problem, c.options);
  p.config.linear.kind = c.linear;
  if (c.threads) p.config.threads = *c.threads;
  if (c.warm_start) p.config.initial_pressure = read_pressure_file(*c.warm_start);
  return p;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  fn(out);
  if (!out) throw Error("failed writing " + path.string());
}

struct RunOutput {
  PicardResult result;
  Measurements measurements;
};

RunOutput run_and_write(const PackagedProblem& p, const fs::path& dir, bool vtk) {
  RunOutput r{run_picard(p.spec, p.config), {}};
  r.measurements = measure(p, r.result.solution);
  fs::create_directories(dir);
  if (vtk) write_vtk((dir / "solution.vtk").string(), *p.spec.mesh, r.result.solution);
  write_file(dir / "history.csv", [&](std::ostream& o) { write_history_csv(o, r.result.report); });
  write_file(dir / "summary.txt", [&](std::ostream& o) { write_summary(o, p, r.result.report, r.measurements); });
  write_file(dir / "pressure.txt", [&](std::ostream& o) { write_pressure(o, r.result.solution.pressure); });
  return r;
}

int cmd_solve(const RunArgs& a, std::optional<double> beta) {
  RunArgs args = a;
  if (beta) args.beta = beta;
  const RunConfig c = resolve_config(args);
  const PackagedProblem p = prepare(c);
  const RunOutput r = run_and_write(p, c.output_dir, true);
  write_summary(std::cout, p, r.result.report, r.measurements);
  return r.result.report.converged ? kExitConverged : kExitNotConverged;
}

std::vector<double> sweep_betas(const std::string& list, const std::vector<double>& range) {
  if (!list.empty() && !range.empty()) throw InvalidArgument("give either --betas or --beta-range, not both");
  std::vector<double> betas;
  if (!range.empty()) {
    if (range.size() != 3 || !(range[2] > 0.0) || range[1] < range[0])
      throw InvalidArgument("--beta-range needs start stop step with step > 0 and stop >= start");
    const int n = static_cast<int>(std::floor((range[1] - range[0]) / range[2] + 1e-9));
    for (int k = 0; k <= n; ++k) betas.push_back(range[0] + k * range[2]);
  } else {
    betas = parse_double_list(list);
  }
  if (betas.empty()) throw InvalidArgument("beta list is empty");
  return betas;
}

int cmd_sweep(const RunArgs& a, const std::string& list, const std::vector<double>& range, int jobs, bool vtk) {
  const std::vector<double> betas = sweep_betas(list, range);
  RunConfig base = resolve_config(a);
  const fs::path root = base.output_dir;
  fs::create_directories(root);

  std::vector<SweepRow> rows(betas.size());
  jobs = std::max(1, jobs);
  // runs are independent; with several jobs each run assembles serially
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t k = 0; k < betas.size(); ++k) {
    SweepRow& row = rows[k];
    row.beta = betas[k];
    try {
      RunConfig c = base;
      c.options.beta = betas[k];
      if (jobs > 1) c.threads = 0;
      const PackagedProblem p = prepare(c);
      const RunOutput r = run_and_write(p, root / ("beta_" + format_double(betas[k])), vtk);
      row.iterations = r.result.report.iterations_used;
      row.converged = r.result.report.converged;
      row.measurements = r.measurements;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  }
  write_file(root / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
  write_sweep_csv(std::cout, rows);

  bool failed = false, all_converged = true;
  for (const SweepRow& r : rows) {
    failed = failed || !r.error.empty();
    all_converged = all_converged && r.converged;
  }
  if (failed) return kExitError;
  return all_converged ? kExitConverged : kExitNotConverged;
}

int cmd_convergence(const std::string& element, const std::string& sizes_text, double beta, const std::string& out) {
  const ElementKind kind = parse_element_kind(element);
  std::vector<int> sizes;
  for (double s : parse_double_list(sizes_text)) {
    if (s != std::floor(s) || s < 1) throw InvalidArgument("mesh sizes must be positive integers");
    sizes.push_back(static_cast<int>(s));
  }
  const ConvergenceReport report =
      convergence_study([&](int n) { return manufactured_problem(n, kind, beta); }, sizes);
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "convergence.csv", [&](std::ostream& o) { report.write_csv(o); });
  }
  report.write_csv(std::cout);
  return report.all_converged ? kExitConverged : kExitNotConverged;
}

int cmd_list() {
  for (const CatalogEntry& e : packaged_problems()) std::printf("%-15s %s\n", e.name.c_str(), e.description.c_str());
  return kExitConverged;
}

int cmd_mesh_info(const RunArgs& a, const std::string& mesh_file) {
  std::shared_ptr<const Mesh> mesh;
  if (!mesh_file.empty()) {
    mesh = std::make_shared<Mesh>(read_mesh_file(mesh_file));
  } else {
    mesh = prepare(resolve_config(a)).spec.mesh;
  }
  std::map<std::string, int> kinds;
  std::map<int, int> regions;
  for (int e = 0; e < mesh->num_elements(); ++e) {
    ++kinds[std::string(to_string(mesh->element(e).kind))];
    ++regions[mesh->region(e)];
  }
  std::printf("dim %d\nnodes %d\nelements %d\nvolume %.10g\n", mesh->dim(), mesh->num_nodes(), mesh->num_elements(),
              mesh->total_volume());
  for (const auto& [k, n] : kinds) std::printf("kind %s %d\n", k.c_str(), n);
  for (const auto& [r, n] : regions) std::printf("region %d %d\n", r, n);
  for (const auto& [name, facets] : mesh->facet_sets()) std::printf("facetset %s %zu\n", name.c_str(), facets.size());
  std::printf("boundary_facets %zu\n", mesh->boundary_facets().size());
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized mixed finite element solver for Darcy flow with pressure-dependent drag"};
  app.require_subcommand(1);

  RunArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run the Picard solver on one problem");
  add_run_options(solve, solve_args);
  solve->add_option("--beta", solve_args.beta, "pressure coefficient of the drag law");

  RunArgs sweep_args;
  std::string betas;
  std::vector<double> beta_range;
  int jobs = 1;
  bool sweep_vtk = false;
  auto* sweep = app.add_subcommand("sweep", "one run per beta, aggregated into sweep.csv");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--betas", betas, "comma-separated beta values");
  sweep->add_option("--beta-range", beta_range, "start stop step")->expected(3);
  sweep->add_option("--jobs", jobs, "runs executed concurrently");
  sweep->add_flag("--vtk", sweep_vtk, "also write solution.vtk per run");

  std::string conv_element = "quad4", conv_sizes = "8,16,32,64", conv_out;
  double conv_beta = 0.5;
  auto* conv = app.add_subcommand("convergence", "mesh-refinement study on the manufactured solution");
  conv->add_option("--element", conv_element, "tri3 or quad4");
  conv->add_option("--sizes", conv_sizes, "comma-separated elements per side (at least 3)");
  conv->add_option("--beta", conv_beta, "Barus coefficient");
  conv->add_option("--out", conv_out, "directory for convergence.csv");

  auto* list = app.add_subcommand("list-problems", "list the packaged problems");

  RunArgs info_args;
  std::string mesh_file;
  auto* info = app.add_subcommand("mesh-info", "print mesh statistics");
  info->add_option("--problem", info_args.problem, "packaged problem name");
  info->add_option("--resolution", info_args.resolution, "elements per side for generated meshes");
  info->add_option("--element", info_args.element, "element kind for generated 2D meshes");
  info->add_option("--data-dir", info_args.data_dir, "directory with the shipped mesh files");
  info->add_option("--mesh", mesh_file, "mesh file in the plain-text format")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_args, std::nullopt);
    if (*sweep) return cmd_sweep(sweep_args, betas, beta_range, jobs, sweep_vtk);
    if (*conv) return cmd_convergence(conv_element, conv_sizes, conv_beta, conv_out);
    if (*list) return cmd_list();
    if (*info) return cmd_mesh_info(info_args, mesh_file);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
