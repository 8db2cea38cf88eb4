#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "porodarcy/benchmarks.hpp"

namespace porodarcy {

// Run configuration. Text form is sectioned key = value:
//
//   [problem]   name
//   [physics]   beta, law (constant|linear|barus), drag_scale,
//               alpha0 (comma-separated region:value pairs)
//   [solver]    eps_tol, max_iters, linear (direct|iterative), threads,
//               warm_start (nodal pressure file)
//   [mesh]      resolution, element (line2|tri3|quad4|hex8),
//               quadrature_degree, data_dir
//   [output]    directory
//
// '#' starts a comment. Unknown sections or keys, duplicate keys and
// ill-typed values are errors carrying the line number.
struct RunConfig {
  std::string problem;
  ProblemOptions options;
  LinearSolverKind linear = LinearSolverKind::Direct;
  std::optional<int> threads;
  std::optional<std::string> warm_start;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

// "1:0.5,2:1" -> {1: 0.5, 2: 1}
std::map<int, double> parse_alpha0_map(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

LinearSolverKind parse_linear_solver(const std::string& name);
std::string to_string(LinearSolverKind kind);

// Doubles with 17 significant digits so they round-trip exactly.
std::string format_double(double value);

// Legacy ASCII VTK unstructured grid with point data "pressure" (scalar) and
// "velocity" (vector, padded to 3 components). Throws Error naming the path
// when the file cannot be written.
void write_vtk(std::ostream& out, const Mesh& mesh, const SolutionField& solution);
void write_vtk(const std::string& path, const Mesh& mesh, const SolutionField& solution);
int vtk_cell_type(ElementKind kind);

// "iter,diff_norm" rows, 1-based iteration index.
void write_history_csv(std::ostream& out, const PicardReport& report);

void write_summary(std::ostream& out, const PackagedProblem& problem, const PicardReport& report,
                   const Measurements& measurements);

// One nodal pressure per line; the warm-start format.
void write_pressure(std::ostream& out, const std::vector<double>& pressure);
std::vector<double> read_pressure_file(const std::string& path);

struct SweepRow {
  double beta = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string error;  // non-empty when the run failed
  Measurements measurements;
};

// Columns beta, iters, converged, <measurement names>, error. Measurement
// names come from the first successful row; failed rows leave them empty.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace porodarcy
