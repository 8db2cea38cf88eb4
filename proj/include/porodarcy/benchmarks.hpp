#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "porodarcy/picard.hpp"
#include "porodarcy/problem.hpp"

namespace porodarcy {

// ---- closed forms -------------------------------------------------------

struct Flow1D {
  double pressure = 0.0;
  double velocity = 0.0;
};

// Pressure-driven flow on (0, 1) with p(0) = p1, p(1) = p2. beta == 0 (or the
// constant law) gives the Darcy limit. Throws ModelBreakdown when the linear
// law's 1 + beta p_i is not positive.
Flow1D analytic_1d(DragLaw law, double alpha0, double beta, double drag_scale, double p1, double p2, double x);
double analytic_1d_pressure_gradient(DragLaw law, double alpha0, double beta, double drag_scale, double p1,
                                     double p2, double x);

// Barus drag, unit velocity along x, p(1) = p0. Throws ModelBreakdown when
// the flow cannot be sustained (log argument <= 0).
double analytic_constant_flow_2d(double alpha0, double beta, double p0, double x);

// Barus drag, unit velocity along x, p(0) = 0.
double analytic_patch_3d(double alpha0, double beta, double x);

// Exact (p, v, b) for a problem with body force scale C and unit density.
struct AnalyticSolution {
  ScalarField pressure;
  VectorField pressure_gradient;
  VectorField velocity;
  VectorField body_force;  // empty means zero
  DragModel drag;
  double body_force_scale = 1.0;

  // max_i |A alpha(p) v_i + d_i p - C b_i| at x
  double momentum_residual(const Point& x, int region = 0) const;
};

// Largest momentum residual over an n^dim grid of sample points in the box
// [lo, hi] (extra coordinates are ignored for dim < 3).
double max_momentum_residual(const AnalyticSolution& exact, int dim, const Point& lo, const Point& hi,
                             int samples_per_axis = 10, int region = 0);

// ---- errors and fluxes ----------------------------------------------------

struct L2Errors {
  double pressure = 0.0;
  double velocity = 0.0;
};

inline constexpr int kErrorQuadratureDegree = kDefaultQuadratureDegree + 1;

// L2 norms of p_h - p and |v_h - v| over the mesh.
L2Errors l2_errors(const Mesh& mesh, const SolutionField& solution, const AnalyticSolution& exact,
                   int degree = kErrorQuadratureDegree);

// Sum over facets of the integral of v_h . n, n the outward normal of each
// facet's own element. Facets need not lie on the boundary.
double flux_through(const Mesh& mesh, const SolutionField& solution, std::span<const FacetRef> facets,
                    int degree = kDefaultQuadratureDegree);

// ---- convergence ----------------------------------------------------------

struct BenchmarkCase {
  ProblemSpec problem;
  AnalyticSolution exact;
  SolverConfig config;
  double h = 0.0;
};

using ProblemFamily = std::function<BenchmarkCase(int n)>;

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double pressure_error = 0.0;
  double velocity_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Least-squares slopes of log e against log h; empty when every error is
  // at rounding level (the exact solution lies in the discrete space).
  std::optional<double> pressure_rate;
  std::optional<double> velocity_rate;
  bool all_converged = true;

  // "h,e_p,e_v" rows followed by a "# rates,<p>,<v>" line ("exact" when empty).
  void write_csv(std::ostream& out) const;
};

// Errors at or below this are treated as rounding.
inline constexpr double kExactErrorLevel = 1e-11;

double loglog_slope(std::span<const double> h, std::span<const double> e);

// Needs at least 3 sizes; sizes are sorted so that h decreases.
ConvergenceReport convergence_study(const ProblemFamily& family, std::vector<int> sizes);

// Manufactured problem on (0,1)^2: v = (sin pi x cos pi y, -cos pi x sin pi y),
// p = x^2 y^2, Barus drag with alpha0 = 1, body force chosen to balance
// momentum; zero normal velocity on all edges, p pinned to 0 at the origin.
BenchmarkCase manufactured_problem(int n, ElementKind kind = ElementKind::Quad4, double beta = 0.5);

// ---- packaged problems ------------------------------------------------------

struct ProblemOptions {
  std::optional<double> beta;
  std::optional<DragLaw> law;
  std::optional<double> drag_scale;
  std::map<int, double> alpha0;  // per-region overrides
  std::optional<double> eps_tol;
  std::optional<int> max_iters;
  std::optional<int> resolution;  // elements per side for generated meshes
  std::optional<ElementKind> element;
  std::optional<int> quadrature_degree;
  std::optional<std::string> data_dir;  // location of shipped mesh files

  friend bool operator==(const ProblemOptions&, const ProblemOptions&) = default;
};

// Facets across which a flux is reported; sign flips orientation so that the
// reported number is e.g. an inflow rather than an outflow.
struct Opening {
  std::string name;
  std::vector<FacetRef> facets;
  double sign = 1.0;
};

using Measurements = std::vector<std::pair<std::string, double>>;

struct PackagedProblem {
  std::string name;
  std::string description;
  ProblemSpec spec;
  SolverConfig config;
  std::vector<Opening> openings;
  std::optional<AnalyticSolution> exact;
  // Quantities derived from the opening fluxes and the solution.
  std::function<Measurements(const Measurements& fluxes, const SolutionField&)> derived;
};

struct CatalogEntry {
  std::string name;
  std::string description;
};

std::vector<CatalogEntry> packaged_problems();

// Throws InvalidArgument for unknown names.
PackagedProblem make_problem(const std::string& name, const ProblemOptions& options = {});

// Opening fluxes (times their sign) followed by derived quantities.
Measurements measure(const PackagedProblem& problem, const SolutionField& solution);

// Directory holding the shipped mesh files: PORODARCY_DATA_DIR if set, else
// the source tree's data/ directory.
std::string default_data_dir();

}  // namespace porodarcy
