#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "porodarcy/assembly.hpp"

namespace porodarcy {

enum class LinearSolverKind { Direct, Iterative };

struct LinearSolverOptions {
  LinearSolverKind kind = LinearSolverKind::Direct;
  double krylov_tol = 1e-12;  // relative residual for the iterative solver
  int krylov_max_iters = 20000;
  int refinement_steps = 2;  // iterative refinement steps after a direct solve
};

struct SolverConfig {
  double eps_tol = 1e-10;
  int max_iters = 100;
  LinearSolverOptions linear;
  // Initial nodal pressure; zero when absent.
  std::optional<std::vector<double>> initial_pressure;
  // Assembly threads; negative means default_thread_count().
  int threads = -1;
};

struct PicardReport {
  int iterations_used = 0;
  std::vector<double> diff_norms;  // ||p(i) - p(i-1)|| per iteration
  bool converged = false;
  // Drag independent of pressure: the first iterate is the fixed point and
  // the recorded norm is that of F(p1) - p1, which vanishes identically.
  bool pressure_independent = false;
};

struct SolutionField {
  int dim = 0;
  std::vector<double> velocity;  // dim components per node
  std::vector<double> pressure;  // one value per node

  int num_nodes() const { return static_cast<int>(pressure.size()); }
  Point velocity_at(int node) const;

  static SolutionField from_raw(const DofMap& dofs, std::span<const double> raw);
};

struct PicardResult {
  SolutionField solution;
  PicardReport report;
};

// Euclidean norm of the difference of two nodal pressure vectors.
double pressure_diff_norm(std::span<const double> p_new, std::span<const double> p_old);

// Reusable solver for a fixed sparsity pattern; the direct path analyzes the
// pattern once and refactorizes on each call.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverOptions options = {});
  ~LinearSolver();
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  // Throws LinearSolveError on a singular or failed solve.
  std::vector<double> solve(const LinearSystem& system);

 private:
  struct Impl;
  LinearSolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_linear(const LinearSystem& system, const LinearSolverOptions& options = {});

// Fixed-point loop: assemble with alpha frozen at p(i-1), solve, stop when
// ||p(i) - p(i-1)|| < eps_tol or after max_iters iterations (reported as not
// converged). Linear-solve failures are rethrown with the iteration index.
PicardResult run_picard(const ProblemSpec& problem, const SolverConfig& config);

}  // namespace porodarcy
