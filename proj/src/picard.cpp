#include "porodarcy/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "porodarcy/errors.hpp"

namespace porodarcy {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

SparseMatrix to_eigen(const CsrMatrix& m) {
  const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      m.rows, m.cols, m.nonzeros(), m.row_ptr.data(), m.col_idx.data(), m.values.data());
  SparseMatrix out = view;
  out.makeCompressed();
  return out;
}


}  // namespace

Point SolutionField::velocity_at(int node) const {
  Point v{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) v[i] = velocity[node * dim + i];
  return v;
}

SolutionField SolutionField::from_raw(const DofMap& dofs, std::span<const double> raw) {
  SolutionField s;
  s.dim = dofs.dim();
  s.velocity.resize(static_cast<std::size_t>(dofs.num_nodes()) * s.dim);
  s.pressure.resize(dofs.num_nodes());
  for (int n = 0; n < dofs.num_nodes(); ++n) {
    for (int i = 0; i < s.dim; ++i) s.velocity[n * s.dim + i] = raw[dofs.raw(n, i)];
    s.pressure[n] = raw[dofs.raw(n, dofs.pressure_field())];
  }
  return s;
}

double pressure_diff_norm(std::span<const double> p_new, std::span<const double> p_old) {
  if (p_new.size() != p_old.size()) {
    throw InvalidArgument("pressure vectors differ in length (" + std::to_string(p_new.size()) + " vs " +
                          std::to_string(p_old.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p_new.size(); ++i) {
    const double d = p_new[i] - p_old[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct LinearSolver::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  int analyzed_rows = -1;
  int analyzed_nnz = -1;
};

LinearSolver::LinearSolver(LinearSolverOptions options) : options_(options), impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

std::vector<double> LinearSolver::solve(const LinearSystem& system) {
  const CsrMatrix& m = system.matrix;
  if (m.rows != m.cols || static_cast<int>(system.rhs.size()) != m.rows)
    throw InvalidArgument("linear system dimensions do not match");
  if (m.rows == 0) return {};
  const SparseMatrix a = to_eigen(m);
  const Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), m.rows);
  Eigen::VectorXd x;

  if (options_.kind == LinearSolverKind::Direct) {
    // Row then column max-norm equilibration: velocity and pressure unknowns
    // differ by orders of magnitude near wells and drag contrasts, and the
    // unscaled factorization loses digits the Picard stopping rule needs.
    Eigen::VectorXd row_scale = Eigen::VectorXd::Zero(m.rows), col_scale = Eigen::VectorXd::Zero(m.cols);
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it)
        row_scale[it.row()] = std::max(row_scale[it.row()], std::abs(it.value()));
    for (int i = 0; i < m.rows; ++i) {
      if (row_scale[i] == 0.0) throw LinearSolveError("row " + std::to_string(i) + " of the system matrix is zero");
      row_scale[i] = 1.0 / row_scale[i];
    }
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it)
        col_scale[it.col()] = std::max(col_scale[it.col()], std::abs(row_scale[it.row()] * it.value()));
    for (int j = 0; j < m.cols; ++j) {
      if (col_scale[j] == 0.0) throw LinearSolveError("column " + std::to_string(j) + " of the system matrix is zero");
      col_scale[j] = 1.0 / col_scale[j];
    }
    const SparseMatrix scaled = row_scale.asDiagonal() * a * col_scale.asDiagonal();

    if (!impl_->analyzed || impl_->analyzed_rows != m.rows || impl_->analyzed_nnz != m.nonzeros()) {
      impl_->lu.analyzePattern(scaled);
      impl_->analyzed = true;
      impl_->analyzed_rows = m.rows;
      impl_->analyzed_nnz = m.nonzeros();
    }
    impl_->lu.factorize(scaled);
    if (impl_->lu.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "sparse LU factorization failed on " << m.rows << " dofs: " << impl_->lu.lastErrorMessage();
      throw LinearSolveError(msg.str());
    }
    auto solve_scaled = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      Eigen::VectorXd y = impl_->lu.solve(row_scale.cwiseProduct(rhs));
      if (impl_->lu.info() != Eigen::Success)
        throw LinearSolveError("sparse LU solve failed on " + std::to_string(m.rows) + " dofs");
      return col_scale.cwiseProduct(y);
    };
    x = solve_scaled(b);
    // refinement with residuals accumulated in extended precision
    for (int step = 0; step < options_.refinement_steps; ++step) {
      Eigen::VectorXd r(m.rows);
      for (int i = 0; i < m.rows; ++i) {
        long double acc = b[i];
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
          acc -= static_cast<long double>(m.values[k]) * x[m.col_idx[k]];
        r[i] = static_cast<double>(acc);
      }
      x += solve_scaled(r);
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> krylov;
    krylov.setTolerance(options_.krylov_tol);
    krylov.setMaxIterations(options_.krylov_max_iters);
    krylov.compute(a);
    x = krylov.solve(b);
    if (krylov.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "BiCGSTAB did not reach tolerance " << options_.krylov_tol << " on " << m.rows << " dofs after "
          << krylov.iterations() << " iterations (estimated error " << krylov.error() << ")";
      throw LinearSolveError(msg.str());
    }
  }
  if (!x.allFinite()) throw LinearSolveError("linear solve produced non-finite values on " + std::to_string(m.rows) + " dofs");
  return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_linear(const LinearSystem& system, const LinearSolverOptions& options) {
  LinearSolver solver(options);
  return solver.solve(system);
}

PicardResult run_picard(const ProblemSpec& problem, const SolverConfig& config) {
  if (!(config.eps_tol > 0.0)) throw InvalidArgument("eps_tol must be positive");
  if (config.max_iters < 1) throw InvalidArgument("max_iters must be at least 1");

  const Assembler assembler(problem);
  const DofMap& dofs = *assembler.dofs();
  const int threads = config.threads >= 0 ? config.threads : default_thread_count();
  LinearSolver solver(config.linear);

  std::vector<double> p_prev(dofs.num_nodes(), 0.0);
  if (config.initial_pressure) {
    if (static_cast<int>(config.initial_pressure->size()) != dofs.num_nodes())
      throw InvalidArgument("initial pressure has " + std::to_string(config.initial_pressure->size()) +
                            " values, mesh has " + std::to_string(dofs.num_nodes()) + " nodes");
    p_prev = *config.initial_pressure;
  }

  PicardResult result;
  PicardReport& report = result.report;
  report.pressure_independent = problem.drag.pressure_independent();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    std::vector<double> x;
    try {
      x = solver.solve(assembler.assemble(p_prev, threads));
    } catch (const LinearSolveError& ex) {
      throw LinearSolveError("Picard iteration " + std::to_string(iter) + ": " + ex.what());
    }
    result.solution = SolutionField::from_raw(dofs, dofs.expand(x));
    report.iterations_used = iter;

    if (report.pressure_independent) {
      // the assembled system does not see p_tilde, so p1 is the fixed point
      report.diff_norms.push_back(0.0);
      report.converged = true;
      return result;
    }
    const double diff = pressure_diff_norm(result.solution.pressure, p_prev);
    report.diff_norms.push_back(diff);
    if (diff < config.eps_tol) {
      report.converged = true;
      return result;
    }
    p_prev = result.solution.pressure;
  }
  report.converged = false;
  return result;
}

}  // namespace porodarcy
