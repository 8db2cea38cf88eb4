#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "porodarcy/assembly.hpp"
#include "porodarcy/errors.hpp"
#include "scatter.hpp"

namespace porodarcy {

int default_thread_count() {
  if (const char* env = std::getenv("PORODARCY_THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("PORODARCY_THREADS must be an integer, got '") + env + "'");
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 0;
#endif
}

Assembler::Assembler(const ProblemSpec& problem) : problem_(problem) {
  validate_problem(problem_);
  const Mesh& mesh = *problem_.mesh;

  auto dofs = std::make_shared<DofMap>(build_dof_map(problem_));
  check_compatibility(problem_, *dofs);
  dofs_ = dofs;

  if (problem_.has_body_force()) forcing_ = [spec = problem_](const Point& x) { return spec.forcing(x); };
  for (ElementKind kind : {ElementKind::Line2, ElementKind::Tri3, ElementKind::Quad4, ElementKind::Hex8})
    rules_[static_cast<int>(kind)] = rule_of_degree(kind, problem_.quadrature_degree);

  // sparsity pattern over free dofs
  const int n = dofs_->num_free();
  std::vector<std::vector<int>> rows(n);
  const int nf = dofs_->fields();
  std::vector<int> local;
  for (const Element& el : mesh.elements()) {
    local.clear();
    for (int a = 0; a < el.size(); ++a)
      for (int i = 0; i < nf; ++i) {
        const int f = dofs_->free_index(dofs_->raw(el.nodes[a], i));
        if (f >= 0) local.push_back(f);
      }
    for (int r : local) rows[r].insert(rows[r].end(), local.begin(), local.end());
  }
  pattern_.rows = pattern_.cols = n;
  pattern_.row_ptr.assign(n + 1, 0);
  for (int r = 0; r < n; ++r) {
    std::sort(rows[r].begin(), rows[r].end());
    rows[r].erase(std::unique(rows[r].begin(), rows[r].end()), rows[r].end());
    pattern_.row_ptr[r + 1] = pattern_.row_ptr[r] + static_cast<int>(rows[r].size());
  }
  pattern_.col_idx.reserve(pattern_.row_ptr[n]);
  for (auto& row : rows) pattern_.col_idx.insert(pattern_.col_idx.end(), row.begin(), row.end());
  pattern_.values.assign(pattern_.col_idx.size(), 0.0);

  colors_ = detail::color_elements(mesh);

  // weak pressure boundary terms and point sources do not depend on p_tilde
  LinearSystem boundary;
  boundary.rhs.assign(n, 0.0);
  boundary.dofs = dofs_;
  for (const PressureBc& bc : problem_.pressure_bcs) {
    for (const FacetRef& f : mesh.facet_set(bc.facet_set)) {
      const ElementVector fe = boundary_pressure_term(mesh, f, bc.value, std::max(2, problem_.quadrature_degree));
      const Element& el = mesh.element(f.element);
      for (int a = 0; a < el.size(); ++a)
        for (int i = 0; i < nf; ++i) {
          const int free = dofs_->free_index(dofs_->raw(el.nodes[a], i));
          if (free >= 0) boundary.rhs[free] += fe(a * nf + i);
        }
    }
  }
  add_point_sources(boundary, problem_.sources, mesh);
  static_rhs_ = std::move(boundary.rhs);
}

ElementSystem Assembler::compute_element(int e, std::span<const double> p_tilde) const {
  const Mesh& mesh = *problem_.mesh;
  const Element& el = mesh.element(e);
  const auto coords = mesh.element_coords(e);
  std::array<double, kMaxElementNodes> p_local{};
  for (int a = 0; a < el.size(); ++a) p_local[a] = p_tilde[el.nodes[a]];
  const auto size = static_cast<std::size_t>(el.size());
  return element_matrices(el.kind, {coords.data(), size}, mesh.region(e), rules_[static_cast<int>(el.kind)],
                          problem_.drag, forcing_, {p_local.data(), size});
}

LinearSystem Assembler::empty_system() const {
  LinearSystem sys;
  sys.matrix = pattern_;
  sys.rhs = static_rhs_;
  sys.dofs = dofs_;
  return sys;
}

LinearSystem Assembler::assemble(std::span<const double> p_tilde, int threads) const {
  return threads > 0 ? assemble_parallel(p_tilde, threads) : assemble_serial(p_tilde);
}

LinearSystem Assembler::assemble_serial(std::span<const double> p_tilde, std::span<const int> element_order) const {
  const Mesh& mesh = *problem_.mesh;
  if (static_cast<int>(p_tilde.size()) != mesh.num_nodes())
    throw InvalidArgument("previous pressure must have one value per node");

  std::vector<int> order;
  if (element_order.empty()) {
    order.resize(mesh.num_elements());
    std::iota(order.begin(), order.end(), 0);
  } else {
    order.assign(element_order.begin(), element_order.end());
  }

  struct Triplet {
    int row, col;
    double value;
  };
  std::vector<Triplet> triplets;
  std::vector<double> rhs = static_rhs_;
  for (int e : order) {
    const ElementSystem es = compute_element(e, p_tilde);
    detail::scatter_element(
        *dofs_, mesh.element(e), es, [&](int r, int c, double v) { triplets.push_back({r, c, v}); },
        [&](int r, double v) { rhs[r] += v; });
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  LinearSystem sys;
  sys.dofs = dofs_;
  sys.rhs = std::move(rhs);
  CsrMatrix& m = sys.matrix;
  m.rows = m.cols = dofs_->num_free();
  m.row_ptr.assign(m.rows + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const Triplet& t = triplets[k];
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == t.row && triplets[k].col == t.col; ++k) sum += triplets[k].value;
    m.col_idx.push_back(t.col);
    m.values.push_back(sum);
    ++m.row_ptr[t.row + 1];
  }
  for (int r = 0; r < m.rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return sys;
}

LinearSystem assemble(const ProblemSpec& problem, std::span<const double> p_tilde) {
  return Assembler(problem).assemble(p_tilde, default_thread_count());
}

}  // namespace porodarcy
