#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "porodarcy/problem.hpp"

namespace porodarcy {

// Degrees of freedom: nd velocity components then one pressure per node,
// numbered node-major. Constrained dofs carry a prescribed value and are
// excluded from the solved (free) set.
class DofMap {
 public:
  DofMap(int num_nodes, int dim);

  int dim() const { return dim_; }
  int fields() const { return dim_ + 1; }
  int pressure_field() const { return dim_; }
  int num_nodes() const { return num_nodes_; }
  int num_raw() const { return num_nodes_ * fields(); }
  int raw(int node, int field) const { return node * fields() + field; }

  void constrain(int raw, double value);
  bool is_constrained(int raw) const { return constrained_[raw] != 0; }
  double constrained_value(int raw) const { return values_[raw]; }
  int num_constrained() const;

  // Numbers the free dofs; must be called after the last constrain().
  void finalize();
  int num_free() const { return static_cast<int>(free_to_raw_.size()); }
  int free_index(int raw) const { return raw_to_free_[raw]; }
  int raw_of_free(int f) const { return free_to_raw_[f]; }

  // Full raw vector from a free-dof solution, inserting constrained values.
  std::vector<double> expand(std::span<const double> free_values) const;

 private:
  int num_nodes_;
  int dim_;
  std::vector<char> constrained_;
  std::vector<double> values_;
  std::vector<int> raw_to_free_;
  std::vector<int> free_to_raw_;
};

// Row-compressed sparse matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  int nonzeros() const { return static_cast<int>(values.size()); }
  // Zero when (r, c) is outside the pattern.
  double at(int r, int c) const;
  std::vector<double> multiply(std::span<const double> x) const;
};

struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::shared_ptr<const DofMap> dofs;
};

inline constexpr int kMaxElementDofs = kMaxElementNodes * 4;
using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxElementDofs,
                                    kMaxElementDofs>;
using ElementVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxElementDofs, 1>;

// Element-local dofs are node-major: index a * (nd + 1) + field.
struct ElementSystem {
  ElementMatrix K;
  ElementVector f;
};

// Quadrature of the stabilized bilinear form and the volume terms of the
// load functional on one element, with alpha frozen at the interpolated
// previous pressure `p_tilde_nodal`:
//   (w; a v) - (div w; p) - (q; div v) - 1/2 (a w + grad q; a^-1 (a v + grad p))
//   (w; f) - 1/2 (a w + grad q; a^-1 f)
// where a = A alpha(p_tilde) and f = C rho b is given by `forcing` (empty
// means no body force).
ElementSystem element_matrices(ElementKind kind, std::span<const Point> coords, int region,
                               const QuadratureRule& rule, const DragModel& drag, const VectorField& forcing,
                               std::span<const double> p_tilde_nodal);

// -(w.n; p0) on one boundary facet, laid out as an element-local vector.
// Throws InvalidArgument for interior facets.
ElementVector boundary_pressure_term(const Mesh& mesh, const FacetRef& facet, const ScalarField& p0,
                                     int degree = 2);

// Marks the normal velocity component of every node on the facet set as
// constrained. Throws UnsupportedGeometry for facets that are not axis aligned.
void apply_velocity_normal_bc(const Mesh& mesh, const VelocityBc& bc, DofMap& dofs);

// Adds -strength to the pressure-test row of the node at each source location.
// Sources landing on a constrained pressure dof are dropped (the row is
// implied by the others). Throws SourcePlacement when no node matches.
void add_point_sources(LinearSystem& system, std::span<const PointSource> sources, const Mesh& mesh);

// Net outward flux of the strongly prescribed normal velocity, integrated over
// all velocity facet sets with the constrained nodal values in `dofs`.
double prescribed_boundary_outflux(const ProblemSpec& problem, const DofMap& dofs);

// For problems without pressure facet sets, rejects data with
// |outflux - sum(sources)| > 1e-10.
void check_compatibility(const ProblemSpec& problem, const DofMap& dofs);

// Structural checks on the boundary conditions (facet sets exist, Gamma_v and
// Gamma_p disjoint, every boundary facet covered).
void validate_problem(const ProblemSpec& problem);

// Dof map with all strong constraints applied and free dofs numbered.
DofMap build_dof_map(const ProblemSpec& problem);

enum class AssemblyBackend { Serial, OpenMP };

// Thread cap from PORODARCY_THREADS (unset: OpenMP default, 0: serial).
int default_thread_count();

// Holds everything about the global system that does not depend on the
// previous pressure iterate: dof map, sparsity pattern, element coloring and
// the boundary/source part of the right-hand side.
class Assembler {
 public:
  explicit Assembler(const ProblemSpec& problem);

  const ProblemSpec& problem() const { return problem_; }
  const std::shared_ptr<const DofMap>& dofs() const { return dofs_; }
  int num_colors() const { return static_cast<int>(colors_.size()); }

  // threads <= 0 selects the serial reference path.
  LinearSystem assemble(std::span<const double> p_tilde, int threads) const;

  // Serial reference: element contributions collected as triplets in
  // `element_order` (default: natural order), then summed per entry.
  LinearSystem assemble_serial(std::span<const double> p_tilde, std::span<const int> element_order = {}) const;

  // Colored OpenMP scatter straight into the precomputed pattern. Elements in
  // one color share no node, so rows are written by one thread at a time.
  LinearSystem assemble_parallel(std::span<const double> p_tilde, int threads) const;

 private:
  ElementSystem compute_element(int e, std::span<const double> p_tilde) const;
  LinearSystem empty_system() const;

  ProblemSpec problem_;
  VectorField forcing_;
  std::shared_ptr<const DofMap> dofs_;
  QuadratureRule rules_[4];
  CsrMatrix pattern_;
  std::vector<std::vector<int>> colors_;
  std::vector<double> static_rhs_;
};

// One-shot assembly with the default backend.
LinearSystem assemble(const ProblemSpec& problem, std::span<const double> p_tilde);

}  // namespace porodarcy
