#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "porodarcy/assembly.hpp"
#include "porodarcy/errors.hpp"

namespace porodarcy {

DofMap::DofMap(int num_nodes, int dim)
    : num_nodes_(num_nodes), dim_(dim), constrained_(num_nodes * (dim + 1), 0), values_(num_nodes * (dim + 1), 0.0) {
  if (num_nodes < 1 || dim < 1 || dim > 3) throw InvalidArgument("invalid dof map size");
}

void DofMap::constrain(int raw, double value) {
  if (raw < 0 || raw >= num_raw()) throw InvalidArgument("constrained dof out of range");
  constrained_[raw] = 1;
  values_[raw] = value;
  raw_to_free_.clear();
  free_to_raw_.clear();
}

int DofMap::num_constrained() const {
  return static_cast<int>(std::count(constrained_.begin(), constrained_.end(), 1));
}

void DofMap::finalize() {
  raw_to_free_.assign(num_raw(), -1);
  free_to_raw_.clear();
  for (int r = 0; r < num_raw(); ++r) {
    if (constrained_[r]) continue;
    raw_to_free_[r] = static_cast<int>(free_to_raw_.size());
    free_to_raw_.push_back(r);
  }
}

std::vector<double> DofMap::expand(std::span<const double> free_values) const {
  if (static_cast<int>(free_values.size()) != num_free())
    throw InvalidArgument("free-dof vector has wrong length");
  std::vector<double> out(num_raw());
  for (int r = 0; r < num_raw(); ++r) out[r] = constrained_[r] ? values_[r] : free_values[raw_to_free_[r]];
  return out;
}

double CsrMatrix::at(int r, int c) const {
  const auto begin = col_idx.begin() + row_ptr[r];
  const auto end = col_idx.begin() + row_ptr[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  return (it != end && *it == c) ? values[it - col_idx.begin()] : 0.0;
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) sum += values[k] * x[col_idx[k]];
    y[r] = sum;
  }
  return y;
}

namespace {

std::string facet_name(const FacetRef& f) {
  return "(" + std::to_string(f.element) + ", " + std::to_string(f.local_facet) + ")";
}

// Axis index of a facet's outward normal and its sign.
std::pair<int, double> facet_axis(const Mesh& mesh, const FacetRef& f, const std::string& set) {
  const Element& el = mesh.element(f.element);
  const auto coords = mesh.element_coords(f.element);
  const auto points = facet_quadrature(el.kind, {coords.data(), static_cast<std::size_t>(el.size())}, f.local_facet, 1);
  int axis = -1;
  double sign = 0.0;
  for (const FacetPoint& fp : points) {
    int k = -1;
    for (int i = 0; i < mesh.dim(); ++i)
      if (std::abs(std::abs(fp.normal[i]) - 1.0) <= 1e-10) k = i;
    if (k < 0 || (axis >= 0 && k != axis)) {
      std::ostringstream msg;
      msg << "facet " << facet_name(f) << " of set '" << set << "' is not axis aligned (normal " << fp.normal[0]
          << ", " << fp.normal[1] << ", " << fp.normal[2] << "); strong normal velocity needs axis-aligned facets";
      throw UnsupportedGeometry(msg.str());
    }
    axis = k;
    sign = fp.normal[k] > 0.0 ? 1.0 : -1.0;
  }
  return {axis, sign};
}

}  // namespace

void apply_velocity_normal_bc(const Mesh& mesh, const VelocityBc& bc, DofMap& dofs) {
  if (!bc.value) throw InvalidArgument("velocity boundary condition on '" + bc.facet_set + "' has no value");
  for (const FacetRef& f : mesh.facet_set(bc.facet_set)) {
    const auto [axis, sign] = facet_axis(mesh, f, bc.facet_set);
    for (int node : mesh.facet_global_nodes(f)) {
      const double value = bc.value(mesh.node(node));
      const double component = bc.mode == VelocityBcMode::NormalFlux ? sign * value : value;
      dofs.constrain(dofs.raw(node, axis), component);
    }
  }
}

void add_point_sources(LinearSystem& system, std::span<const PointSource> sources, const Mesh& mesh) {
  const DofMap& dofs = *system.dofs;
  for (const PointSource& s : sources) {
    const int node = mesh.find_node(s.location);
    if (node < 0) {
      std::ostringstream msg;
      msg << "point source at (" << s.location[0] << ", " << s.location[1] << ", " << s.location[2]
          << ") does not coincide with a mesh node";
      throw SourcePlacement(msg.str());
    }
    const int free = dofs.free_index(dofs.raw(node, dofs.pressure_field()));
    if (free >= 0) system.rhs[free] -= s.strength;
  }
}

double prescribed_boundary_outflux(const ProblemSpec& problem, const DofMap& dofs) {
  const Mesh& mesh = *problem.mesh;
  // each facet counted once even if listed in several sets
  std::set<FacetRef> facets;
  for (const VelocityBc& bc : problem.velocity_bcs)
    for (const FacetRef& f : mesh.facet_set(bc.facet_set)) facets.insert(f);

  double flux = 0.0;
  for (const FacetRef& f : facets) {
    const Element& el = mesh.element(f.element);
    const auto coords = mesh.element_coords(f.element);
    const auto local = facet_nodes(el.kind, f.local_facet);
    for (const FacetPoint& fp :
         facet_quadrature(el.kind, {coords.data(), static_cast<std::size_t>(el.size())}, f.local_facet, 2)) {
      double vn = 0.0;
      for (std::size_t k = 0; k < local.size(); ++k) {
        const int node = el.nodes[local[k]];
        for (int i = 0; i < mesh.dim(); ++i) {
          const int raw = dofs.raw(node, i);
          if (dofs.is_constrained(raw)) vn += fp.values[k] * dofs.constrained_value(raw) * fp.normal[i];
        }
      }
      flux += vn * fp.weight;
    }
  }
  return flux;
}

void check_compatibility(const ProblemSpec& problem, const DofMap& dofs) {
  if (!problem.pressure_bcs.empty()) return;
  const double outflux = prescribed_boundary_outflux(problem, dofs);
  double sources = 0.0;
  for (const PointSource& s : problem.sources) sources += s.strength;
  const double imbalance = outflux - sources;
  if (std::abs(imbalance) > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "pure-flux problem violates the compatibility condition: boundary outflux " << outflux
        << " minus total source strength " << sources << " = " << imbalance;
    throw CompatibilityError(msg.str());
  }
}

void validate_problem(const ProblemSpec& problem) {
  if (!problem.mesh) throw InvalidArgument("problem has no mesh");
  const Mesh& mesh = *problem.mesh;
  for (int tag : mesh.regions()) problem.drag.alpha0(tag);

  std::set<FacetRef> velocity_facets;
  for (const VelocityBc& bc : problem.velocity_bcs) {
    if (!bc.value) throw InvalidArgument("velocity boundary condition on '" + bc.facet_set + "' has no value");
    for (const FacetRef& f : mesh.facet_set(bc.facet_set)) velocity_facets.insert(f);
  }
  std::set<FacetRef> pressure_facets;
  for (const PressureBc& bc : problem.pressure_bcs) {
    if (!bc.value) throw InvalidArgument("pressure boundary condition on '" + bc.facet_set + "' has no value");
    for (const FacetRef& f : mesh.facet_set(bc.facet_set)) {
      if (velocity_facets.contains(f))
        throw InvalidArgument("facet " + facet_name(f) + " of '" + bc.facet_set +
                              "' carries both a velocity and a pressure condition");
      pressure_facets.insert(f);
    }
  }
  for (const FacetRef& f : mesh.boundary_facets()) {
    if (!velocity_facets.contains(f) && !pressure_facets.contains(f))
      throw InvalidArgument("boundary facet " + facet_name(f) + " has no boundary condition");
  }
  if (problem.pressure_pin &&
      (problem.pressure_pin->node < 0 || problem.pressure_pin->node >= mesh.num_nodes()))
    throw InvalidArgument("pressure pin node out of range");
  if (problem.quadrature_degree < 1) throw InvalidArgument("quadrature degree must be at least 1");
}

DofMap build_dof_map(const ProblemSpec& problem) {
  const Mesh& mesh = *problem.mesh;
  DofMap dofs(mesh.num_nodes(), mesh.dim());
  for (const VelocityBc& bc : problem.velocity_bcs) apply_velocity_normal_bc(mesh, bc, dofs);
  if (problem.pressure_pin) {
    dofs.constrain(dofs.raw(problem.pressure_pin->node, dofs.pressure_field()), problem.pressure_pin->value);
  } else if (problem.pressure_bcs.empty()) {
    dofs.constrain(dofs.raw(0, dofs.pressure_field()), 0.0);
  }
  dofs.finalize();
  return dofs;
}

}  // namespace porodarcy
