#include "porodarcy/assembly.hpp"
#include "porodarcy/errors.hpp"

namespace porodarcy {

Point ProblemSpec::forcing(const Point& x) const {
  if (!has_body_force()) return {0.0, 0.0, 0.0};
  const double rho = density ? density(x) : 1.0;
  Point b = body_force(x);
  for (double& c : b) c *= body_force_scale * rho;
  return b;
}

ElementSystem element_matrices(ElementKind kind, std::span<const Point> coords, int region,
                               const QuadratureRule& rule, const DragModel& drag, const VectorField& forcing,
                               std::span<const double> p_tilde_nodal) {
  const int nd = reference_dim(kind);
  const int nf = nd + 1;
  const int nen = node_count(kind);
  const int n = nen * nf;
  if (static_cast<int>(p_tilde_nodal.size()) != nen)
    throw InvalidArgument("previous pressure must be given at every element node");

  ElementSystem out;
  out.K.setZero(n, n);
  out.f.setZero(n);
  const double scale = drag.drag_scale();

  for (std::size_t q = 0; q < rule.size(); ++q) {
    const PhysicalShape s = physical_gradients(kind, coords, rule.points[q]);
    const double dv = rule.weights[q] * s.det_j;

    double p_tilde = 0.0;
    for (int a = 0; a < nen; ++a) p_tilde += s.values[a] * p_tilde_nodal[a];
    const double a_drag = scale * drag.alpha(region, p_tilde);
    const double a_inv = 1.0 / a_drag;

    // Expanding the stabilization term leaves 1/2 of the velocity mass and
    // adds -1/2 (w; grad p), -1/2 (grad q; v), -1/2 (grad q; a^-1 grad p).
    for (int a = 0; a < nen; ++a) {
      const double na = s.values[a];
      const Point& ga = s.gradients[a];
      const int pa = a * nf + nd;
      for (int b = 0; b < nen; ++b) {
        const double nb = s.values[b];
        const Point& gb = s.gradients[b];
        const int pb = b * nf + nd;
        const double mass = 0.5 * a_drag * na * nb * dv;
        double grad_grad = 0.0;
        for (int i = 0; i < nd; ++i) {
          out.K(a * nf + i, b * nf + i) += mass;
          out.K(a * nf + i, pb) += (-ga[i] * nb - 0.5 * na * gb[i]) * dv;
          out.K(pa, b * nf + i) += (-na * gb[i] - 0.5 * ga[i] * nb) * dv;
          grad_grad += ga[i] * gb[i];
        }
        out.K(pa, pb) += -0.5 * a_inv * grad_grad * dv;
      }
    }

    if (forcing) {
      const Point f = forcing(s.x);
      for (int a = 0; a < nen; ++a) {
        double grad_f = 0.0;
        for (int i = 0; i < nd; ++i) {
          out.f(a * nf + i) += 0.5 * s.values[a] * f[i] * dv;
          grad_f += s.gradients[a][i] * f[i];
        }
        out.f(a * nf + nd) += -0.5 * a_inv * grad_f * dv;
      }
    }
  }
  return out;
}

ElementVector boundary_pressure_term(const Mesh& mesh, const FacetRef& facet, const ScalarField& p0,
                                     int degree) {
  if (!mesh.is_boundary_facet(facet)) {
    throw InvalidArgument("facet (" + std::to_string(facet.element) + ", " + std::to_string(facet.local_facet) +
                          ") is not on the boundary");
  }
  const Element& el = mesh.element(facet.element);
  const int nd = mesh.dim();
  const int nf = nd + 1;
  ElementVector fe = ElementVector::Zero(el.size() * nf);
  const auto coords = mesh.element_coords(facet.element);
  const auto local = facet_nodes(el.kind, facet.local_facet);
  for (const FacetPoint& fp : facet_quadrature(el.kind, {coords.data(), static_cast<std::size_t>(el.size())},
                                               facet.local_facet, degree)) {
    const double value = p0(fp.x);
    if (value == 0.0) continue;
    for (std::size_t k = 0; k < local.size(); ++k)
      for (int i = 0; i < nd; ++i) fe(local[k] * nf + i) -= fp.values[k] * fp.normal[i] * value * fp.weight;
  }
  return fe;
}

}  // namespace porodarcy
