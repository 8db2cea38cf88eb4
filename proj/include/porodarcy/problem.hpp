#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "porodarcy/drag.hpp"
#include "porodarcy/mesh.hpp"

namespace porodarcy {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

inline ScalarField constant_field(double value) {
  return [value](const Point&) { return value; };
}

enum class VelocityBcMode {
  NormalFlux,      // value is v.n with n the outward normal
  ComponentValue,  // value is the velocity component along the facet's normal axis
};

// Strongly imposed normal velocity on an axis-aligned facet set. Where a node
// is shared by several sets constraining the same component, the set listed
// last wins.
struct VelocityBc {
  std::string facet_set;
  ScalarField value;
  VelocityBcMode mode = VelocityBcMode::NormalFlux;
};

// Weakly imposed pressure through the -(w.n; p0) boundary term.
struct PressureBc {
  std::string facet_set;
  ScalarField value;
};

struct PressurePin {
  int node = 0;
  double value = 0.0;
};

// Node-collocated volumetric source: positive injects, negative produces.
struct PointSource {
  Point location{};
  double strength = 0.0;
};

// Non-dimensional modified Darcy boundary value problem
//   A alpha(p) v + grad p = C rho b,  div v = sources
// on `mesh`. Every boundary facet must belong to exactly one velocity or
// pressure facet set.
struct ProblemSpec {
  std::shared_ptr<const Mesh> mesh;
  DragModel drag;
  double body_force_scale = 1.0;  // C
  ScalarField density;            // empty means 1
  VectorField body_force;         // empty means zero
  std::vector<VelocityBc> velocity_bcs;
  std::vector<PressureBc> pressure_bcs;
  std::optional<PressurePin> pressure_pin;
  std::vector<PointSource> sources;
  int quadrature_degree = 2;

  bool has_body_force() const { return static_cast<bool>(body_force) && body_force_scale != 0.0; }

  // C rho(x) b(x), or zero.
  Point forcing(const Point& x) const;
};

}  // namespace porodarcy
