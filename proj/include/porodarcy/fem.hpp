#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace porodarcy {

using Point = std::array<double, 3>;

enum class ElementKind : std::uint8_t { Line2, Tri3, Quad4, Hex8 };

inline constexpr int kMaxElementNodes = 8;
inline constexpr int kMaxFacetNodes = 4;

int reference_dim(ElementKind kind);
int node_count(ElementKind kind);
int facet_count(ElementKind kind);
double reference_measure(ElementKind kind);

// Element-local node indices of a facet. Line2 facets are single vertices.
std::span<const int> facet_nodes(ElementKind kind, int facet);

std::string_view to_string(ElementKind kind);
ElementKind parse_element_kind(std::string_view name);

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;  // polynomial degree integrated exactly

  std::size_t size() const { return weights.size(); }
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Rule exact for polynomials of total degree <= `degree` on the reference element.
QuadratureRule rule_of_degree(ElementKind kind, int degree);

// Degree-2 rule used by the assembler unless overridden.
QuadratureRule default_rule(ElementKind kind);

inline constexpr int kDefaultQuadratureDegree = 2;

struct ShapeValues {
  std::array<double, kMaxElementNodes> values{};
  std::array<Point, kMaxElementNodes> gradients{};  // unused components are zero
  int count = 0;
};

// Linear Lagrange values and reference gradients at reference point `xi`.
ShapeValues shape_values(ElementKind kind, const Point& xi);

struct PhysicalShape {
  std::array<double, kMaxElementNodes> values{};
  std::array<Point, kMaxElementNodes> gradients{};
  double det_j = 0.0;
  Point x{};  // mapped point
  int count = 0;
};

// Shape values and physical gradients (J^-T times the reference gradients).
// Throws DegenerateElement when det J <= 0.
PhysicalShape physical_gradients(ElementKind kind, std::span<const Point> coords, const Point& xi);

struct FacetPoint {
  std::array<double, kMaxFacetNodes> values{};  // on the facet's nodes, same order as facet_nodes
  Point x{};
  Point normal{};  // outward unit normal
  double weight = 0.0;  // reference weight times surface measure
};

// Quadrature on one facet, exact to `degree` in the facet parameterization.
std::vector<FacetPoint> facet_quadrature(ElementKind kind, std::span<const Point> coords, int facet,
                                         int degree);

Point element_centroid(std::span<const Point> coords);

}  // namespace porodarcy
