#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "porodarcy/fem.hpp"

namespace porodarcy {

struct Element {
  ElementKind kind = ElementKind::Line2;
  std::array<int, kMaxElementNodes> nodes{};

  int size() const { return node_count(kind); }
  std::span<const int> connectivity() const { return {nodes.data(), static_cast<std::size_t>(size())}; }
};

struct FacetRef {
  int element = 0;
  int local_facet = 0;

  friend bool operator==(const FacetRef&, const FacetRef&) = default;
  friend auto operator<=>(const FacetRef&, const FacetRef&) = default;
};

using FacetSets = std::map<std::string, std::vector<FacetRef>>;

// Immutable unstructured mesh of linear elements. The constructor checks
// connectivity bounds, element/dimension agreement, positive Jacobians at the
// default quadrature points and that every named facet lies on the boundary.
class Mesh {
 public:
  Mesh(int dim, std::vector<Point> nodes, std::vector<Element> elements, std::vector<int> regions = {},
       FacetSets facet_sets = {});

  int dim() const { return dim_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  const Point& node(int i) const { return nodes_[i]; }
  std::span<const Point> nodes() const { return nodes_; }
  const Element& element(int e) const { return elements_[e]; }
  std::span<const Element> elements() const { return elements_; }
  int region(int e) const { return regions_[e]; }
  std::span<const int> regions() const { return regions_; }
  const FacetSets& facet_sets() const { return facet_sets_; }

  // Throws InvalidArgument for unknown names.
  const std::vector<FacetRef>& facet_set(const std::string& name) const;
  bool has_facet_set(const std::string& name) const { return facet_sets_.contains(name); }

  bool is_boundary_facet(const FacetRef& f) const;
  std::vector<FacetRef> boundary_facets() const;

  // Coordinates of the nodes of element e, in local order.
  std::array<Point, kMaxElementNodes> element_coords(int e) const;
  Point element_centroid(int e) const;
  double element_volume(int e) const;
  double total_volume() const;

  // Global node indices of a facet, in facet-local order.
  std::vector<int> facet_global_nodes(const FacetRef& f) const;

  // Node index within `tol` of x, or -1.
  int find_node(const Point& x, double tol = 1e-10) const;

 private:
  int dim_;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<int> regions_;
  FacetSets facet_sets_;
  std::vector<char> boundary_flags_;  // element * 6 + local facet
};

struct Extent2 {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};
struct Extent3 {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0, z0 = 0.0, z1 = 1.0;
};

// Uniform mesh of (x0, x1) with facet sets "left" and "right".
Mesh generate_interval(int n_elements, double x0 = 0.0, double x1 = 1.0);

// Structured quad4 grid, or the same grid with each cell split along its
// lower-left to upper-right diagonal into two tri3. Facet sets "left",
// "right", "bottom", "top".
Mesh generate_grid_2d(int nx, int ny, ElementKind kind, const Extent2& extent = {});

// Structured hex8 grid with facet sets "left"/"right" (x), "front"/"back" (y)
// and "bottom"/"top" (z).
Mesh generate_grid_3d(int nx, int ny, int nz, const Extent3& extent = {});

using RegionClassifier = std::function<int(const Point& centroid)>;

// Copy of `mesh` with region tags assigned from element centroids.
Mesh tag_regions(const Mesh& mesh, const RegionClassifier& classifier);

// Plain-text mesh exchange format:
//   dim N_nodes N_elems
//   x [y] [z]                      (N_nodes lines)
//   kind i0 i1 ...                 (N_elems lines, 0-based)
//   facetset <name> <count>        followed by <count> "elem local_facet" lines
//   regions t0 t1 ...              (optional)
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace porodarcy
