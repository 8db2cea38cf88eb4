#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "porodarcy/errors.hpp"
#include "porodarcy/mesh.hpp"

using namespace porodarcy;

namespace {

// Every boundary facet in exactly one named set.
void expect_boundary_partition(const Mesh& mesh) {
  std::map<FacetRef, int> hits;
  for (const auto& [name, facets] : mesh.facet_sets())
    for (const FacetRef& f : facets) ++hits[f];
  const auto boundary = mesh.boundary_facets();
  EXPECT_EQ(hits.size(), boundary.size());
  for (const FacetRef& f : boundary) EXPECT_EQ(hits[f], 1) << "facet " << f.element << ":" << f.local_facet;
}

void expect_positive_jacobians(const Mesh& mesh) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.element(e);
    std::vector<Point> coords;
    for (int n : el.connectivity()) coords.push_back(mesh.node(n));
    for (const Point& xi : default_rule(el.kind).points)
      EXPECT_GT(physical_gradients(el.kind, coords, xi).det_j, 0.0);
  }
}

}  // namespace

TEST(GenerateInterval, SingleElement) {
  const Mesh m = generate_interval(1);
  EXPECT_EQ(m.num_nodes(), 2);
  EXPECT_EQ(m.num_elements(), 1);
  EXPECT_DOUBLE_EQ(m.node(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(m.node(1)[0], 1.0);
}

TEST(GenerateInterval, UniformSpacing) {
  const Mesh m = generate_interval(4);
  ASSERT_EQ(m.num_nodes(), 5);
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m.node(i)[0], 0.25 * i);
  EXPECT_EQ(m.facet_set("left").size(), 1u);
  EXPECT_EQ(m.facet_set("right").size(), 1u);
}

TEST(GenerateInterval, HundredElements) {
  const Mesh m = generate_interval(100);
  EXPECT_EQ(m.num_nodes(), 101);
  double max_gap = 0.0;
  for (int i = 1; i < m.num_nodes(); ++i) max_gap = std::max(max_gap, m.node(i)[0] - m.node(i - 1)[0]);
  EXPECT_NEAR(max_gap, 0.01, 1e-15);
}

TEST(GenerateInterval, ZeroElementsRejected) { EXPECT_THROW(generate_interval(0), InvalidArgument); }

TEST(GenerateGrid2d, SingleQuad) {
  const Mesh m = generate_grid_2d(1, 1, ElementKind::Quad4);
  EXPECT_EQ(m.num_nodes(), 4);
  EXPECT_EQ(m.num_elements(), 1);
}

TEST(GenerateGrid2d, TwentyByTwentyHas441Nodes) {
  const Mesh m = generate_grid_2d(20, 20, ElementKind::Quad4);
  EXPECT_EQ(m.num_nodes(), 441);
  EXPECT_EQ(m.num_elements(), 400);
}

TEST(GenerateGrid2d, TriangleCount) {
  const Mesh m = generate_grid_2d(2, 2, ElementKind::Tri3);
  EXPECT_EQ(m.num_nodes(), 9);
  EXPECT_EQ(m.num_elements(), 8);
}

TEST(GenerateGrid2d, TriangleDiagonalLowerLeftToUpperRight) {
  const Mesh m = generate_grid_2d(3, 2, ElementKind::Tri3, {0, 3, 0, 2});
  for (int e = 0; e < m.num_elements(); ++e) {
    const Point c = m.element_centroid(e);
    const double cx = std::floor(c[0]), cy = std::floor(c[1]);
    std::set<std::pair<double, double>> pts;
    for (int n : m.element(e).connectivity()) pts.insert({m.node(n)[0], m.node(n)[1]});
    EXPECT_TRUE(pts.contains({cx, cy})) << "element " << e;
    EXPECT_TRUE(pts.contains({cx + 1, cy + 1})) << "element " << e;
  }
}

TEST(GenerateGrid2d, DegenerateExtentRejected) {
  EXPECT_THROW(generate_grid_2d(2, 2, ElementKind::Quad4, {0, 0, 0, 1}), InvalidArgument);
  EXPECT_THROW(generate_grid_2d(2, 2, ElementKind::Quad4, {0, 1, 1, 1}), InvalidArgument);
  EXPECT_THROW(generate_grid_2d(0, 2, ElementKind::Quad4), InvalidArgument);
  EXPECT_THROW(generate_grid_2d(2, 2, ElementKind::Hex8), InvalidArgument);
}

TEST(GenerateGrid3d, SingleHex) {
  const Mesh m = generate_grid_3d(1, 1, 1);
  EXPECT_EQ(m.num_nodes(), 8);
  EXPECT_EQ(m.num_elements(), 1);
}

TEST(GenerateGrid3d, FiveCubedUnitCells) {
  const Mesh m = generate_grid_3d(5, 5, 5, {0, 5, 0, 5, 0, 5});
  EXPECT_EQ(m.num_nodes(), 216);
  for (int e = 0; e < m.num_elements(); ++e) EXPECT_NEAR(m.element_volume(e), 1.0, 1e-14);
  for (const char* name : {"left", "right", "front", "back", "bottom", "top"})
    EXPECT_EQ(m.facet_set(name).size(), 25u) << name;
}

TEST(GenerateGrid3d, TwoHexesShareAFace) {
  const Mesh m = generate_grid_3d(2, 1, 1);
  EXPECT_EQ(m.num_nodes(), 12);
  ASSERT_EQ(m.num_elements(), 2);
  const auto a = m.element(0).connectivity(), b = m.element(1).connectivity();
  std::set<int> sa(a.begin(), a.end());
  int shared = 0;
  for (int n : b) shared += sa.contains(n);
  EXPECT_EQ(shared, 4);
}

TEST(GenerateGrid3d, DegenerateExtentRejected) {
  EXPECT_THROW(generate_grid_3d(1, 1, 1, {0, 1, 0, 1, 2, 2}), InvalidArgument);
}

TEST(MeshInvariants, VolumeSumMatchesExtent) {
  EXPECT_NEAR(generate_interval(7, -1.0, 2.5).total_volume(), 3.5, 3.5e-12);
  EXPECT_NEAR(generate_grid_2d(7, 5, ElementKind::Quad4, {0, 3, -1, 1}).total_volume(), 6.0, 6e-12);
  EXPECT_NEAR(generate_grid_2d(7, 5, ElementKind::Tri3, {0, 3, -1, 1}).total_volume(), 6.0, 6e-12);
  EXPECT_NEAR(generate_grid_3d(3, 4, 2, {0, 1, 0, 2, 0, 0.5}).total_volume(), 1.0, 1e-12);
}

TEST(MeshInvariants, BoundaryFacetsPartitionedByNamedSets) {
  expect_boundary_partition(generate_interval(5));
  expect_boundary_partition(generate_grid_2d(4, 3, ElementKind::Quad4));
  expect_boundary_partition(generate_grid_2d(4, 3, ElementKind::Tri3));
  expect_boundary_partition(generate_grid_3d(3, 2, 2));
}

TEST(MeshInvariants, PositiveJacobians) {
  expect_positive_jacobians(generate_interval(5));
  expect_positive_jacobians(generate_grid_2d(4, 3, ElementKind::Quad4));
  expect_positive_jacobians(generate_grid_2d(4, 3, ElementKind::Tri3));
  expect_positive_jacobians(generate_grid_3d(2, 2, 2));
}

TEST(MeshConstruction, RejectsBadConnectivityAndInteriorFacets) {
  const std::vector<Point> nodes = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  Element a{ElementKind::Line2, {0, 1}}, b{ElementKind::Line2, {1, 3}};
  EXPECT_THROW(Mesh(1, nodes, {a, b}), InvalidArgument);
  Element c{ElementKind::Line2, {1, 2}};
  // facet 1 of element 0 is the shared node x = 1
  EXPECT_THROW(Mesh(1, nodes, {a, c}, {}, {{"mid", {{0, 1}}}}), InvalidArgument);
  EXPECT_THROW(Mesh(1, nodes, {a, c}, {1}), InvalidArgument);
  Element backwards{ElementKind::Line2, {1, 0}};
  EXPECT_THROW(Mesh(1, nodes, {backwards}), DegenerateElement);
}

TEST(TagRegions, UniformClassifier) {
  const Mesh m = tag_regions(generate_grid_2d(3, 3, ElementKind::Quad4), [](const Point&) { return 0; });
  for (int e = 0; e < m.num_elements(); ++e) EXPECT_EQ(m.region(e), 0);
}

TEST(TagRegions, CheckerboardQuadrants) {
  const Mesh m = tag_regions(generate_grid_2d(2, 2, ElementKind::Quad4), [](const Point& c) {
    return 1 + (c[0] > 0.5 ? 1 : 0) + (c[1] > 0.5 ? 2 : 0);
  });
  std::multiset<int> tags;
  for (int e = 0; e < m.num_elements(); ++e) tags.insert(m.region(e));
  EXPECT_EQ(tags, (std::multiset<int>{1, 2, 3, 4}));
}

TEST(TagRegions, HalfPlanesLeaveGeometryUnchanged) {
  const Mesh base = generate_grid_2d(6, 2, ElementKind::Tri3, {-3, 3, 0, 1});
  const Mesh m = tag_regions(base, [](const Point& c) { return c[0] < 0 ? 1 : 2; });
  int a = 0;
  for (int e = 0; e < m.num_elements(); ++e) a += m.region(e) == 1;
  EXPECT_EQ(a, m.num_elements() / 2);
  EXPECT_EQ(m.num_nodes(), base.num_nodes());
  EXPECT_EQ(m.facet_sets(), base.facet_sets());
}

TEST(MeshFile, RoundTrip) {
  const Mesh m = tag_regions(generate_grid_3d(2, 2, 1), [](const Point& c) { return c[0] < 0.5 ? 4 : 9; });
  std::stringstream s;
  write_mesh(s, m);
  const Mesh r = read_mesh(s);
  ASSERT_EQ(r.num_nodes(), m.num_nodes());
  ASSERT_EQ(r.num_elements(), m.num_elements());
  for (int i = 0; i < m.num_nodes(); ++i) EXPECT_EQ(r.node(i), m.node(i));
  for (int e = 0; e < m.num_elements(); ++e) {
    EXPECT_EQ(r.region(e), m.region(e));
    EXPECT_TRUE(std::ranges::equal(r.element(e).connectivity(), m.element(e).connectivity()));
  }
  EXPECT_EQ(r.facet_sets(), m.facet_sets());
}

TEST(MeshFile, MalformedInputReportsLine) {
  std::istringstream bad("2 3 1\n0 0\n1 0\n0 1\ntri3 0 1 7\n");
  try {
    read_mesh(bad);
    FAIL() << "expected an error";
  } catch (const Error& ex) {
    SUCCEED() << ex.what();
  }
  std::istringstream junk("2 3 1\n0 0\n1 zero\n0 1\ntri3 0 1 2\n");
  try {
    read_mesh(junk);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& ex) {
    EXPECT_EQ(ex.line(), 3);
  }
}

TEST(MeshFile, ShippedDeskMeshesLoad) {
  for (const char* name : {"regions.mesh", "leakage.mesh"}) {
    const Mesh m = read_mesh_file(std::string(PORODARCY_TEST_DATA_DIR) + "/" + name);
    EXPECT_EQ(m.dim(), 3) << name;
    expect_boundary_partition(m);
  }
}
