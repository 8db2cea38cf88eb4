#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "porodarcy/assembly.hpp"
#include "porodarcy/benchmarks.hpp"
#include "porodarcy/errors.hpp"

using namespace porodarcy;

namespace {

// Independent oracle: evaluate G_stab(test, trial) for every pair of local
// basis functions, term by term, without expanding the stabilization.
struct Basis {
  Point w{};  // vector part
  double q = 0.0;
  Point grad_q{};
  double div_w = 0.0;
};

ElementSystem oracle_element(ElementKind kind, const std::vector<Point>& coords, int region, const DragModel& drag,
                             const VectorField& forcing, const std::vector<double>& p_tilde) {
  const int nd = reference_dim(kind), nf = nd + 1, nen = node_count(kind), n = nen * nf;
  ElementSystem out;
  out.K.setZero(n, n);
  out.f.setZero(n);
  const QuadratureRule rule = default_rule(kind);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const PhysicalShape s = physical_gradients(kind, coords, rule.points[k]);
    const double dv = rule.weights[k] * s.det_j;
    double pt = 0.0;
    for (int a = 0; a < nen; ++a) pt += s.values[a] * p_tilde[a];
    const double al = drag.drag_scale() * drag.alpha(region, pt);

    auto basis = [&](int dof) {
      Basis b;
      const int node = dof / nf, field = dof % nf;
      if (field < nd) {
        b.w[field] = s.values[node];
        b.div_w = s.gradients[node][field];
      } else {
        b.q = s.values[node];
        b.grad_q = s.gradients[node];
      }
      return b;
    };
    for (int r = 0; r < n; ++r) {
      const Basis t = basis(r);
      for (int c = 0; c < n; ++c) {
        const Basis u = basis(c);  // trial: v = u.w, p = u.q
        double galerkin_mass = 0.0, stab = 0.0;
        for (int i = 0; i < nd; ++i) {
          galerkin_mass += t.w[i] * al * u.w[i];
          stab += (al * t.w[i] + t.grad_q[i]) * (1.0 / al) * (al * u.w[i] + u.grad_q[i]);
        }
        const double term = galerkin_mass - t.div_w * u.q - t.q * u.div_w - 0.5 * stab;
        out.K(r, c) += term * dv;
      }
      if (forcing) {
        const Point f = forcing(s.x);
        double lw = 0.0, ls = 0.0;
        for (int i = 0; i < nd; ++i) {
          lw += t.w[i] * f[i];
          ls += (al * t.w[i] + t.grad_q[i]) * (1.0 / al) * f[i];
        }
        out.f(r) += (lw - 0.5 * ls) * dv;
      }
    }
  }
  return out;
}

std::vector<Point> distorted(ElementKind kind, std::mt19937& rng) {
  std::vector<Point> c;
  switch (kind) {
    case ElementKind::Line2: c = {{0.3, 0, 0}, {1.1, 0, 0}}; break;
    case ElementKind::Tri3: c = {{0, 0, 0}, {1.2, 0.1, 0}, {0.3, 0.9, 0}}; break;
    case ElementKind::Quad4: c = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}; break;
    case ElementKind::Hex8: c = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  }
  if (kind == ElementKind::Quad4 || kind == ElementKind::Hex8) {
    std::uniform_real_distribution<double> j(-0.12, 0.12);
    for (Point& p : c)
      for (int d = 0; d < reference_dim(kind); ++d) p[d] += j(rng);
  }
  return c;
}

double max_abs(const ElementMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

// Unit-square flow problem: v_x = 1 through left/right, no flow top/bottom,
// pressure pinned at the top-right corner.
ProblemSpec constant_flow(int n, ElementKind kind, const DragModel& drag) {
  ProblemSpec p;
  p.mesh = share(generate_grid_2d(n, n, kind));
  p.drag = drag;
  p.velocity_bcs = {{"left", constant_field(1.0), VelocityBcMode::ComponentValue},
                    {"right", constant_field(1.0), VelocityBcMode::ComponentValue},
                    {"bottom", constant_field(0.0)},
                    {"top", constant_field(0.0)}};
  p.pressure_pin = PressurePin{p.mesh->find_node({1, 1, 0}), 1.0};
  return p;
}

std::vector<double> random_pressure(int n, std::mt19937& rng, double lo = 0.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> p(n);
  for (double& v : p) v = u(rng);
  return p;
}

void expect_same_system(const LinearSystem& a, const LinearSystem& b, double tol) {
  ASSERT_EQ(a.matrix.rows, b.matrix.rows);
  ASSERT_EQ(a.matrix.row_ptr, b.matrix.row_ptr);
  ASSERT_EQ(a.matrix.col_idx, b.matrix.col_idx);
  double scale = 0.0;
  for (double v : a.matrix.values) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < a.matrix.values.size(); ++k)
    EXPECT_NEAR(a.matrix.values[k], b.matrix.values[k], tol * scale);
  for (std::size_t k = 0; k < a.rhs.size(); ++k) EXPECT_NEAR(a.rhs[k], b.rhs[k], tol * std::max(1.0, scale));
}

}  // namespace

TEST(ElementMatrices, MatchTermByTermOracle) {
  std::mt19937 rng(1);
  const VectorField forcing = [](const Point& x) { return Point{std::sin(x[0]) + x[1], x[0] * x[1] - 0.5, x[2] + 1}; };
  for (ElementKind kind : {ElementKind::Line2, ElementKind::Tri3, ElementKind::Quad4, ElementKind::Hex8}) {
    for (DragLaw law : {DragLaw::Linear, DragLaw::Barus}) {
      const auto coords = distorted(kind, rng);
      const DragModel drag(law, 0.7, 0.3, 1.9);
      const auto pt = random_pressure(node_count(kind), rng);
      const ElementSystem got = element_matrices(kind, coords, 0, default_rule(kind), drag, forcing, pt);
      const ElementSystem want = oracle_element(kind, coords, 0, drag, forcing, pt);
      const double scale = max_abs(want.K);
      EXPECT_LE((got.K - want.K).cwiseAbs().maxCoeff(), 1e-14 * scale) << to_string(kind);
      EXPECT_LE((got.f - want.f).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, want.f.cwiseAbs().maxCoeff()))
          << to_string(kind);
    }
  }
}

TEST(ElementMatrices, UnitQuadConstantDragBlocks) {
  // bilinear mass and stiffness matrices of the unit square, by hand
  const double mass[4][4] = {{4, 2, 1, 2}, {2, 4, 2, 1}, {1, 2, 4, 2}, {2, 1, 2, 4}};
  const double stiff[4][4] = {{4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};
  const std::vector<Point> c = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const std::vector<double> pt(4, 3.0);
  const ElementSystem e =
      element_matrices(ElementKind::Quad4, c, 0, default_rule(ElementKind::Quad4), DragModel(DragLaw::Barus, 1.0, 0.0),
                       {}, pt);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      EXPECT_NEAR(e.K(a * 3, b * 3), 0.5 * mass[a][b] / 36.0, 1e-15);
      EXPECT_NEAR(e.K(a * 3 + 1, b * 3 + 1), 0.5 * mass[a][b] / 36.0, 1e-15);
      EXPECT_NEAR(e.K(a * 3, b * 3 + 1), 0.0, 1e-15);
      EXPECT_NEAR(e.K(a * 3 + 2, b * 3 + 2), -0.5 * stiff[a][b] / 6.0, 1e-15);
    }
  EXPECT_LE((e.K - e.K.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(e.f.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ElementMatrices, ConstantPreviousPressureEqualsScaledAlpha0) {
  std::mt19937 rng(2);
  for (ElementKind kind : {ElementKind::Tri3, ElementKind::Quad4, ElementKind::Hex8}) {
    const auto c = distorted(kind, rng);
    const std::vector<double> pt(node_count(kind), 1.7);
    const ElementSystem barus =
        element_matrices(kind, c, 0, default_rule(kind), DragModel(DragLaw::Barus, 0.8, 0.4), {}, pt);
    const ElementSystem frozen = element_matrices(kind, c, 0, default_rule(kind),
                                                  DragModel(DragLaw::Barus, 0.8 * std::exp(0.4 * 1.7), 0.0), {}, pt);
    EXPECT_LE((barus.K - frozen.K).cwiseAbs().maxCoeff(), 1e-14 * max_abs(barus.K)) << to_string(kind);
  }
}

TEST(ElementMatrices, ManufacturedBodyForceLoad) {
  const BenchmarkCase bc = manufactured_problem(4);
  const Mesh& mesh = *bc.problem.mesh;
  // an interior element of the 4x4 grid
  int e = 0;
  for (; e < mesh.num_elements(); ++e) {
    const Point c = mesh.element_centroid(e);
    if (std::abs(c[0] - 0.375) < 1e-12 && std::abs(c[1] - 0.625) < 1e-12) break;
  }
  ASSERT_LT(e, mesh.num_elements());
  std::vector<Point> coords;
  std::vector<double> pt;
  for (int n : mesh.element(e).connectivity()) {
    coords.push_back(mesh.node(n));
    pt.push_back(bc.exact.pressure(mesh.node(n)));
  }
  const VectorField forcing = [&](const Point& x) { return bc.problem.forcing(x); };
  const ElementSystem got = element_matrices(ElementKind::Quad4, coords, 0, default_rule(ElementKind::Quad4),
                                             bc.problem.drag, forcing, pt);
  const ElementSystem want = oracle_element(ElementKind::Quad4, coords, 0, bc.problem.drag, forcing, pt);
  EXPECT_LE((got.f - want.f).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(want.f.cwiseAbs().maxCoeff(), 1e-3);
}

TEST(BoundaryPressureTerm, ZeroPressureGivesZero) {
  const Mesh m = generate_grid_2d(2, 2, ElementKind::Quad4);
  for (const FacetRef& f : m.facet_set("right"))
    EXPECT_EQ(boundary_pressure_term(m, f, constant_field(0.0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BoundaryPressureTerm, OneDimensionalLeftEnd) {
  const Mesh m = generate_interval(4);
  const FacetRef f = m.facet_set("left").front();
  const ElementVector v = boundary_pressure_term(m, f, constant_field(200.0));
  // node 0's velocity dof gets -(w n) p0 with n = -1
  EXPECT_DOUBLE_EQ(v(0), 200.0);
  EXPECT_EQ(v(1), 0.0);
  EXPECT_EQ(v(2), 0.0);
  EXPECT_EQ(v(3), 0.0);
}

TEST(BoundaryPressureTerm, UnitSquareRightEdge) {
  const Mesh m = generate_grid_2d(1, 1, ElementKind::Quad4);
  const FacetRef f = m.facet_set("right").front();
  const ElementVector v = boundary_pressure_term(m, f, constant_field(1.0));
  const auto local = facet_nodes(ElementKind::Quad4, f.local_facet);
  for (int a = 0; a < 4; ++a) {
    const bool on_edge = std::ranges::find(local, a) != local.end();
    EXPECT_NEAR(v(a * 3), on_edge ? -0.5 : 0.0, 1e-15);
    EXPECT_EQ(v(a * 3 + 1), 0.0);
    EXPECT_EQ(v(a * 3 + 2), 0.0);
  }
}

TEST(BoundaryPressureTerm, InteriorFacetRejected) {
  const Mesh m = generate_grid_2d(2, 1, ElementKind::Quad4);
  EXPECT_THROW(boundary_pressure_term(m, FacetRef{0, 1}, constant_field(1.0)), InvalidArgument);
}

TEST(VelocityBc, NoFlowTopBottom) {
  const Mesh m = generate_grid_2d(2, 2, ElementKind::Quad4);
  DofMap dofs(m.num_nodes(), 2);
  apply_velocity_normal_bc(m, {"top", constant_field(0.0)}, dofs);
  apply_velocity_normal_bc(m, {"bottom", constant_field(0.0)}, dofs);
  EXPECT_EQ(dofs.num_constrained(), 6);
  for (int n = 0; n < m.num_nodes(); ++n) {
    const double y = m.node(n)[1];
    EXPECT_EQ(dofs.is_constrained(dofs.raw(n, 1)), y == 0.0 || y == 1.0);
    EXPECT_FALSE(dofs.is_constrained(dofs.raw(n, 0)));
  }
}

TEST(VelocityBc, CubeComponentValueAndNormalFluxSigns) {
  const Mesh m = generate_grid_3d(5, 5, 5, {0, 5, 0, 5, 0, 5});
  DofMap comp(m.num_nodes(), 3);
  apply_velocity_normal_bc(m, {"left", constant_field(1.0), VelocityBcMode::ComponentValue}, comp);
  apply_velocity_normal_bc(m, {"right", constant_field(1.0), VelocityBcMode::ComponentValue}, comp);
  DofMap flux(m.num_nodes(), 3);
  apply_velocity_normal_bc(m, {"left", constant_field(-1.0)}, flux);  // inflow
  apply_velocity_normal_bc(m, {"right", constant_field(1.0)}, flux);  // outflow
  for (int n = 0; n < m.num_nodes(); ++n) {
    const double x = m.node(n)[0];
    if (x != 0.0 && x != 5.0) continue;
    EXPECT_EQ(comp.constrained_value(comp.raw(n, 0)), 1.0);
    EXPECT_EQ(flux.constrained_value(flux.raw(n, 0)), 1.0);
  }
  EXPECT_EQ(comp.num_constrained(), 72);
}

TEST(VelocityBc, CornerNodeGetsBothComponents) {
  const Mesh m = generate_grid_2d(2, 2, ElementKind::Quad4);
  DofMap dofs(m.num_nodes(), 2);
  apply_velocity_normal_bc(m, {"left", constant_field(0.0)}, dofs);
  apply_velocity_normal_bc(m, {"bottom", constant_field(0.0)}, dofs);
  const int corner = m.find_node({0, 0, 0});
  EXPECT_TRUE(dofs.is_constrained(dofs.raw(corner, 0)));
  EXPECT_TRUE(dofs.is_constrained(dofs.raw(corner, 1)));
  EXPECT_FALSE(dofs.is_constrained(dofs.raw(corner, 2)));
}

TEST(VelocityBc, LastListedSetWinsOnSharedNodes) {
  const Mesh m = generate_grid_2d(2, 2, ElementKind::Quad4);
  DofMap dofs(m.num_nodes(), 2);
  apply_velocity_normal_bc(m, {"right", constant_field(2.0), VelocityBcMode::ComponentValue}, dofs);
  apply_velocity_normal_bc(m, {"right", constant_field(5.0), VelocityBcMode::ComponentValue}, dofs);
  EXPECT_EQ(dofs.constrained_value(dofs.raw(m.find_node({1, 0, 0}), 0)), 5.0);
}

TEST(VelocityBc, SlantedFacetRejected) {
  const std::vector<Point> nodes = {{0, 0, 0}, {1, 0, 0}, {0.3, 1, 0}};
  const Mesh m(2, nodes, {Element{ElementKind::Tri3, {0, 1, 2}}}, {}, {{"slant", {{0, 1}}}});
  DofMap dofs(3, 2);
  EXPECT_THROW(apply_velocity_normal_bc(m, {"slant", constant_field(0.0)}, dofs), UnsupportedGeometry);
}

namespace {

ProblemSpec five_spot(int n, double beta, double source) {
  ProblemSpec p;
  p.mesh = share(generate_grid_2d(n, n, ElementKind::Quad4));
  p.drag = DragModel(DragLaw::Barus, 1.0, beta);
  for (const char* s : {"left", "right", "bottom", "top"}) p.velocity_bcs.push_back({s, constant_field(0.0)});
  p.sources = {{{0, 0, 0}, source}, {{1, 1, 0}, -source}};
  p.pressure_pin = PressurePin{p.mesh->find_node({1, 1, 0}), 0.0};
  return p;
}

}  // namespace

TEST(PointSources, ZeroStrengthLeavesSystemUnchanged) {
  const ProblemSpec p = five_spot(4, 0.0, 0.25);
  const std::vector<double> pt(p.mesh->num_nodes(), 0.0);
  LinearSystem a = assemble(p, pt), b = a;
  const PointSource none[] = {{{0.5, 0.5, 0}, 0.0}};
  add_point_sources(b, none, *p.mesh);
  EXPECT_EQ(a.rhs, b.rhs);
}

TEST(PointSources, QuarterStrengthsAtOppositeCorners) {
  ProblemSpec with = five_spot(4, 0.0, 0.25), without = five_spot(4, 0.0, 0.25);
  without.sources.clear();
  with.pressure_pin = without.pressure_pin = PressurePin{with.mesh->find_node({0.5, 0.5, 0}), 0.0};
  const std::vector<double> pt(with.mesh->num_nodes(), 0.0);
  const LinearSystem a = assemble(with, pt), b = assemble(without, pt);
  std::vector<double> diff;
  for (std::size_t k = 0; k < a.rhs.size(); ++k)
    if (a.rhs[k] != b.rhs[k]) diff.push_back(a.rhs[k] - b.rhs[k]);
  ASSERT_EQ(diff.size(), 2u);
  std::ranges::sort(diff);
  EXPECT_DOUBLE_EQ(diff[0], -0.25);
  EXPECT_DOUBLE_EQ(diff[1], 0.25);
}

TEST(PointSources, OffNodeLocationRejected) {
  ProblemSpec p = five_spot(4, 0.0, 0.25);
  p.sources = {{{0.1, 0.0, 0}, 0.25}, {{0.9, 1.0, 0}, -0.25}};
  EXPECT_THROW(Assembler{p}, SourcePlacement);
}

TEST(PointSources, UnbalancedPureFluxProblemRejected) {
  ProblemSpec p = five_spot(4, 0.0, 0.25);
  p.sources = {{{0, 0, 0}, 1.0}};
  EXPECT_THROW(Assembler{p}, CompatibilityError);
}

TEST(PointSources, InjectionCornerHasHighestPressure) {
  // sign oracle for the source convention: beta = 0 five-spot
  const ProblemSpec p = five_spot(8, 0.0, 0.25);
  const auto r = run_picard(p, SolverConfig{});
  const auto& pr = r.solution.pressure;
  EXPECT_EQ(std::ranges::max_element(pr) - pr.begin(), p.mesh->find_node({0, 0, 0}));
  EXPECT_EQ(std::ranges::min_element(pr) - pr.begin(), p.mesh->find_node({1, 1, 0}));
}

TEST(Assemble, OneDimensionalDofCount) {
  ProblemSpec p;
  p.mesh = share(generate_interval(4));
  p.drag = DragModel(DragLaw::Barus, 1.0, 0.0);
  p.pressure_bcs = {{"left", constant_field(200.0)}, {"right", constant_field(1.0)}};
  const DofMap dofs = build_dof_map(p);
  EXPECT_EQ(dofs.num_free(), 10);
  EXPECT_EQ(dofs.num_constrained(), 0);
}

TEST(Assemble, ConstantFlowConstraints) {
  const ProblemSpec p = constant_flow(2, ElementKind::Quad4, DragModel(DragLaw::Barus, 1.0, 0.1));
  const DofMap dofs = build_dof_map(p);
  int vx = 0, vy = 0;
  for (int n = 0; n < p.mesh->num_nodes(); ++n) {
    vx += dofs.is_constrained(dofs.raw(n, 0));
    vy += dofs.is_constrained(dofs.raw(n, 1));
  }
  EXPECT_EQ(vx, 6);
  EXPECT_EQ(vy, 6);
  const int corner = p.mesh->find_node({1, 1, 0});
  EXPECT_TRUE(dofs.is_constrained(dofs.raw(corner, 2)));
  EXPECT_EQ(dofs.constrained_value(dofs.raw(corner, 2)), 1.0);
}

TEST(Assemble, PureFluxWithoutPinPinsNodeZero) {
  ProblemSpec p = five_spot(3, 0.0, 0.25);
  p.pressure_pin.reset();
  const DofMap dofs = build_dof_map(p);
  EXPECT_TRUE(dofs.is_constrained(dofs.raw(0, 2)));
  EXPECT_EQ(dofs.constrained_value(dofs.raw(0, 2)), 0.0);
}

TEST(Assemble, UncoveredBoundaryRejected) {
  ProblemSpec p = five_spot(3, 0.0, 0.25);
  p.velocity_bcs.pop_back();
  EXPECT_THROW(validate_problem(p), InvalidArgument);
}

TEST(Assemble, ZeroBetaIndependentOfPreviousPressure) {
  std::mt19937 rng(4);
  const ProblemSpec p = constant_flow(5, ElementKind::Tri3, DragModel(DragLaw::Barus, 1.0, 0.0));
  const Assembler as(p);
  const int n = p.mesh->num_nodes();
  const LinearSystem a = as.assemble_serial(std::vector<double>(n, 0.0));
  const LinearSystem b = as.assemble_serial(random_pressure(n, rng, -5, 5));
  EXPECT_EQ(a.matrix.values, b.matrix.values);
  EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assemble, ZeroBetaMatrixSymmetric) {
  for (ElementKind kind : {ElementKind::Tri3, ElementKind::Quad4}) {
    const ProblemSpec p = five_spot(6, 0.0, 0.25);
    ProblemSpec q = p;
    q.mesh = share(generate_grid_2d(6, 6, kind));
    q.pressure_pin = PressurePin{q.mesh->find_node({1, 1, 0}), 0.0};
    const LinearSystem s = assemble(q, std::vector<double>(q.mesh->num_nodes(), 0.0));
    const CsrMatrix& m = s.matrix;
    double scale = 0.0;
    for (double v : m.values) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < m.rows; ++r)
      for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
        EXPECT_NEAR(m.values[k], m.at(m.col_idx[k], r), 1e-13 * scale);
  }
}

TEST(Assemble, SerialParallelAndPermutedAgree) {
  std::mt19937 rng(8);
  ProblemSpec p;
  p.mesh = share(tag_regions(generate_grid_3d(4, 3, 3), [](const Point& c) { return c[0] < 0.5 ? 1 : 2; }));
  p.drag = DragModel(DragLaw::Barus, {{1, 1.0}, {2, 0.01}}, 0.4);
  p.velocity_bcs = {{"left", constant_field(-1.0)}, {"front", constant_field(0.0)}, {"back", constant_field(0.0)},
                    {"bottom", constant_field(0.0)}, {"top", constant_field(0.0)}};
  p.pressure_bcs = {{"right", [](const Point& x) { return 0.5 + x[1]; }}};
  p.body_force = [](const Point& x) { return Point{x[2], 1.0, -x[0]}; };
  const Assembler as(p);
  const auto pt = random_pressure(p.mesh->num_nodes(), rng);
  const LinearSystem serial = as.assemble_serial(pt);
  std::vector<int> order(p.mesh->num_elements());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::shuffle(order, rng);
  expect_same_system(serial, as.assemble_serial(pt, order), 1e-14);
  for (int threads : {1, 2, 4}) expect_same_system(serial, as.assemble_parallel(pt, threads), 1e-14);
  EXPECT_GT(as.num_colors(), 1);
}

TEST(Assemble, ParallelIsDeterministic) {
  std::mt19937 rng(12);
  const ProblemSpec p = constant_flow(12, ElementKind::Quad4, DragModel(DragLaw::Barus, 1.0, 0.2));
  const Assembler as(p);
  const auto pt = random_pressure(p.mesh->num_nodes(), rng);
  const LinearSystem a = as.assemble_parallel(pt, 3), b = as.assemble_parallel(pt, 3);
  EXPECT_EQ(a.matrix.values, b.matrix.values);
  EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assemble, LinearExactSolutionHasZeroResidual) {
  // beta = 0, alpha0 = 1: v = (1, 0), p = 2 - x satisfies the system exactly
  for (ElementKind kind : {ElementKind::Tri3, ElementKind::Quad4}) {
    const ProblemSpec p = constant_flow(5, kind, DragModel(DragLaw::Barus, 1.0, 0.0));
    const LinearSystem s = assemble(p, std::vector<double>(p.mesh->num_nodes(), 0.0));
    const DofMap& dofs = *s.dofs;
    std::vector<double> x(dofs.num_free());
    for (int f = 0; f < dofs.num_free(); ++f) {
      const int raw = dofs.raw_of_free(f);
      const int node = raw / dofs.fields(), field = raw % dofs.fields();
      x[f] = field == 0 ? 1.0 : field == 1 ? 0.0 : 2.0 - p.mesh->node(node)[0];
    }
    const auto ax = s.matrix.multiply(x);
    double res = 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) res = std::max(res, std::abs(ax[k] - s.rhs[k]));
    EXPECT_LE(res, 1e-12) << to_string(kind);
  }
}

TEST(Assemble, PreviousPressureLengthChecked) {
  const ProblemSpec p = constant_flow(2, ElementKind::Quad4, DragModel(DragLaw::Barus, 1.0, 0.1));
  EXPECT_THROW(assemble(p, std::vector<double>(3, 0.0)), InvalidArgument);
}
