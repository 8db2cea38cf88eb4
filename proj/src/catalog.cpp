#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "porodarcy/benchmarks.hpp"
#include "porodarcy/errors.hpp"

#ifndef PORODARCY_SOURCE_DATA_DIR
#define PORODARCY_SOURCE_DATA_DIR "data"
#endif

namespace porodarcy {

namespace {

// regions problem (linear drag)
constexpr double kRegionsAlphaA = 0.001;
constexpr double kRegionsAlphaB = 1.0;
constexpr double kRegionsFarField = 1.0;
constexpr double kRegionsWell = 3.333e-4;

// leakage problem (Barus drag)
constexpr double kAquiferAlpha = 1.0;
constexpr double kWellAlpha = 100.0;
constexpr double kAquiferAPressure = 1.0;
constexpr double kAquiferBPressure = 0.95;
constexpr double kInflowVelocity = 0.262;
constexpr double kInjectionNeighbourhood = 1.0;

enum Region { kRegionA = 1, kRegionB = 2, kAbandonedWell = 3 };

DragModel uniform_drag(DragLaw law, double alpha0, double beta, const ProblemOptions& o) {
  DragModel d(o.law.value_or(law), alpha0, o.beta.value_or(beta), o.drag_scale.value_or(1.0));
  for (const auto& [region, value] : o.alpha0) d = d.with_alpha0(region, value);
  return d;
}

DragModel region_drag(DragLaw law, std::map<int, double> alpha0, double beta, const ProblemOptions& o) {
  for (const auto& [region, value] : o.alpha0) alpha0[region] = value;
  return {o.law.value_or(law), std::move(alpha0), o.beta.value_or(beta), o.drag_scale.value_or(1.0)};
}

void apply_solver_options(PackagedProblem& p, double eps_tol, int max_iters, const ProblemOptions& o) {
  p.config.eps_tol = o.eps_tol.value_or(eps_tol);
  p.config.max_iters = o.max_iters.value_or(max_iters);
  if (o.quadrature_degree) p.spec.quadrature_degree = *o.quadrature_degree;
}

ElementKind planar_element(const ProblemOptions& o) {
  const ElementKind kind = o.element.value_or(ElementKind::Quad4);
  if (kind != ElementKind::Quad4 && kind != ElementKind::Tri3)
    throw InvalidArgument("this problem needs tri3 or quad4 elements, got " + std::string(to_string(kind)));
  return kind;
}

void require_element(const ProblemOptions& o, ElementKind kind, const std::string& name) {
  if (o.element && *o.element != kind)
    throw InvalidArgument(name + " only supports " + std::string(to_string(kind)) + " elements");
}

void reject_mesh_options(const ProblemOptions& o, const std::string& name) {
  if (o.resolution || o.element) throw InvalidArgument(name + " uses a shipped mesh; resolution and element are fixed");
}

int resolution(const ProblemOptions& o, int fallback) {
  const int n = o.resolution.value_or(fallback);
  if (n < 1) throw InvalidArgument("resolution must be at least 1");
  return n;
}

std::shared_ptr<const Mesh> shipped_mesh(const ProblemOptions& o, const std::string& file) {
  const std::filesystem::path path = std::filesystem::path(o.data_dir.value_or(default_data_dir())) / file;
  if (!std::filesystem::exists(path))
    throw InvalidArgument("mesh file " + path.string() + " not found (set PORODARCY_DATA_DIR)");
  return std::make_shared<Mesh>(read_mesh_file(path.string()));
}

void no_flow(ProblemSpec& spec, std::initializer_list<const char*> sets) {
  for (const char* s : sets) spec.velocity_bcs.push_back({s, constant_field(0.0)});
}

PackagedProblem one_d(const ProblemOptions& o) {
  require_element(o, ElementKind::Line2, "oneD");
  constexpr double p1 = 200.0, p2 = 1.0;
  PackagedProblem p;
  p.name = "oneD";
  p.description = "1D pressure-driven flow, p(0)=200, p(1)=1, closed-form solution";
  p.spec.mesh = std::make_shared<Mesh>(generate_interval(resolution(o, 100)));
  p.spec.drag = uniform_drag(DragLaw::Barus, 1.0, 0.02, o);
  p.spec.pressure_bcs = {{"left", constant_field(p1)}, {"right", constant_field(p2)}};
  apply_solver_options(p, 1e-10, 500, o);
  p.openings = {{"inflow", p.spec.mesh->facet_set("left"), -1.0}, {"outflow", p.spec.mesh->facet_set("right"), 1.0}};

  AnalyticSolution ex;
  const DragModel d = p.spec.drag;
  ex.drag = d;
  ex.body_force_scale = 0.0;
  ex.pressure = [d](const Point& x) {
    return analytic_1d(d.law(), d.alpha0(0), d.beta(), d.drag_scale(), p1, p2, x[0]).pressure;
  };
  ex.velocity = [d](const Point& x) {
    return Point{analytic_1d(d.law(), d.alpha0(0), d.beta(), d.drag_scale(), p1, p2, x[0]).velocity, 0.0, 0.0};
  };
  ex.pressure_gradient = [d](const Point& x) {
    return Point{analytic_1d_pressure_gradient(d.law(), d.alpha0(0), d.beta(), d.drag_scale(), p1, p2, x[0]), 0.0,
                 0.0};
  };
  p.exact = ex;
  return p;
}

PackagedProblem constant_2d(const ProblemOptions& o) {
  constexpr double p0 = 1.0;
  const int n = resolution(o, 20);
  PackagedProblem p;
  p.name = "constant2d";
  p.description = "unit flow along x on the unit square, p=1 at the top-right corner";
  p.spec.mesh = std::make_shared<Mesh>(generate_grid_2d(n, n, planar_element(o)));
  p.spec.drag = uniform_drag(DragLaw::Barus, 1.0, 0.1, o);
  p.spec.velocity_bcs = {{"left", constant_field(1.0), VelocityBcMode::ComponentValue},
                         {"right", constant_field(1.0), VelocityBcMode::ComponentValue},
                         {"bottom", constant_field(0.0)},
                         {"top", constant_field(0.0)}};
  p.spec.pressure_pin = PressurePin{p.spec.mesh->find_node({1.0, 1.0, 0.0}), p0};
  apply_solver_options(p, 1e-10, 500, o);
  p.openings = {{"inflow", p.spec.mesh->facet_set("left"), -1.0}};

  const DragModel d = p.spec.drag;
  if (d.law() == DragLaw::Barus && d.alpha0_map().empty() && d.drag_scale() == 1.0) {
    AnalyticSolution ex;
    ex.drag = d;
    ex.body_force_scale = 0.0;
    const double a0 = d.alpha0(0), beta = d.beta();
    ex.pressure = [a0, beta](const Point& x) { return analytic_constant_flow_2d(a0, beta, p0, x[0]); };
    ex.velocity = [](const Point&) { return Point{1.0, 0.0, 0.0}; };
    ex.pressure_gradient = [a0, beta](const Point& x) {
      if (beta == 0.0) return Point{-a0, 0.0, 0.0};
      const double arg = 1.0 - a0 * beta * (1.0 - x[0]) * std::exp(beta * p0);
      return Point{-a0 * std::exp(beta * p0) / arg, 0.0, 0.0};
    };
    p.exact = ex;
  }
  return p;
}

void five_spot_setup(PackagedProblem& p, const ProblemOptions& o) {
  const int n = resolution(o, 20);
  auto mesh = generate_grid_2d(n, n, planar_element(o));
  if (p.name == "checkerboard") {
    mesh = tag_regions(mesh, [](const Point& c) {
      const bool right = c[0] > 0.5, top = c[1] > 0.5;
      if (!right && !top) return 1;  // I
      if (right && !top) return 2;   // II
      if (!right && top) return 3;   // III
      return 4;                      // IV
    });
  }
  p.spec.mesh = std::make_shared<Mesh>(std::move(mesh));
  no_flow(p.spec, {"left", "right", "bottom", "top"});
  p.spec.sources = {{{0.0, 0.0, 0.0}, 0.25}, {{1.0, 1.0, 0.0}, -0.25}};
  p.spec.pressure_pin = PressurePin{p.spec.mesh->find_node({1.0, 1.0, 0.0}), 0.0};
  const int inj = p.spec.mesh->find_node({0.0, 0.0, 0.0});
  p.derived = [inj](const Measurements&, const SolutionField& s) {
    return Measurements{{"injection_pressure", s.pressure[inj]}};
  };
}

PackagedProblem five_spot(const ProblemOptions& o) {
  PackagedProblem p;
  p.name = "fivespot";
  p.description = "quarter five-spot: +1/4 source at (0,0), -1/4 at (1,1), no-flow edges";
  five_spot_setup(p, o);
  p.spec.drag = uniform_drag(DragLaw::Barus, 1.0, 0.3, o);
  apply_solver_options(p, 1e-10, 500, o);
  return p;
}

PackagedProblem checkerboard(const ProblemOptions& o) {
  PackagedProblem p;
  p.name = "checkerboard";
  p.description = "five-spot geometry, alpha0 = 1 in quadrants I/IV and 0.001 in II/III";
  five_spot_setup(p, o);
  p.spec.drag = region_drag(DragLaw::Barus, {{1, 1.0}, {2, 0.001}, {3, 0.001}, {4, 1.0}}, 0.3, o);
  apply_solver_options(p, 1e-9, 500, o);
  return p;
}

PackagedProblem mms(const ProblemOptions& o) {
  const ElementKind kind = planar_element(o);
  BenchmarkCase c = manufactured_problem(resolution(o, 16), kind, o.beta.value_or(0.5));
  PackagedProblem p;
  p.name = "mms";
  p.description = "manufactured solution p = x^2 y^2 on the unit square, Barus drag";
  p.spec = c.problem;
  if (o.law || o.drag_scale || !o.alpha0.empty())
    throw InvalidArgument("mms fixes the drag law, drag scale and alpha0 of its exact solution");
  apply_solver_options(p, c.config.eps_tol, c.config.max_iters, o);
  p.exact = c.exact;
  return p;
}

PackagedProblem patch_3d(const ProblemOptions& o) {
  require_element(o, ElementKind::Hex8, "patch3d");
  const int n = resolution(o, 5);
  PackagedProblem p;
  p.name = "patch3d";
  p.description = "unit flow along x through (0,5)^3, p=0 at the origin";
  p.spec.mesh = std::make_shared<Mesh>(generate_grid_3d(n, n, n, {0.0, 5.0, 0.0, 5.0, 0.0, 5.0}));
  p.spec.drag = uniform_drag(DragLaw::Barus, 1.0, 0.1, o);
  p.spec.velocity_bcs = {{"left", constant_field(1.0), VelocityBcMode::ComponentValue},
                         {"right", constant_field(1.0), VelocityBcMode::ComponentValue}};
  no_flow(p.spec, {"front", "back", "bottom", "top"});
  p.spec.pressure_pin = PressurePin{p.spec.mesh->find_node({0.0, 0.0, 0.0}), 0.0};
  apply_solver_options(p, 1e-9, 500, o);
  p.openings = {{"inflow", p.spec.mesh->facet_set("left"), -1.0}};

  const DragModel d = p.spec.drag;
  if (d.law() == DragLaw::Barus && d.alpha0_map().empty() && d.drag_scale() == 1.0) {
    AnalyticSolution ex;
    ex.drag = d;
    ex.body_force_scale = 0.0;
    const double a0 = d.alpha0(0), beta = d.beta();
    ex.pressure = [a0, beta](const Point& x) { return analytic_patch_3d(a0, beta, x[0]); };
    ex.velocity = [](const Point&) { return Point{1.0, 0.0, 0.0}; };
    ex.pressure_gradient = [a0, beta](const Point& x) { return Point{-a0 / (1.0 + a0 * beta * x[0]), 0.0, 0.0}; };
    p.exact = ex;
  }
  return p;
}

PackagedProblem regions(const ProblemOptions& o) {
  reject_mesh_options(o, "regions");
  PackagedProblem p;
  p.name = "regions";
  p.description = "production well near a straight interface between alpha0 = 0.001 (A) and 1 (B), desk-scale mesh";
  p.spec.mesh = shipped_mesh(o, "regions.mesh");
  p.spec.drag = region_drag(DragLaw::Linear, {{kRegionA, kRegionsAlphaA}, {kRegionB, kRegionsAlphaB}}, 0.0, o);
  no_flow(p.spec, {"top", "bottom"});
  p.spec.pressure_bcs = {{"farfield_A", constant_field(kRegionsFarField)},
                         {"farfield_B", constant_field(kRegionsFarField)},
                         {"well", constant_field(kRegionsWell)}};
  apply_solver_options(p, 1e-12, 500, o);
  const Mesh& m = *p.spec.mesh;
  p.openings = {{"production", m.facet_set("well"), 1.0},
                {"inflow_A", m.facet_set("farfield_A"), -1.0},
                {"inflow_B", m.facet_set("farfield_B"), -1.0}};
  p.derived = [](const Measurements& f, const SolutionField&) {
    const double a = f[1].second, b = f[2].second;
    return Measurements{{"share_A", a / (a + b)}, {"split_AB", a / b}};
  };
  return p;
}

PackagedProblem leakage(const ProblemOptions& o) {
  reject_mesh_options(o, "leakage-coarse");
  PackagedProblem p;
  p.name = "leakage-coarse";
  p.description = "injection into aquifer A with leakage to aquifer B through an abandoned well, desk-scale mesh";
  p.spec.mesh = shipped_mesh(o, "leakage.mesh");
  p.spec.drag = region_drag(DragLaw::Barus,
                            {{kRegionA, kAquiferAlpha}, {kRegionB, kAquiferAlpha}, {kAbandonedWell, kWellAlpha}},
                            0.0, o);
  no_flow(p.spec, {"bottom", "top", "aquitard_A", "aquitard_B", "well_sides"});
  // listed last so the inlet value wins on nodes shared with aquitard_A
  p.spec.velocity_bcs.push_back({"inlet", constant_field(-kInflowVelocity)});
  p.spec.pressure_bcs = {{"farfield_A", constant_field(kAquiferAPressure)},
                         {"farfield_B", constant_field(kAquiferBPressure)}};
  apply_solver_options(p, 1e-12, 500, o);

  const Mesh& m = *p.spec.mesh;
  // everything entering aquifer A through its top, including the inlet's
  // bilinear spread onto neighbouring aquitard facets
  std::vector<FacetRef> injection = m.facet_set("inlet");
  const auto& top_a = m.facet_set("aquitard_A");
  injection.insert(injection.end(), top_a.begin(), top_a.end());

  // cross-section of the abandoned well at the bottom of aquifer B: bottom
  // faces of well cells lying at the level of the aquitard_B facets
  const double z_b = m.node(m.facet_global_nodes(m.facet_set("aquitard_B").front()).front())[2];
  std::vector<FacetRef> section;
  for (int e = 0; e < m.num_elements(); ++e) {
    if (m.region(e) != kAbandonedWell) continue;
    bool at_level = true;
    for (int node : m.facet_global_nodes({e, 0})) at_level = at_level && std::abs(m.node(node)[2] - z_b) < 1e-9;
    if (at_level) section.push_back({e, 0});
  }
  if (section.empty()) throw InvalidArgument("leakage mesh has no abandoned-well cross-section");
  // facet 0 faces -z, so upward flow is -v.n
  p.openings = {{"injection", injection, -1.0}, {"leakage", section, -1.0}};

  std::vector<int> near_injection;
  for (int i = 0; i < m.num_nodes(); ++i)
    if (std::hypot(m.node(i)[0], m.node(i)[1]) <= kInjectionNeighbourhood) near_injection.push_back(i);
  p.derived = [near_injection](const Measurements& f, const SolutionField& s) {
    double pmax = -HUGE_VAL;
    for (int i : near_injection) pmax = std::max(pmax, s.pressure[i]);
    return Measurements{{"leakage_ratio", f[1].second / f[0].second}, {"injection_pressure_max", pmax}};
  };
  return p;
}

struct Factory {
  const char* name;
  const char* description;
  PackagedProblem (*make)(const ProblemOptions&);
};

const Factory kCatalog[] = {
    {"oneD", "1D flow with closed-form solution (Barus or linear drag)", one_d},
    {"constant2d", "2D constant flow on the unit square", constant_2d},
    {"fivespot", "quarter five-spot with point source and sink", five_spot},
    {"checkerboard", "five-spot with a four-quadrant alpha0 map", checkerboard},
    {"mms", "manufactured solution for convergence studies", mms},
    {"patch3d", "3D constant-flow patch test on (0,5)^3", patch_3d},
    {"regions", "well near an interface between two permeabilities (desk-scale mesh)", regions},
    {"leakage-coarse", "leakage through an abandoned well between two aquifers (desk-scale mesh)", leakage},
};

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("PORODARCY_DATA_DIR"); env && *env) return env;
  return PORODARCY_SOURCE_DATA_DIR;
}

std::vector<CatalogEntry> packaged_problems() {
  std::vector<CatalogEntry> out;
  for (const Factory& f : kCatalog) out.push_back({f.name, f.description});
  return out;
}

PackagedProblem make_problem(const std::string& name, const ProblemOptions& options) {
  for (const Factory& f : kCatalog)
    if (name == f.name) return f.make(options);
  std::string known;
  for (const Factory& f : kCatalog) known += std::string(known.empty() ? "" : ", ") + f.name;
  throw InvalidArgument("unknown problem '" + name + "' (known: " + known + ")");
}

Measurements measure(const PackagedProblem& problem, const SolutionField& solution) {
  Measurements out;
  for (const Opening& o : problem.openings)
    out.emplace_back(o.name, o.sign * flux_through(*problem.spec.mesh, solution, o.facets));
  if (problem.derived) {
    const Measurements fluxes = out;
    for (auto& m : problem.derived(fluxes, solution)) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace porodarcy
