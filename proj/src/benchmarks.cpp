#include "porodarcy/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "porodarcy/errors.hpp"

namespace porodarcy {

namespace {

bool darcy_limit(DragLaw law, double beta) { return law == DragLaw::Constant || beta == 0.0; }

void check_linear_law(double beta, double p) {
  if (1.0 + beta * p <= 0.0) {
    std::ostringstream msg;
    msg << "linear drag law breaks down: 1 + beta p = " << 1.0 + beta * p << " at p = " << p;
    throw ModelBreakdown(msg.str());
  }
}

}  // namespace

Flow1D analytic_1d(DragLaw law, double alpha0, double beta, double drag_scale, double p1, double p2, double x) {
  const double a = drag_scale * alpha0;
  if (darcy_limit(law, beta)) return {p1 + (p2 - p1) * x, (p1 - p2) / a};
  if (law == DragLaw::Linear) {
    check_linear_law(beta, p1);
    check_linear_law(beta, p2);
    const double g1 = 1.0 + beta * p1, g2 = 1.0 + beta * p2;
    return {(std::pow(g1, 1.0 - x) * std::pow(g2, x) - 1.0) / beta, -std::log(g2 / g1) / (a * beta)};
  }
  const double e1 = std::exp(-beta * p1), e2 = std::exp(-beta * p2);
  return {-std::log((1.0 - x) * e1 + x * e2) / beta, (e2 - e1) / (a * beta)};
}

double analytic_1d_pressure_gradient(DragLaw law, double alpha0, double beta, double drag_scale, double p1,
                                     double p2, double x) {
  if (darcy_limit(law, beta)) return p2 - p1;
  (void)alpha0;
  (void)drag_scale;
  if (law == DragLaw::Linear) {
    const double g1 = 1.0 + beta * p1, g2 = 1.0 + beta * p2;
    return std::pow(g1, 1.0 - x) * std::pow(g2, x) * std::log(g2 / g1) / beta;
  }
  const double e1 = std::exp(-beta * p1), e2 = std::exp(-beta * p2);
  return -(e2 - e1) / (beta * ((1.0 - x) * e1 + x * e2));
}

double analytic_constant_flow_2d(double alpha0, double beta, double p0, double x) {
  if (beta == 0.0) return p0 + alpha0 * (1.0 - x);
  const double arg = 1.0 - alpha0 * beta * (1.0 - x) * std::exp(beta * p0);
  if (arg <= 0.0) {
    std::ostringstream msg;
    msg << "unit flow cannot be sustained at beta = " << beta << ": log argument " << arg << " at x = " << x;
    throw ModelBreakdown(msg.str());
  }
  return p0 - std::log(arg) / beta;
}

double analytic_patch_3d(double alpha0, double beta, double x) {
  if (beta == 0.0) return -alpha0 * x;
  const double arg = 1.0 + alpha0 * beta * x;
  if (arg <= 0.0) {
    std::ostringstream msg;
    msg << "patch pressure undefined at beta = " << beta << ": log argument " << arg << " at x = " << x;
    throw ModelBreakdown(msg.str());
  }
  return -std::log(arg) / beta;
}

double AnalyticSolution::momentum_residual(const Point& x, int region) const {
  const double p = pressure(x);
  const Point v = velocity(x);
  const Point g = pressure_gradient(x);
  const Point b = body_force ? body_force(x) : Point{0.0, 0.0, 0.0};
  const double a = drag.drag_scale() * drag.alpha(region, p);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(a * v[i] + g[i] - body_force_scale * b[i]));
  return worst;
}

double max_momentum_residual(const AnalyticSolution& exact, int dim, const Point& lo, const Point& hi,
                             int samples_per_axis, int region) {
  const int n = std::max(1, samples_per_axis);
  auto coord = [&](int axis, int k) {
    return n == 1 ? 0.5 * (lo[axis] + hi[axis]) : lo[axis] + (hi[axis] - lo[axis]) * k / (n - 1);
  };
  const int ny = dim >= 2 ? n : 1, nz = dim >= 3 ? n : 1;
  double worst = 0.0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < n; ++i) {
        const Point x{coord(0, i), dim >= 2 ? coord(1, j) : 0.0, dim >= 3 ? coord(2, k) : 0.0};
        worst = std::max(worst, exact.momentum_residual(x, region));
      }
  return worst;
}

L2Errors l2_errors(const Mesh& mesh, const SolutionField& solution, const AnalyticSolution& exact, int degree) {
  if (solution.num_nodes() != mesh.num_nodes() || solution.dim != mesh.dim())
    throw InvalidArgument("solution does not match the mesh");
  const int dim = mesh.dim();
  double ep = 0.0, ev = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.element(e);
    const auto coords = mesh.element_coords(e);
    const std::span<const Point> xs(coords.data(), static_cast<std::size_t>(el.size()));
    const QuadratureRule rule = rule_of_degree(el.kind, degree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const PhysicalShape s = physical_gradients(el.kind, xs, rule.points[q]);
      double ph = 0.0;
      Point vh{0.0, 0.0, 0.0};
      for (int a = 0; a < el.size(); ++a) {
        ph += s.values[a] * solution.pressure[el.nodes[a]];
        for (int i = 0; i < dim; ++i) vh[i] += s.values[a] * solution.velocity[el.nodes[a] * dim + i];
      }
      const double dv = rule.weights[q] * s.det_j;
      const double dp = ph - exact.pressure(s.x);
      ep += dp * dp * dv;
      const Point v = exact.velocity(s.x);
      for (int i = 0; i < dim; ++i) ev += (vh[i] - v[i]) * (vh[i] - v[i]) * dv;
    }
  }
  return {std::sqrt(ep), std::sqrt(ev)};
}

double flux_through(const Mesh& mesh, const SolutionField& solution, std::span<const FacetRef> facets, int degree) {
  const int dim = mesh.dim();
  double total = 0.0;
  for (const FacetRef& f : facets) {
    const Element& el = mesh.element(f.element);
    const auto coords = mesh.element_coords(f.element);
    const auto local = facet_nodes(el.kind, f.local_facet);
    for (const FacetPoint& fp :
         facet_quadrature(el.kind, {coords.data(), static_cast<std::size_t>(el.size())}, f.local_facet, degree)) {
      double vn = 0.0;
      for (std::size_t k = 0; k < local.size(); ++k) {
        const int node = el.nodes[local[k]];
        for (int i = 0; i < dim; ++i) vn += fp.values[k] * solution.velocity[node * dim + i] * fp.normal[i];
      }
      total += vn * fp.weight;
    }
  }
  return total;
}

double loglog_slope(std::span<const double> h, std::span<const double> e) {
  if (h.size() != e.size() || h.size() < 2) throw InvalidArgument("slope fit needs at least two (h, e) pairs");
  const auto n = static_cast<double>(h.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(e[i] > 0.0)) throw InvalidArgument("slope fit needs positive h and e");
    mx += std::log(h[i]) / n;
    my += std::log(e[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(e[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct h values");
  return sxy / sxx;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "h,e_p,e_v\n";
  for (const ConvergenceRow& r : rows) out << r.h << ',' << r.pressure_error << ',' << r.velocity_error << '\n';
  out << "# rates,";
  if (pressure_rate) out << *pressure_rate; else out << "exact";
  out << ',';
  if (velocity_rate) out << *velocity_rate; else out << "exact";
  out << '\n';
  out.precision(old);
}

ConvergenceReport convergence_study(const ProblemFamily& family, std::vector<int> sizes) {
  if (sizes.size() < 3) throw InvalidArgument("convergence study needs at least 3 mesh sizes");
  std::sort(sizes.begin(), sizes.end());
  if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
    throw InvalidArgument("mesh sizes must be distinct");

  ConvergenceReport report;
  report.rows.resize(sizes.size());
  std::vector<std::string> failures(sizes.size());
  // meshes are independent; assembly inside each run stays serial
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    try {
      BenchmarkCase c = family(sizes[k]);
      c.config.threads = 0;
      const PicardResult r = run_picard(c.problem, c.config);
      const L2Errors err = l2_errors(*c.problem.mesh, r.solution, c.exact);
      report.rows[k] = {sizes[k], c.h, err.pressure, err.velocity, r.report.iterations_used, r.report.converged};
    } catch (const std::exception& ex) {
      failures[k] = ex.what();
    }
  }
  for (std::size_t k = 0; k < sizes.size(); ++k)
    if (!failures[k].empty()) throw Error("convergence run n = " + std::to_string(sizes[k]) + ": " + failures[k]);

  for (std::size_t k = 1; k < report.rows.size(); ++k)
    if (!(report.rows[k].h < report.rows[k - 1].h)) throw InvalidArgument("mesh sizes must give decreasing h");

  std::vector<double> h, ep, ev;
  for (const ConvergenceRow& r : report.rows) {
    if (!std::isfinite(r.pressure_error) || !std::isfinite(r.velocity_error))
      throw Error("non-finite error at n = " + std::to_string(r.n));
    report.all_converged = report.all_converged && r.converged;
    h.push_back(r.h);
    ep.push_back(r.pressure_error);
    ev.push_back(r.velocity_error);
  }
  auto rate = [&](const std::vector<double>& e) -> std::optional<double> {
    if (*std::max_element(e.begin(), e.end()) <= kExactErrorLevel) return std::nullopt;
    return loglog_slope(h, e);
  };
  report.pressure_rate = rate(ep);
  report.velocity_rate = rate(ev);
  return report;
}

BenchmarkCase manufactured_problem(int n, ElementKind kind, double beta) {
  using std::numbers::pi;
  BenchmarkCase c;
  c.h = 1.0 / n;
  const DragModel drag(DragLaw::Barus, 1.0, beta);

  AnalyticSolution& ex = c.exact;
  ex.drag = drag;
  ex.body_force_scale = 1.0;
  ex.pressure = [](const Point& x) { return x[0] * x[0] * x[1] * x[1]; };
  ex.pressure_gradient = [](const Point& x) {
    return Point{2.0 * x[0] * x[1] * x[1], 2.0 * x[0] * x[0] * x[1], 0.0};
  };
  ex.velocity = [](const Point& x) {
    return Point{std::sin(pi * x[0]) * std::cos(pi * x[1]), -std::cos(pi * x[0]) * std::sin(pi * x[1]), 0.0};
  };
  ex.body_force = [drag, v = ex.velocity, p = ex.pressure, g = ex.pressure_gradient](const Point& x) {
    const double a = drag.drag_scale() * drag.alpha(0, p(x));
    const Point vx = v(x), gx = g(x);
    return Point{a * vx[0] + gx[0], a * vx[1] + gx[1], 0.0};
  };

  ProblemSpec& spec = c.problem;
  spec.mesh = std::make_shared<Mesh>(generate_grid_2d(n, n, kind));
  spec.drag = drag;
  spec.body_force_scale = 1.0;
  spec.body_force = ex.body_force;
  for (const char* side : {"left", "right", "bottom", "top"}) spec.velocity_bcs.push_back({side, constant_field(0.0)});
  spec.pressure_pin = PressurePin{0, 0.0};

  c.config.eps_tol = 1e-9;
  c.config.max_iters = 200;
  return c;
}

}  // namespace porodarcy
