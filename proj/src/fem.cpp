#include "porodarcy/fem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "porodarcy/errors.hpp"

namespace porodarcy {

namespace {

constexpr std::array<int, 1> kLineFacets[] = {{0}, {1}};
constexpr std::array<int, 2> kTriFacets[] = {{0, 1}, {1, 2}, {2, 0}};
constexpr std::array<int, 2> kQuadFacets[] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
// z-, z+, y-, x+, y+, x-
constexpr std::array<int, 4> kHexFacets[] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                             {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};

constexpr double kQuadSigns[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
constexpr double kHexSigns[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                    {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

int gauss_points_for(int degree) { return std::max(1, (degree + 2) / 2); }

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

int reference_dim(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return 1;
    case ElementKind::Tri3:
    case ElementKind::Quad4: return 2;
    case ElementKind::Hex8: return 3;
  }
  throw InvalidArgument("unknown element kind");
}

int node_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return 2;
    case ElementKind::Tri3: return 3;
    case ElementKind::Quad4: return 4;
    case ElementKind::Hex8: return 8;
  }
  throw InvalidArgument("unknown element kind");
}

int facet_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return 2;
    case ElementKind::Tri3: return 3;
    case ElementKind::Quad4: return 4;
    case ElementKind::Hex8: return 6;
  }
  throw InvalidArgument("unknown element kind");
}

double reference_measure(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return 2.0;
    case ElementKind::Tri3: return 0.5;
    case ElementKind::Quad4: return 4.0;
    case ElementKind::Hex8: return 8.0;
  }
  throw InvalidArgument("unknown element kind");
}

std::span<const int> facet_nodes(ElementKind kind, int facet) {
  if (facet < 0 || facet >= facet_count(kind)) {
    throw InvalidArgument("facet index " + std::to_string(facet) + " out of range for " +
                          std::string(to_string(kind)));
  }
  switch (kind) {
    case ElementKind::Line2: return kLineFacets[facet];
    case ElementKind::Tri3: return kTriFacets[facet];
    case ElementKind::Quad4: return kQuadFacets[facet];
    case ElementKind::Hex8: return kHexFacets[facet];
  }
  throw InvalidArgument("unknown element kind");
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return "line2";
    case ElementKind::Tri3: return "tri3";
    case ElementKind::Quad4: return "quad4";
    case ElementKind::Hex8: return "hex8";
  }
  return "unknown";
}

ElementKind parse_element_kind(std::string_view name) {
  if (name == "line2") return ElementKind::Line2;
  if (name == "tri3") return ElementKind::Tri3;
  if (name == "quad4") return ElementKind::Quad4;
  if (name == "hex8") return ElementKind::Hex8;
  throw InvalidArgument("unknown element kind '" + std::string(name) + "'");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // P_n(x) and P_n'(x) by the three-term recurrence
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) {
    const double dp = n == 1 ? 1.0 : legendre(0.0).second;
    nodes[n / 2] = 0.0;
    weights[n / 2] = 2.0 / (dp * dp);
  }
}

QuadratureRule rule_of_degree(ElementKind kind, int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be nonnegative");
  QuadratureRule rule;
  rule.degree = degree;
  std::vector<double> x, w;
  switch (kind) {
    case ElementKind::Line2: {
      gauss_legendre(gauss_points_for(degree), x, w);
      for (std::size_t i = 0; i < x.size(); ++i) {
        rule.points.push_back({x[i], 0.0, 0.0});
        rule.weights.push_back(w[i]);
      }
      rule.degree = 2 * static_cast<int>(x.size()) - 1;
      break;
    }
    case ElementKind::Quad4: {
      gauss_legendre(gauss_points_for(degree), x, w);
      for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t i = 0; i < x.size(); ++i) {
          rule.points.push_back({x[i], x[j], 0.0});
          rule.weights.push_back(w[i] * w[j]);
        }
      rule.degree = 2 * static_cast<int>(x.size()) - 1;
      break;
    }
    case ElementKind::Hex8: {
      gauss_legendre(gauss_points_for(degree), x, w);
      for (std::size_t k = 0; k < x.size(); ++k)
        for (std::size_t j = 0; j < x.size(); ++j)
          for (std::size_t i = 0; i < x.size(); ++i) {
            rule.points.push_back({x[i], x[j], x[k]});
            rule.weights.push_back(w[i] * w[j] * w[k]);
          }
      rule.degree = 2 * static_cast<int>(x.size()) - 1;
      break;
    }
    case ElementKind::Tri3: {
      if (degree <= 1) {
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 0.0});
        rule.weights.push_back(0.5);
        rule.degree = 1;
      } else if (degree == 2) {
        const double a = 1.0 / 6.0, b = 2.0 / 3.0;
        rule.points = {{a, a, 0.0}, {b, a, 0.0}, {a, b, 0.0}};
        rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
      } else {
        // Collapsed Gauss: xi = u (1 - v), eta = v on the unit square, Jacobian (1 - v).
        const int n = (degree + 3) / 2;
        gauss_legendre(n, x, w);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const double u = 0.5 * (1.0 + x[i]);
            const double v = 0.5 * (1.0 + x[j]);
            rule.points.push_back({u * (1.0 - v), v, 0.0});
            rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - v));
          }
      }
      break;
    }
  }
  return rule;
}

QuadratureRule default_rule(ElementKind kind) {
  return rule_of_degree(kind, kDefaultQuadratureDegree);
}

ShapeValues shape_values(ElementKind kind, const Point& xi) {
  ShapeValues s;
  s.count = node_count(kind);
  switch (kind) {
    case ElementKind::Line2:
      s.values[0] = 0.5 * (1.0 - xi[0]);
      s.values[1] = 0.5 * (1.0 + xi[0]);
      s.gradients[0] = {-0.5, 0.0, 0.0};
      s.gradients[1] = {0.5, 0.0, 0.0};
      break;
    case ElementKind::Tri3:
      s.values[0] = 1.0 - xi[0] - xi[1];
      s.values[1] = xi[0];
      s.values[2] = xi[1];
      s.gradients[0] = {-1.0, -1.0, 0.0};
      s.gradients[1] = {1.0, 0.0, 0.0};
      s.gradients[2] = {0.0, 1.0, 0.0};
      break;
    case ElementKind::Quad4:
      for (int a = 0; a < 4; ++a) {
        const double sx = kQuadSigns[a][0], sy = kQuadSigns[a][1];
        const double fx = 1.0 + sx * xi[0], fy = 1.0 + sy * xi[1];
        s.values[a] = 0.25 * fx * fy;
        s.gradients[a] = {0.25 * sx * fy, 0.25 * fx * sy, 0.0};
      }
      break;
    case ElementKind::Hex8:
      for (int a = 0; a < 8; ++a) {
        const double sx = kHexSigns[a][0], sy = kHexSigns[a][1], sz = kHexSigns[a][2];
        const double fx = 1.0 + sx * xi[0], fy = 1.0 + sy * xi[1], fz = 1.0 + sz * xi[2];
        s.values[a] = 0.125 * fx * fy * fz;
        s.gradients[a] = {0.125 * sx * fy * fz, 0.125 * fx * sy * fz, 0.125 * fx * fy * sz};
      }
      break;
  }
  return s;
}

PhysicalShape physical_gradients(ElementKind kind, std::span<const Point> coords, const Point& xi) {
  const ShapeValues ref = shape_values(kind, xi);
  const int dim = reference_dim(kind);
  if (static_cast<int>(coords.size()) != ref.count) {
    throw InvalidArgument("element of kind " + std::string(to_string(kind)) + " needs " +
                          std::to_string(ref.count) + " coordinates");
  }
  PhysicalShape out;
  out.count = ref.count;
  out.values = ref.values;

  // J(i, j) = d x_i / d xi_j
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  for (int a = 0; a < ref.count; ++a) {
    for (int i = 0; i < dim; ++i) {
      out.x[i] += ref.values[a] * coords[a][i];
      for (int j = 0; j < dim; ++j) jac(i, j) += coords[a][i] * ref.gradients[a][j];
    }
  }
  double det = 0.0;
  Eigen::Matrix3d inv = Eigen::Matrix3d::Zero();
  switch (dim) {
    case 1:
      det = jac(0, 0);
      if (det > 0.0) inv(0, 0) = 1.0 / det;
      break;
    case 2: {
      const Eigen::Matrix2d j2 = jac.topLeftCorner<2, 2>();
      det = j2.determinant();
      if (det > 0.0) inv.topLeftCorner<2, 2>() = j2.inverse();
      break;
    }
    default:
      det = jac.determinant();
      if (det > 0.0) inv = jac.inverse();
  }
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate " << to_string(kind) << " element: det J = " << det << " at reference point ("
        << xi[0] << ", " << xi[1] << ", " << xi[2] << ")";
    throw DegenerateElement(msg.str());
  }
  out.det_j = det;
  // grad N = J^-T grad_ref N
  for (int a = 0; a < ref.count; ++a) {
    Point g{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g[i] += inv(j, i) * ref.gradients[a][j];
    out.gradients[a] = g;
  }
  return out;
}

Point element_centroid(std::span<const Point> coords) {
  Point c{0.0, 0.0, 0.0};
  for (const auto& x : coords)
    for (int i = 0; i < 3; ++i) c[i] += x[i];
  for (int i = 0; i < 3; ++i) c[i] /= static_cast<double>(coords.size());
  return c;
}

std::vector<FacetPoint> facet_quadrature(ElementKind kind, std::span<const Point> coords, int facet,
                                         int degree) {
  const auto local = facet_nodes(kind, facet);
  const Point centroid = element_centroid(coords);
  std::vector<FacetPoint> out;

  auto orient = [&](FacetPoint& fp) {
    if (dot(fp.normal, sub(fp.x, centroid)) < 0.0)
      for (double& c : fp.normal) c = -c;
  };

  switch (reference_dim(kind)) {
    case 1: {
      FacetPoint fp;
      fp.values[0] = 1.0;
      fp.x = coords[local[0]];
      fp.normal = {1.0, 0.0, 0.0};
      fp.weight = 1.0;
      orient(fp);
      out.push_back(fp);
      break;
    }
    case 2: {
      const QuadratureRule rule = rule_of_degree(ElementKind::Line2, degree);
      const Point& a = coords[local[0]];
      const Point& b = coords[local[1]];
      const Point t = {0.5 * (b[0] - a[0]), 0.5 * (b[1] - a[1]), 0.0};
      const double len = std::hypot(t[0], t[1]);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = rule.points[q][0];
        FacetPoint fp;
        fp.values[0] = 0.5 * (1.0 - s);
        fp.values[1] = 0.5 * (1.0 + s);
        for (int i = 0; i < 2; ++i) fp.x[i] = fp.values[0] * a[i] + fp.values[1] * b[i];
        fp.normal = {t[1] / len, -t[0] / len, 0.0};
        fp.weight = rule.weights[q] * len;
        orient(fp);
        out.push_back(fp);
      }
      break;
    }
    case 3: {
      const QuadratureRule rule = rule_of_degree(ElementKind::Quad4, degree);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const ShapeValues s = shape_values(ElementKind::Quad4, rule.points[q]);
        FacetPoint fp;
        Point ds{0, 0, 0}, dt{0, 0, 0};
        for (int n = 0; n < 4; ++n) {
          fp.values[n] = s.values[n];
          const Point& xn = coords[local[n]];
          for (int i = 0; i < 3; ++i) {
            fp.x[i] += s.values[n] * xn[i];
            ds[i] += s.gradients[n][0] * xn[i];
            dt[i] += s.gradients[n][1] * xn[i];
          }
        }
        const Point cr = {ds[1] * dt[2] - ds[2] * dt[1], ds[2] * dt[0] - ds[0] * dt[2],
                          ds[0] * dt[1] - ds[1] * dt[0]};
        const double area = std::sqrt(dot(cr, cr));
        if (!(area > 0.0)) throw DegenerateElement("degenerate hex8 facet");
        fp.normal = {cr[0] / area, cr[1] / area, cr[2] / area};
        fp.weight = rule.weights[q] * area;
        orient(fp);
        out.push_back(fp);
      }
      break;
    }
  }
  return out;
}

}  // namespace porodarcy
