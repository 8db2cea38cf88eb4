#include "porodarcy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "porodarcy/errors.hpp"

namespace porodarcy {

namespace {

constexpr int kFacetSlots = 6;

using FacetKey = std::array<int, kMaxFacetNodes>;

FacetKey facet_key(const Element& el, int facet) {
  FacetKey key;
  key.fill(-1);
  const auto local = facet_nodes(el.kind, facet);
  for (std::size_t i = 0; i < local.size(); ++i) key[i] = el.nodes[local[i]];
  std::sort(key.begin(), key.begin() + local.size());
  return key;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> nodes, std::vector<Element> elements, std::vector<int> regions,
           FacetSets facet_sets)
    : dim_(dim),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      regions_(std::move(regions)),
      facet_sets_(std::move(facet_sets)) {
  if (dim_ < 1 || dim_ > 3) throw InvalidArgument("mesh dimension must be 1, 2 or 3");
  if (regions_.empty()) regions_.assign(elements_.size(), 0);
  if (regions_.size() != elements_.size()) {
    throw InvalidArgument("region tag count " + std::to_string(regions_.size()) +
                          " does not match element count " + std::to_string(elements_.size()));
  }
  const int n = num_nodes();
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elements_[e];
    if (reference_dim(el.kind) != dim_) {
      throw InvalidArgument("element " + std::to_string(e) + " (" + std::string(to_string(el.kind)) +
                            ") does not match mesh dimension " + std::to_string(dim_));
    }
    for (int a : el.connectivity()) {
      if (a < 0 || a >= n) {
        throw InvalidArgument("element " + std::to_string(e) + " references node " + std::to_string(a) +
                              " outside [0, " + std::to_string(n) + ")");
      }
    }
    const auto coords = element_coords(e);
    const std::span<const Point> span(coords.data(), el.size());
    for (const Point& xi : default_rule(el.kind).points) {
      try {
        physical_gradients(el.kind, span, xi);
      } catch (const DegenerateElement& ex) {
        throw DegenerateElement("element " + std::to_string(e) + ": " + ex.what());
      }
    }
  }

  std::map<FacetKey, int> counts;
  for (const Element& el : elements_)
    for (int f = 0; f < facet_count(el.kind); ++f) ++counts[facet_key(el, f)];
  boundary_flags_.assign(elements_.size() * kFacetSlots, 0);
  for (int e = 0; e < num_elements(); ++e)
    for (int f = 0; f < facet_count(elements_[e].kind); ++f)
      boundary_flags_[e * kFacetSlots + f] = counts[facet_key(elements_[e], f)] == 1;

  for (const auto& [name, facets] : facet_sets_) {
    for (const FacetRef& ref : facets) {
      if (ref.element < 0 || ref.element >= num_elements() || ref.local_facet < 0 ||
          ref.local_facet >= facet_count(elements_[ref.element].kind)) {
        throw InvalidArgument("facet set '" + name + "' references invalid facet (" +
                              std::to_string(ref.element) + ", " + std::to_string(ref.local_facet) + ")");
      }
      if (!is_boundary_facet(ref)) {
        throw InvalidArgument("facet set '" + name + "' contains interior facet (" +
                              std::to_string(ref.element) + ", " + std::to_string(ref.local_facet) + ")");
      }
    }
  }
}

const std::vector<FacetRef>& Mesh::facet_set(const std::string& name) const {
  const auto it = facet_sets_.find(name);
  if (it == facet_sets_.end()) throw InvalidArgument("unknown facet set '" + name + "'");
  return it->second;
}

bool Mesh::is_boundary_facet(const FacetRef& f) const {
  if (f.element < 0 || f.element >= num_elements()) return false;
  if (f.local_facet < 0 || f.local_facet >= facet_count(elements_[f.element].kind)) return false;
  return boundary_flags_[f.element * kFacetSlots + f.local_facet] != 0;
}

std::vector<FacetRef> Mesh::boundary_facets() const {
  std::vector<FacetRef> out;
  for (int e = 0; e < num_elements(); ++e)
    for (int f = 0; f < facet_count(elements_[e].kind); ++f)
      if (boundary_flags_[e * kFacetSlots + f]) out.push_back({e, f});
  return out;
}

std::array<Point, kMaxElementNodes> Mesh::element_coords(int e) const {
  std::array<Point, kMaxElementNodes> out{};
  const Element& el = elements_[e];
  for (int a = 0; a < el.size(); ++a) out[a] = nodes_[el.nodes[a]];
  return out;
}

Point Mesh::element_centroid(int e) const {
  const auto coords = element_coords(e);
  return porodarcy::element_centroid(std::span<const Point>(coords.data(), elements_[e].size()));
}

double Mesh::element_volume(int e) const {
  const Element& el = elements_[e];
  const auto coords = element_coords(e);
  const std::span<const Point> span(coords.data(), el.size());
  const QuadratureRule rule = default_rule(el.kind);
  double vol = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    vol += rule.weights[q] * physical_gradients(el.kind, span, rule.points[q]).det_j;
  return vol;
}

double Mesh::total_volume() const {
  double vol = 0.0;
  for (int e = 0; e < num_elements(); ++e) vol += element_volume(e);
  return vol;
}

std::vector<int> Mesh::facet_global_nodes(const FacetRef& f) const {
  const Element& el = elements_.at(f.element);
  std::vector<int> out;
  for (int a : facet_nodes(el.kind, f.local_facet)) out.push_back(el.nodes[a]);
  return out;
}

int Mesh::find_node(const Point& x, double tol) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_nodes(); ++i) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(nodes_[i][k] - x[k]));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best_d <= tol ? best : -1;
}

Mesh generate_interval(int n_elements, double x0, double x1) {
  if (n_elements < 1) throw InvalidArgument("interval mesh needs at least one element");
  if (!(x1 > x0)) throw InvalidArgument("interval extent must have positive length");
  std::vector<Point> nodes;
  for (int i = 0; i <= n_elements; ++i)
    nodes.push_back({x0 + (x1 - x0) * static_cast<double>(i) / n_elements, 0.0, 0.0});
  nodes.back()[0] = x1;
  std::vector<Element> elems;
  for (int i = 0; i < n_elements; ++i) {
    Element el;
    el.kind = ElementKind::Line2;
    el.nodes[0] = i;
    el.nodes[1] = i + 1;
    elems.push_back(el);
  }
  FacetSets sets;
  sets["left"] = {{0, 0}};
  sets["right"] = {{n_elements - 1, 1}};
  return Mesh(1, std::move(nodes), std::move(elems), {}, std::move(sets));
}

Mesh generate_grid_2d(int nx, int ny, ElementKind kind, const Extent2& ext) {
  if (nx < 1 || ny < 1) throw InvalidArgument("grid needs at least one cell per direction");
  if (!(ext.x1 > ext.x0) || !(ext.y1 > ext.y0)) throw InvalidArgument("degenerate rectangle extent");
  if (kind != ElementKind::Quad4 && kind != ElementKind::Tri3)
    throw InvalidArgument("2D grids support quad4 or tri3");

  std::vector<Point> nodes;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? ext.x1 : ext.x0 + (ext.x1 - ext.x0) * i / nx;
      const double y = j == ny ? ext.y1 : ext.y0 + (ext.y1 - ext.y0) * j / ny;
      nodes.push_back({x, y, 0.0});
    }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<Element> elems;
  FacetSets sets{{"left", {}}, {"right", {}}, {"bottom", {}}, {"top", {}}};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n11 = id(i + 1, j + 1), n01 = id(i, j + 1);
      if (kind == ElementKind::Quad4) {
        const int e = static_cast<int>(elems.size());
        elems.push_back({ElementKind::Quad4, {n00, n10, n11, n01}});
        if (j == 0) sets["bottom"].push_back({e, 0});
        if (i == nx - 1) sets["right"].push_back({e, 1});
        if (j == ny - 1) sets["top"].push_back({e, 2});
        if (i == 0) sets["left"].push_back({e, 3});
      } else {
        const int lower = static_cast<int>(elems.size());
        elems.push_back({ElementKind::Tri3, {n00, n10, n11}});
        const int upper = lower + 1;
        elems.push_back({ElementKind::Tri3, {n00, n11, n01}});
        if (j == 0) sets["bottom"].push_back({lower, 0});
        if (i == nx - 1) sets["right"].push_back({lower, 1});
        if (j == ny - 1) sets["top"].push_back({upper, 1});
        if (i == 0) sets["left"].push_back({upper, 2});
      }
    }
  return Mesh(2, std::move(nodes), std::move(elems), {}, std::move(sets));
}

Mesh generate_grid_3d(int nx, int ny, int nz, const Extent3& ext) {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("grid needs at least one cell per direction");
  if (!(ext.x1 > ext.x0) || !(ext.y1 > ext.y0) || !(ext.z1 > ext.z0))
    throw InvalidArgument("degenerate box extent");

  auto coord = [](double a, double b, int i, int n) { return i == n ? b : a + (b - a) * i / n; };
  std::vector<Point> nodes;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        nodes.push_back({coord(ext.x0, ext.x1, i, nx), coord(ext.y0, ext.y1, j, ny), coord(ext.z0, ext.z1, k, nz)});
  auto id = [nx, ny](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };

  std::vector<Element> elems;
  FacetSets sets{{"left", {}}, {"right", {}}, {"front", {}}, {"back", {}}, {"bottom", {}}, {"top", {}}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int e = static_cast<int>(elems.size());
        elems.push_back({ElementKind::Hex8,
                         {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                          id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)}});
        if (k == 0) sets["bottom"].push_back({e, 0});
        if (k == nz - 1) sets["top"].push_back({e, 1});
        if (j == 0) sets["front"].push_back({e, 2});
        if (i == nx - 1) sets["right"].push_back({e, 3});
        if (j == ny - 1) sets["back"].push_back({e, 4});
        if (i == 0) sets["left"].push_back({e, 5});
      }
  return Mesh(3, std::move(nodes), std::move(elems), {}, std::move(sets));
}

Mesh tag_regions(const Mesh& mesh, const RegionClassifier& classifier) {
  std::vector<int> tags(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) tags[e] = classifier(mesh.element_centroid(e));
  return Mesh(mesh.dim(), {mesh.nodes().begin(), mesh.nodes().end()},
              {mesh.elements().begin(), mesh.elements().end()}, std::move(tags), mesh.facet_sets());
}

namespace {

// Line-oriented reader that tracks line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, non-comment line.
  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.clear();
      out.str(line);
      return true;
    }
    return false;
  }
  std::istringstream require(const char* what) {
    std::istringstream s;
    if (!next(s)) fail(std::string("unexpected end of file while reading ") + what);
    return s;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line_no_); }
  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader reader(in);
  int dim = 0, n_nodes = 0, n_elems = 0;
  {
    auto header = reader.require("header");
    if (!(header >> dim >> n_nodes >> n_elems) || dim < 1 || dim > 3 || n_nodes < 1 || n_elems < 1)
      reader.fail("header must be 'dim N_nodes N_elems'");
  }
  std::vector<Point> nodes(n_nodes, Point{0, 0, 0});
  for (int i = 0; i < n_nodes; ++i) {
    auto s = reader.require("node coordinates");
    for (int k = 0; k < dim; ++k)
      if (!(s >> nodes[i][k])) reader.fail("node " + std::to_string(i) + " needs " + std::to_string(dim) + " coordinates");
  }
  std::vector<Element> elems(n_elems);
  for (int e = 0; e < n_elems; ++e) {
    auto s = reader.require("element connectivity");
    std::string kind;
    s >> kind;
    try {
      elems[e].kind = parse_element_kind(kind);
    } catch (const InvalidArgument& ex) {
      reader.fail(ex.what());
    }
    for (int a = 0; a < elems[e].size(); ++a)
      if (!(s >> elems[e].nodes[a])) reader.fail("element " + std::to_string(e) + " has too few node indices");
  }
  FacetSets sets;
  std::vector<int> regions;
  std::istringstream s;
  while (reader.next(s)) {
    std::string keyword;
    s >> keyword;
    if (keyword == "facetset") {
      std::string name;
      int count = -1;
      if (!(s >> name >> count) || count < 0) reader.fail("expected 'facetset <name> <count>'");
      auto& list = sets[name];
      for (int i = 0; i < count; ++i) {
        auto fs = reader.require("facet entry");
        FacetRef ref;
        if (!(fs >> ref.element >> ref.local_facet)) reader.fail("expected 'elem local_facet'");
        list.push_back(ref);
      }
    } else if (keyword == "regions") {
      int tag;
      while (s >> tag) regions.push_back(tag);
      // tags may continue on following lines
      while (static_cast<int>(regions.size()) < n_elems) {
        auto more = reader.require("region tags");
        while (more >> tag) regions.push_back(tag);
      }
      if (static_cast<int>(regions.size()) != n_elems) reader.fail("region tag count does not match element count");
    } else {
      reader.fail("unknown keyword '" + keyword + "'");
    }
  }
  return Mesh(dim, std::move(nodes), std::move(elems), std::move(regions), std::move(sets));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file '" + path + "'");
  try {
    return read_mesh(in);
  } catch (const ConfigError& ex) {
    throw ConfigError(path + ": " + ex.what(), 0);
  }
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17);
  out << mesh.dim() << ' ' << mesh.num_nodes() << ' ' << mesh.num_elements() << '\n';
  for (const Point& x : mesh.nodes()) {
    for (int k = 0; k < mesh.dim(); ++k) out << (k ? " " : "") << x[k];
    out << '\n';
  }
  for (const Element& el : mesh.elements()) {
    out << to_string(el.kind);
    for (int a : el.connectivity()) out << ' ' << a;
    out << '\n';
  }
  for (const auto& [name, facets] : mesh.facet_sets()) {
    out << "facetset " << name << ' ' << facets.size() << '\n';
    for (const FacetRef& f : facets) out << f.element << ' ' << f.local_facet << '\n';
  }
  out << "regions";
  for (int t : mesh.regions()) out << ' ' << t;
  out << '\n';
}

}  // namespace porodarcy
