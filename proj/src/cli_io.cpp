#include "porodarcy/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "porodarcy/errors.hpp"

namespace porodarcy {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

double require_double(const std::string& v, const char* key) {
  if (auto d = to_double(v)) return *d;
  throw InvalidArgument(std::string(key) + " expects a number, got '" + v + "'");
}

int require_int(const std::string& v, const char* key) {
  if (auto i = to_int(v)) return *i;
  throw InvalidArgument(std::string(key) + " expects an integer, got '" + v + "'");
}

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> keys = {
      {"problem.name", [](RunConfig& c, const std::string& v) { c.problem = v; }},
      {"physics.beta", [](RunConfig& c, const std::string& v) { c.options.beta = require_double(v, "beta"); }},
      {"physics.law", [](RunConfig& c, const std::string& v) { c.options.law = parse_drag_law(v); }},
      {"physics.drag_scale",
       [](RunConfig& c, const std::string& v) { c.options.drag_scale = require_double(v, "drag_scale"); }},
      {"physics.alpha0", [](RunConfig& c, const std::string& v) { c.options.alpha0 = parse_alpha0_map(v); }},
      {"solver.eps_tol", [](RunConfig& c, const std::string& v) { c.options.eps_tol = require_double(v, "eps_tol"); }},
      {"solver.max_iters",
       [](RunConfig& c, const std::string& v) { c.options.max_iters = require_int(v, "max_iters"); }},
      {"solver.linear", [](RunConfig& c, const std::string& v) { c.linear = parse_linear_solver(v); }},
      {"solver.threads", [](RunConfig& c, const std::string& v) { c.threads = require_int(v, "threads"); }},
      {"solver.warm_start", [](RunConfig& c, const std::string& v) { c.warm_start = v; }},
      {"mesh.resolution",
       [](RunConfig& c, const std::string& v) { c.options.resolution = require_int(v, "resolution"); }},
      {"mesh.element", [](RunConfig& c, const std::string& v) { c.options.element = parse_element_kind(v); }},
      {"mesh.quadrature_degree",
       [](RunConfig& c, const std::string& v) { c.options.quadrature_degree = require_int(v, "quadrature_degree"); }},
      {"mesh.data_dir", [](RunConfig& c, const std::string& v) { c.options.data_dir = v; }},
      {"output.directory", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
  };
  return keys;
}

}  // namespace

std::string format_double(double value) {
  std::ostringstream s;
  s.precision(17);
  s << value;
  return s.str();
}

std::map<int, double> parse_alpha0_map(const std::string& text) {
  std::map<int, double> out;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("alpha0 entries must be region:value, got '" + item + "'");
    const auto region = to_int(trim(item.substr(0, colon)));
    const auto value = to_double(trim(item.substr(colon + 1)));
    if (!region || !value) throw InvalidArgument("alpha0 entries must be region:value, got '" + item + "'");
    if (!out.emplace(*region, *value).second) throw InvalidArgument("alpha0 lists region " + std::to_string(*region) + " twice");
  }
  if (out.empty()) throw InvalidArgument("alpha0 map is empty");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto v = to_double(item);
    if (!v) throw InvalidArgument("expected a number, got '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

LinearSolverKind parse_linear_solver(const std::string& name) {
  if (name == "direct") return LinearSolverKind::Direct;
  if (name == "iterative") return LinearSolverKind::Iterative;
  throw InvalidArgument("linear solver must be 'direct' or 'iterative', got '" + name + "'");
}

std::string to_string(LinearSolverKind kind) { return kind == LinearSolverKind::Direct ? "direct" : "iterative"; }

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("malformed section header '" + text + "'", line_no);
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      static const std::set<std::string> sections = {"problem", "physics", "solver", "mesh", "output"};
      if (!sections.contains(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + text + "'", line_no);
    if (section.empty()) throw ConfigError("key outside of a section", line_no);
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const std::string full = section + "." + key;
    const auto it = schema().find(full);
    if (it == schema().end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (!seen.insert(full).second) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    try {
      it->second(config, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& ex) {
      throw ConfigError(ex.what(), line_no);
    }
  }
  if (config.problem.empty()) throw ConfigError("missing [problem] name", 0);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  const ProblemOptions& o = c.options;
  std::ostringstream out;
  out << "[problem]\nname = " << c.problem << "\n";
  out << "\n[physics]\n";
  if (o.beta) out << "beta = " << format_double(*o.beta) << "\n";
  if (o.law) out << "law = " << to_string(*o.law) << "\n";
  if (o.drag_scale) out << "drag_scale = " << format_double(*o.drag_scale) << "\n";
  if (!o.alpha0.empty()) {
    out << "alpha0 = ";
    bool first = true;
    for (const auto& [region, value] : o.alpha0) {
      out << (first ? "" : ", ") << region << ":" << format_double(value);
      first = false;
    }
    out << "\n";
  }
  out << "\n[solver]\n";
  if (o.eps_tol) out << "eps_tol = " << format_double(*o.eps_tol) << "\n";
  if (o.max_iters) out << "max_iters = " << *o.max_iters << "\n";
  out << "linear = " << to_string(c.linear) << "\n";
  if (c.threads) out << "threads = " << *c.threads << "\n";
  if (c.warm_start) out << "warm_start = " << *c.warm_start << "\n";
  out << "\n[mesh]\n";
  if (o.resolution) out << "resolution = " << *o.resolution << "\n";
  if (o.element) out << "element = " << to_string(*o.element) << "\n";
  if (o.quadrature_degree) out << "quadrature_degree = " << *o.quadrature_degree << "\n";
  if (o.data_dir) out << "data_dir = " << *o.data_dir << "\n";
  out << "\n[output]\ndirectory = " << c.output_dir << "\n";
  return out.str();
}

int vtk_cell_type(ElementKind kind) {
  switch (kind) {
    case ElementKind::Line2: return 3;
    case ElementKind::Tri3: return 5;
    case ElementKind::Quad4: return 9;
    case ElementKind::Hex8: return 12;
  }
  return 0;
}

void write_vtk(std::ostream& out, const Mesh& mesh, const SolutionField& s) {
  if (s.num_nodes() != mesh.num_nodes() || s.dim != mesh.dim())
    throw InvalidArgument("solution does not match the mesh");
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nporodarcy solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Point& x : mesh.nodes()) out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  std::size_t size = 0;
  for (const Element& el : mesh.elements()) size += el.size() + 1;
  out << "CELLS " << mesh.num_elements() << ' ' << size << '\n';
  for (const Element& el : mesh.elements()) {
    out << el.size();
    for (int n : el.connectivity()) out << ' ' << n;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (const Element& el : mesh.elements()) out << vtk_cell_type(el.kind) << '\n';
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : s.pressure) out << p << '\n';
  out << "VECTORS velocity double\n";
  for (int n = 0; n < s.num_nodes(); ++n) {
    const Point v = s.velocity_at(n);
    out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
}

void write_vtk(const std::string& path, const Mesh& mesh, const SolutionField& solution) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_vtk(out, mesh, solution);
  if (!out) throw Error("failed writing " + path);
}

void write_history_csv(std::ostream& out, const PicardReport& report) {
  out << "iter,diff_norm\n";
  for (std::size_t i = 0; i < report.diff_norms.size(); ++i)
    out << i + 1 << ',' << format_double(report.diff_norms[i]) << '\n';
}

void write_summary(std::ostream& out, const PackagedProblem& problem, const PicardReport& report,
                   const Measurements& measurements) {
  const DragModel& d = problem.spec.drag;
  out << "problem = " << problem.name << '\n';
  out << "law = " << to_string(d.law()) << '\n';
  out << "beta = " << format_double(d.beta()) << '\n';
  out << "eps_tol = " << format_double(problem.config.eps_tol) << '\n';
  out << "max_iters = " << problem.config.max_iters << '\n';
  out << "nodes = " << problem.spec.mesh->num_nodes() << '\n';
  out << "elements = " << problem.spec.mesh->num_elements() << '\n';
  out << "iterations = " << report.iterations_used << '\n';
  out << "converged = " << (report.converged ? "true" : "false") << '\n';
  if (!report.diff_norms.empty()) out << "final_diff_norm = " << format_double(report.diff_norms.back()) << '\n';
  if (report.pressure_independent) out << "pressure_independent = true\n";
  for (const auto& [name, value] : measurements) out << name << " = " << format_double(value) << '\n';
}

void write_pressure(std::ostream& out, const std::vector<double>& pressure) {
  for (double p : pressure) out << format_double(p) << '\n';
}

std::vector<double> read_pressure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pressure file " + path);
  std::vector<double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto v = to_double(t);
    if (!v) throw ConfigError(path + ": not a number: '" + t + "'", line_no);
    out.push_back(*v);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  std::vector<std::string> names;
  for (const SweepRow& r : rows)
    if (r.error.empty()) {
      for (const auto& m : r.measurements) names.push_back(m.first);
      break;
    }
  out << "beta,iters,converged";
  for (const std::string& n : names) out << ',' << n;
  out << ",error\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.beta) << ',' << r.iterations << ',' << (r.converged ? 1 : 0);
    for (const std::string& n : names) {
      out << ',';
      const auto it = std::find_if(r.measurements.begin(), r.measurements.end(),
                                   [&](const auto& m) { return m.first == n; });
      if (it != r.measurements.end()) out << format_double(it->second);
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << ',' << err << '\n';
  }
}

}  // namespace porodarcy
