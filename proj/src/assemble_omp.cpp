#include <algorithm>
#include <bit>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "porodarcy/assembly.hpp"
#include "porodarcy/errors.hpp"
#include "scatter.hpp"

namespace porodarcy {

namespace detail {

std::vector<std::vector<int>> color_elements(const Mesh& mesh) {
  std::vector<std::uint64_t> used(mesh.num_nodes(), 0);
  std::vector<std::vector<int>> colors;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    std::uint64_t taken = 0;
    for (int a : mesh.element(e).connectivity()) taken |= used[a];
    if (~taken == 0) throw InvalidArgument("element coloring needs more than 64 colors");
    const int color = std::countr_one(taken);
    for (int a : mesh.element(e).connectivity()) used[a] |= std::uint64_t{1} << color;
    if (color >= static_cast<int>(colors.size())) colors.resize(color + 1);
    colors[color].push_back(e);
  }
  return colors;
}

}  // namespace detail

LinearSystem Assembler::assemble_parallel(std::span<const double> p_tilde, int threads) const {
  const Mesh& mesh = *problem_.mesh;
  if (static_cast<int>(p_tilde.size()) != mesh.num_nodes())
    throw InvalidArgument("previous pressure must have one value per node");

  LinearSystem sys = empty_system();
  CsrMatrix& m = sys.matrix;
  std::vector<double>& rhs = sys.rhs;

  auto add_matrix = [&m](int r, int c, double v) {
    const auto begin = m.col_idx.begin() + m.row_ptr[r];
    const auto end = m.col_idx.begin() + m.row_ptr[r + 1];
    m.values[std::lower_bound(begin, end, c) - m.col_idx.begin()] += v;
  };
  auto add_rhs = [&rhs](int r, double v) { rhs[r] += v; };

  // exceptions must not escape an OpenMP region
  bool failed = false;
  std::string message;
  int error_kind = 0;

  for (const std::vector<int>& color : colors_) {
    const auto count = static_cast<std::int64_t>(color.size());
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads))
    for (std::int64_t k = 0; k < count; ++k) {
      const int e = color[k];
      try {
        const ElementSystem es = compute_element(e, p_tilde);
        detail::scatter_element(*dofs_, mesh.element(e), es, add_matrix, add_rhs);
      } catch (const NonpositiveDrag& ex) {
#pragma omp critical(porodarcy_assembly_error)
        if (!failed) failed = true, error_kind = 1, message = ex.what();
      } catch (const DegenerateElement& ex) {
#pragma omp critical(porodarcy_assembly_error)
        if (!failed) failed = true, error_kind = 2, message = ex.what();
      } catch (const std::exception& ex) {
#pragma omp critical(porodarcy_assembly_error)
        if (!failed) failed = true, error_kind = 3, message = ex.what();
      }
    }
    if (failed) break;
  }
  if (failed) {
    if (error_kind == 1) throw NonpositiveDrag(message);
    if (error_kind == 2) throw DegenerateElement(message);
    throw Error(message);
  }
  return sys;
}

}  // namespace porodarcy
