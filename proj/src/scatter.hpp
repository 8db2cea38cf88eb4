#pragma once

#include <array>

#include "porodarcy/assembly.hpp"

namespace porodarcy::detail {

// Routes one element system into the reduced global system: free/free
// entries go to add_matrix, free/constrained entries move to the right-hand
// side with the prescribed value, constrained rows are dropped.
template <class AddMatrix, class AddRhs>
void scatter_element(const DofMap& dofs, const Element& el, const ElementSystem& es, AddMatrix&& add_matrix,
                     AddRhs&& add_rhs) {
  const int nf = dofs.fields();
  const int n = el.size() * nf;
  std::array<int, kMaxElementDofs> raw{};
  std::array<int, kMaxElementDofs> free{};
  for (int a = 0; a < el.size(); ++a)
    for (int i = 0; i < nf; ++i) {
      raw[a * nf + i] = dofs.raw(el.nodes[a], i);
      free[a * nf + i] = dofs.free_index(raw[a * nf + i]);
    }
  for (int r = 0; r < n; ++r) {
    if (free[r] < 0) continue;
    double rhs = es.f(r);
    for (int c = 0; c < n; ++c) {
      if (free[c] >= 0)
        add_matrix(free[r], free[c], es.K(r, c));
      else
        rhs -= es.K(r, c) * dofs.constrained_value(raw[c]);
    }
    add_rhs(free[r], rhs);
  }
}

// Greedy node-disjoint coloring of the elements.
std::vector<std::vector<int>> color_elements(const Mesh& mesh);

}  // namespace porodarcy::detail
