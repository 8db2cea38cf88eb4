#pragma once

#include <map>
#include <optional>
#include <string_view>

namespace porodarcy {

enum class DragLaw { Constant, Linear, Barus };

std::string_view to_string(DragLaw law);
DragLaw parse_drag_law(std::string_view name);

// Non-dimensional pressure-dependent drag coefficient
//   constant: alpha0
//   linear:   alpha0 (1 + beta p)
//   barus:    alpha0 exp(beta p)
// with alpha0 piecewise constant over region tags. The drag scale `A` is
// carried here but applied by the assembler, not by alpha().
class DragModel {
 public:
  DragModel() = default;
  DragModel(DragLaw law, double alpha0, double beta, double drag_scale = 1.0);
  DragModel(DragLaw law, std::map<int, double> alpha0_by_region, double beta, double drag_scale = 1.0);

  DragLaw law() const { return law_; }
  double beta() const { return beta_; }
  double drag_scale() const { return scale_; }
  const std::map<int, double>& alpha0_map() const { return alpha0_; }
  std::optional<double> default_alpha0() const { return default_alpha0_; }

  // Throws InvalidArgument when the region has no alpha0.
  double alpha0(int region) const;

  // True when alpha does not depend on pressure (constant law or beta == 0).
  bool pressure_independent() const { return law_ == DragLaw::Constant || beta_ == 0.0; }

  // Throws NonpositiveDrag for the linear law when 1 + beta p <= 0.
  double alpha(int region, double p) const;
  double alpha_inverse(int region, double p) const { return 1.0 / alpha(region, p); }

  DragModel with_beta(double beta) const;
  DragModel with_law(DragLaw law) const;
  DragModel with_alpha0(int region, double value) const;

 private:
  void validate() const;

  DragLaw law_ = DragLaw::Constant;
  std::map<int, double> alpha0_;
  std::optional<double> default_alpha0_ = 1.0;
  double beta_ = 0.0;
  double scale_ = 1.0;
};

// Reference quantities of the dimensional problem. x = L xbar, v = V vbar,
// p = P pbar, alpha = alpha_ref alphabar, rho = rho_ref rhobar, b = B bbar.
struct ReferenceScales {
  double length = 1.0;
  double velocity = 1.0;
  double pressure = 1.0;
  double drag = 1.0;
  double density = 1.0;
  double body_force = 1.0;

  // A = alpha_ref V L / P
  double drag_number() const { return drag * velocity * length / pressure; }
  // C = rho_ref L B / P
  double body_force_number() const { return density * length * body_force / pressure; }
  // beta has units of 1/pressure; betabar = beta P.
  double nondimensional_beta(double beta) const { return beta * pressure; }
};

}  // namespace porodarcy
