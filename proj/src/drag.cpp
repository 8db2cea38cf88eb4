#include "porodarcy/drag.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "porodarcy/errors.hpp"

namespace porodarcy {

std::string_view to_string(DragLaw law) {
  switch (law) {
    case DragLaw::Constant: return "constant";
    case DragLaw::Linear: return "linear";
    case DragLaw::Barus: return "barus";
  }
  return "unknown";
}

DragLaw parse_drag_law(std::string_view name) {
  if (name == "constant") return DragLaw::Constant;
  if (name == "linear") return DragLaw::Linear;
  if (name == "barus") return DragLaw::Barus;
  throw InvalidArgument("unknown drag law '" + std::string(name) + "'");
}

DragModel::DragModel(DragLaw law, double alpha0, double beta, double drag_scale)
    : law_(law), default_alpha0_(alpha0), beta_(beta), scale_(drag_scale) {
  validate();
}

DragModel::DragModel(DragLaw law, std::map<int, double> alpha0_by_region, double beta, double drag_scale)
    : law_(law), alpha0_(std::move(alpha0_by_region)), default_alpha0_(std::nullopt), beta_(beta), scale_(drag_scale) {
  validate();
}

void DragModel::validate() const {
  if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw InvalidArgument("beta must be a finite nonnegative number");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidArgument("drag scale A must be positive");
  if (default_alpha0_ && !(*default_alpha0_ > 0.0)) throw InvalidArgument("alpha0 must be positive");
  for (const auto& [tag, a0] : alpha0_)
    if (!(a0 > 0.0) || !std::isfinite(a0))
      throw InvalidArgument("alpha0 for region " + std::to_string(tag) + " must be positive");
}

double DragModel::alpha0(int region) const {
  const auto it = alpha0_.find(region);
  if (it != alpha0_.end()) return it->second;
  if (default_alpha0_) return *default_alpha0_;
  throw InvalidArgument("no alpha0 given for region " + std::to_string(region));
}

double DragModel::alpha(int region, double p) const {
  const double a0 = alpha0(region);
  switch (law_) {
    case DragLaw::Constant: return a0;
    case DragLaw::Linear: {
      const double factor = 1.0 + beta_ * p;
      if (!(factor > 0.0)) {
        std::ostringstream msg;
        msg << "linear drag law gives nonpositive drag (1 + beta p = " << factor << " at p = " << p
            << ", beta = " << beta_ << ")";
        throw NonpositiveDrag(msg.str());
      }
      return a0 * factor;
    }
    case DragLaw::Barus: return a0 * std::exp(beta_ * p);
  }
  throw InvalidArgument("unknown drag law");
}

DragModel DragModel::with_beta(double beta) const {
  DragModel m = *this;
  m.beta_ = beta;
  m.validate();
  return m;
}

DragModel DragModel::with_law(DragLaw law) const {
  DragModel m = *this;
  m.law_ = law;
  return m;
}

DragModel DragModel::with_alpha0(int region, double value) const {
  DragModel m = *this;
  m.alpha0_[region] = value;
  m.validate();
  return m;
}

}  // namespace porodarcy
