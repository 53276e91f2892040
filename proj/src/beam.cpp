#include "gridbelief/beam.hpp"

#include <cmath>
#include <stdexcept>

namespace gridbelief {

std::string_view to_string(BeamStatus status) {
  switch (status) {
    case BeamStatus::kHit:
      return "hit";
    case BeamStatus::kShortRange:
      return "short_range";
    case BeamStatus::kMaxRange:
      return "max_range";
  }
  return "unknown";
}

void Beam::validate(double unit_tolerance) const {
  if (!origin.allFinite() || !direction.allFinite()) {
    throw std::invalid_argument("beam origin and direction must be finite");
  }
  if (std::abs(direction.norm() - 1.0) > unit_tolerance) {
    throw std::invalid_argument("beam direction must be a unit vector");
  }
  if (!(radius >= 0.0)) {
    throw std::invalid_argument("beam radius must be non-negative");
  }
}

}  // namespace gridbelief
