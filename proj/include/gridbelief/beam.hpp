#pragma once

#include <string_view>

#include "gridbelief/geometry.hpp"

namespace gridbelief {

enum class BeamStatus { kHit, kShortRange, kMaxRange };

std::string_view to_string(BeamStatus status);

/// One laser ray in the map frame.
///
/// For kShortRange the radius is the sensor's minimum range, for kMaxRange
/// its maximum range; for kHit it is the measured distance to the reflection.
struct Beam {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double radius = 0.0;
  BeamStatus status = BeamStatus::kHit;

  /// Throws std::invalid_argument on a non-unit direction or negative radius.
  void validate(double unit_tolerance = kUnitTolerance) const;
};

/// A beam as recorded by the sensor: direction in the sensor frame.
struct SensorBeam {
  Vec3 direction = Vec3::UnitX();
  double radius = 0.0;
  BeamStatus status = BeamStatus::kHit;

  bool operator==(const SensorBeam&) const = default;
};

/// Expresses a sensor-frame beam in the map frame for a sensor at `pose`.
inline Beam to_world(const Pose& pose, const SensorBeam& beam) {
  return Beam{pose.position, pose.rotate(beam.direction), beam.radius, beam.status};
}

}  // namespace gridbelief
