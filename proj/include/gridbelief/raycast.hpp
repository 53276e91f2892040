#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridbelief/beam.hpp"
#include "gridbelief/geometry.hpp"

namespace gridbelief {

struct TraceSegment {
  VoxelIndex voxel = 0;
  double length = 0.0;  // meters travelled inside the voxel

  bool operator==(const TraceSegment&) const = default;
};

/// Ordered decomposition of one beam into the voxels it enters.
///
/// When terminal_hit is set, the last segment belongs to the voxel that
/// reflected the beam. Its length ends at the reflection point.
struct BeamTrace {
  std::vector<TraceSegment> segments;
  bool terminal_hit = false;
  BeamStatus status = BeamStatus::kHit;

  double total_length() const;
};

/// Walks the beam through the grid voxel by voxel (DDA).
///
/// The trace starts at the beam origin, or at the grid entry point when the
/// origin lies outside, and ends at beam.radius or at the grid exit. Ties at
/// edges and corners advance along the axis with the smallest boundary time,
/// x before y before z; the zero-length segments this produces are dropped.
/// A hit endpoint lying exactly on an entry face belongs to the voxel behind
/// that face, which is then listed with a zero-length terminal segment.
///
/// Throws std::invalid_argument on a non-unit direction or negative radius.
BeamTrace trace_beam(const GridGeometry& geometry, const Beam& beam);

/// Trace along a one-dimensional corridor of unit voxels, starting at the
/// near face of `position`. Without a hit the trace runs to the corridor end.
/// `hit_depth` is the distance travelled inside the hit voxel.
BeamTrace trace_corridor(std::int64_t position, std::int64_t length_voxels,
                         std::optional<std::int64_t> hit_voxel, double hit_depth = 1.0);

}  // namespace gridbelief
