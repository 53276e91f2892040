#include "gridbelief/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridbelief {

double BeamTrace::total_length() const {
  return std::accumulate(segments.begin(), segments.end(), 0.0,
                         [](double acc, const TraceSegment& s) { return acc + s.length; });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Parametric interval [enter, exit) of the ray inside the grid box, if any.
std::optional<std::pair<double, double>> clip_to_box(const GridGeometry& g, const Vec3& o,
                                                     const Vec3& d) {
  const Vec3 lo = g.origin();
  const Vec3 hi = g.max_corner();
  double enter = 0.0;
  double exit = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] >= hi[a]) return std::nullopt;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    enter = std::max(enter, ta);
    exit = std::min(exit, tb);
  }
  if (!(enter < exit)) return std::nullopt;
  return std::make_pair(enter, exit);
}

}  // namespace

BeamTrace trace_beam(const GridGeometry& geometry, const Beam& beam) {
  beam.validate();
  BeamTrace trace;
  trace.status = beam.status;

  const Vec3& o = beam.origin;
  const Vec3& d = beam.direction;
  const double t_end = beam.radius;
  const auto span = clip_to_box(geometry, o, d);
  if (!span || span->first >= t_end) return trace;

  const double edge = geometry.edge();
  const Vec3& lo = geometry.origin();
  const Vec3 entry = o + d * span->first;
  Cell cell;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((entry[a] - lo[a]) / edge);
    cell[a] = std::clamp(static_cast<std::int64_t>(f), std::int64_t{0}, geometry.dims()[a] - 1);
  }

  // Parameter at which the ray leaves the current cell through axis `a`.
  auto boundary = [&](int a) {
    if (d[a] > 0.0) return (lo[a] + static_cast<double>(cell[a] + 1) * edge - o[a]) / d[a];
    if (d[a] < 0.0) return (lo[a] + static_cast<double>(cell[a]) * edge - o[a]) / d[a];
    return kInf;
  };

  double t = span->first;
  for (;;) {
    const double tm[3] = {boundary(0), boundary(1), boundary(2)};
    int axis = 0;
    if (tm[1] < tm[axis]) axis = 1;
    if (tm[2] < tm[axis]) axis = 2;

    const double t_next = std::min(tm[axis], t_end);
    if (t_next > t) trace.segments.push_back({geometry.linear_index(cell), t_next - t});

    if (t_end <= tm[axis]) {
      if (beam.status == BeamStatus::kHit) {
        Cell owner = cell;
        for (int a = 0; a < 3; ++a) {
          if (d[a] > 0.0 && tm[a] == t_end) owner[a] += 1;
        }
        if (owner == cell) {
          trace.terminal_hit = !trace.segments.empty();
        } else if (geometry.contains(owner)) {
          trace.segments.push_back({geometry.linear_index(owner), 0.0});
          trace.terminal_hit = true;
        }
      }
      break;
    }

    t = tm[axis];
    cell[axis] += d[axis] > 0.0 ? 1 : -1;
    if (!geometry.contains(cell)) break;
  }
  return trace;
}

BeamTrace trace_corridor(std::int64_t position, std::int64_t length_voxels,
                         std::optional<std::int64_t> hit_voxel, double hit_depth) {
  if (length_voxels < 1 || position < 0 || position >= length_voxels) {
    throw std::invalid_argument("corridor position out of range");
  }
  if (hit_voxel && (*hit_voxel < position || *hit_voxel >= length_voxels)) {
    throw std::invalid_argument("corridor hit voxel must lie in [position, length)");
  }
  if (!(hit_depth > 0.0 && hit_depth <= 1.0)) {
    throw std::invalid_argument("corridor hit depth must lie in (0, 1]");
  }
  BeamTrace trace;
  const std::int64_t last = hit_voxel.value_or(length_voxels - 1);
  trace.segments.reserve(static_cast<std::size_t>(last - position + 1));
  for (std::int64_t v = position; v <= last; ++v) {
    trace.segments.push_back({static_cast<VoxelIndex>(v), 1.0});
  }
  if (hit_voxel) {
    trace.segments.back().length = hit_depth;
    trace.terminal_hit = true;
    trace.status = BeamStatus::kHit;
  } else {
    trace.status = BeamStatus::kMaxRange;
  }
  return trace;
}

}  // namespace gridbelief
