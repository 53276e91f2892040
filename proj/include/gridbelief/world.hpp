#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gridbelief/beam.hpp"
#include "gridbelief/geometry.hpp"
#include "gridbelief/mapping.hpp"
#include "gridbelief/random.hpp"
#include "gridbelief/scan_log.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// Ground-truth voxel values of a synthetic environment.
struct World {
  GridGeometry geometry;
  MapModel model = MapModel::kDecay;
  std::vector<double> values;       // reflection probability or decay rate, by linear index
  std::vector<std::uint8_t> solid;  // shell and clutter voxels

  double value(VoxelIndex index) const { return values.at(index); }
  bool is_solid(VoxelIndex index) const { return solid.at(index) != 0; }
};

struct RoomOptions {
  Cell dims = Cell(12, 12, 6);
  double edge = 0.5;
  Vec3 origin = Vec3::Zero();
  MapModel model = MapModel::kDecay;
  int clutter = 10;  // interior obstacle voxels
  /// Value ranges; unset picks model defaults (decay: shell 4..12 per meter,
  /// clutter 1..6, free 0.01; reflection: shell 0.7..0.95, clutter 0.3..0.8,
  /// free 0.002).
  std::optional<std::pair<double, double>> shell_range;
  std::optional<std::pair<double, double>> clutter_range;
  std::optional<double> free_value;
  /// Voxels within one edge length of these points stay free of clutter.
  std::vector<Vec3> keep_clear;
};

/// Closed room: a solid shell on the x and y faces (and floor and ceiling
/// when the grid is at least three voxels tall), nearly transparent free
/// space, and randomly placed interior clutter of intermediate density.
World make_room_world(const RoomOptions& options, std::uint64_t seed);

/// Unstructured volume whose voxel values are i.i.d. Uniform(0, 1)
/// (reflection) or Gamma(1, 1) (decay), like foliage. No voxel is solid.
World make_iid_world(const GridGeometry& geometry, MapModel model, std::uint64_t seed);

enum class WorldKind { kRoom, kIid };

std::string_view to_string(WorldKind kind);
WorldKind parse_world_kind(std::string_view text);

struct SensorPattern {
  int azimuths = 36;
  std::vector<double> elevations = {0.0};  // radians
  double r_min = 0.05;
  double r_max = 10.0;

  /// Unit directions in the sensor frame, azimuth-major.
  std::vector<Vec3> directions() const;
};

/// Samples one scan from the world's forward sensor model. Reflection
/// beams stop in each voxel with its probability; decay beams travel an
/// exponential distance with the voxel's rate. Hits closer than r_min are
/// reported as short-range; beams that reach r_max or leave the grid are
/// max-range.
std::vector<SensorBeam> sample_scan(const World& world, const Pose& pose,
                                    const SensorPattern& pattern, Rng& rng);

/// Sensor height used by the generators: the centre of the middle layer.
double sensor_height(const GridGeometry& geometry);

/// Closed elliptical loop around the room centre, heading along the tangent.
std::vector<Pose> room_loop(const GridGeometry& geometry, int steps, double radius_fraction = 0.28);

/// Uniformly placed poses with random yaw in free interior voxels at sensor height.
std::vector<Pose> random_free_poses(const World& world, int count, Rng& rng);

struct DatasetOptions {
  WorldKind kind = WorldKind::kRoom;
  RoomOptions room;  // geometry and model apply to both kinds
  SensorPattern sensor;
  int mapping_scans = 40;
  int steps = 40;
  double odometry_trans_sigma = 0.0;  // per-step drift, meters
  double odometry_rot_sigma = 0.0;    // per-step drift, radians
};

struct SyntheticDataset {
  World world;
  std::vector<ScanRecord> mapping;     // scans from random poses
  std::vector<ScanRecord> trajectory;  // held-out scans along the loop, ground-truth poses
  std::vector<ScanRecord> odometry;    // dead-reckoned loop poses, no beams
};

SyntheticDataset make_dataset(const DatasetOptions& options, std::uint64_t seed);

/// Accumulates every scan into a fresh grid with the given geometry.
VoxelStatsGrid build_map(const GridGeometry& geometry, const std::vector<ScanRecord>& scans);

}  // namespace gridbelief
