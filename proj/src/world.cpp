#include "gridbelief/world.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gridbelief/particle_filter.hpp"
#include "gridbelief/raycast.hpp"

namespace gridbelief {

namespace {

bool on_shell(const Cell& c, const Cell& dims) {
  if (c.x() == 0 || c.y() == 0 || c.x() == dims.x() - 1 || c.y() == dims.y() - 1) return true;
  return dims.z() >= 3 && (c.z() == 0 || c.z() == dims.z() - 1);
}

}  // namespace

World make_room_world(const RoomOptions& options, std::uint64_t seed) {
  World world{GridGeometry(options.dims, options.edge, options.origin), options.model, {}, {}};
  const auto count = world.geometry.voxel_count();
  world.values.assign(count, 0.0);
  world.solid.assign(count, 0);
  Rng rng(seed);
  const bool decay = options.model == MapModel::kDecay;
  const auto shell_range = options.shell_range.value_or(
      decay ? std::pair{4.0, 12.0} : std::pair{0.7, 0.95});
  const auto clutter_range = options.clutter_range.value_or(
      decay ? std::pair{1.0, 6.0} : std::pair{0.3, 0.8});
  const double free_value = options.free_value.value_or(decay ? 0.01 : 0.002);
  std::uniform_real_distribution<double> shell(shell_range.first, shell_range.second);
  std::uniform_real_distribution<double> clutter(clutter_range.first, clutter_range.second);

  std::vector<VoxelIndex> interior;
  for (VoxelIndex i = 0; i < count; ++i) {
    const Cell c = world.geometry.cell_index(i);
    if (on_shell(c, options.dims)) {
      world.values[i] = shell(rng);
      world.solid[i] = 1;
      continue;
    }
    world.values[i] = free_value;
    const Vec3 centre = world.geometry.center_of(i);
    bool clear = true;
    for (const auto& p : options.keep_clear) {
      if ((centre - p).norm() < options.edge * 1.5) clear = false;
    }
    if (clear) interior.push_back(i);
  }
  const auto wanted = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.clutter, 0)),
                                            interior.size());
  for (std::size_t k = 0; k < wanted; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, interior.size() - 1);
    std::swap(interior[k], interior[pick(rng)]);
    world.values[interior[k]] = clutter(rng);
    world.solid[interior[k]] = 1;
  }
  return world;
}

World make_iid_world(const GridGeometry& geometry, MapModel model, std::uint64_t seed) {
  World world{geometry, model, {}, {}};
  const auto count = geometry.voxel_count();
  world.solid.assign(count, 0);
  Rng rng(seed);
  world.values.resize(count);
  if (model == MapModel::kReflection) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : world.values) v = u(rng);
  } else {
    std::gamma_distribution<double> g(1.0, 1.0);
    for (double& v : world.values) v = g(rng);
  }
  return world;
}

std::string_view to_string(WorldKind kind) { return kind == WorldKind::kRoom ? "room" : "iid"; }

WorldKind parse_world_kind(std::string_view text) {
  if (text == "room") return WorldKind::kRoom;
  if (text == "iid") return WorldKind::kIid;
  throw std::invalid_argument("unknown world kind: " + std::string(text));
}

std::vector<Vec3> SensorPattern::directions() const {
  if (azimuths < 1 || elevations.empty()) throw std::invalid_argument("empty sensor pattern");
  std::vector<Vec3> out;
  for (int a = 0; a < azimuths; ++a) {
    const double az = 2.0 * std::numbers::pi * a / azimuths;
    for (double el : elevations) {
      out.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    }
  }
  return out;
}

std::vector<SensorBeam> sample_scan(const World& world, const Pose& pose,
                                    const SensorPattern& pattern, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SensorBeam> out;
  for (const Vec3& dir : pattern.directions()) {
    const Beam probe{pose.position, pose.rotate(dir), pattern.r_max, BeamStatus::kMaxRange};
    const BeamTrace trace = trace_beam(world.geometry, probe);
    SensorBeam beam{dir, pattern.r_max, BeamStatus::kMaxRange};
    double travelled = 0.0;
    for (const auto& seg : trace.segments) {
      const double value = world.value(seg.voxel);
      double depth = -1.0;
      if (world.model == MapModel::kReflection) {
        if (u(rng) < value) depth = seg.length * (0.1 + 0.8 * u(rng));
      } else if (value > 0.0) {
        const double t = std::exponential_distribution<double>(value)(rng);
        if (t < seg.length) depth = t;
      }
      if (depth >= 0.0) {
        const double r = travelled + depth;
        beam = r < pattern.r_min ? SensorBeam{dir, pattern.r_min, BeamStatus::kShortRange}
                                 : SensorBeam{dir, r, BeamStatus::kHit};
        break;
      }
      travelled += seg.length;
    }
    out.push_back(beam);
  }
  return out;
}

double sensor_height(const GridGeometry& geometry) {
  return geometry.origin().z() +
         (static_cast<double>(geometry.dims().z() / 2) + 0.5) * geometry.edge();
}

std::vector<Pose> room_loop(const GridGeometry& geometry, int steps, double radius_fraction) {
  if (steps < 1) throw std::invalid_argument("loop needs at least one step");
  const Vec3 extent = geometry.dims().cast<double>() * geometry.edge();
  const Vec3 centre = geometry.origin() + 0.5 * extent;
  const double rx = radius_fraction * extent.x();
  const double ry = radius_fraction * extent.y();
  const double z = sensor_height(geometry);
  std::vector<Pose> out;
  for (int k = 0; k < steps; ++k) {
    const double a = 2.0 * std::numbers::pi * k / steps;
    const double yaw = std::atan2(ry * std::cos(a), -rx * std::sin(a));
    out.push_back(Pose::from_xyz_ypr(centre.x() + rx * std::cos(a), centre.y() + ry * std::sin(a),
                                     z, yaw));
  }
  return out;
}

std::vector<Pose> random_free_poses(const World& world, int count, Rng& rng) {
  const auto& g = world.geometry;
  const Cell& d = g.dims();
  const double z = sensor_height(g);
  std::uniform_real_distribution<double> ux(g.origin().x() + g.edge(), g.max_corner().x() - g.edge());
  std::uniform_real_distribution<double> uy(g.origin().y() + g.edge(), g.max_corner().y() - g.edge());
  std::uniform_real_distribution<double> uyaw(-std::numbers::pi, std::numbers::pi);
  if (d.x() < 3 || d.y() < 3) throw std::invalid_argument("room has no interior");
  std::vector<Pose> out;
  for (int tries = 0; static_cast<int>(out.size()) < count; ++tries) {
    if (tries > 1000 * (count + 1)) throw std::runtime_error("no free space for poses");
    const Vec3 p(ux(rng), uy(rng), z);
    const auto index = g.voxel_index_of(p);
    if (!index || world.is_solid(*index)) continue;
    out.push_back(Pose::from_xyz_ypr(p.x(), p.y(), p.z(), uyaw(rng)));
  }
  return out;
}

SyntheticDataset make_dataset(const DatasetOptions& options, std::uint64_t seed) {
  RoomOptions room = options.room;
  const GridGeometry geometry(room.dims, room.edge, room.origin);
  const std::vector<Pose> loop = room_loop(geometry, options.steps);
  for (const auto& p : loop) room.keep_clear.push_back(p.position);

  SyntheticDataset out{options.kind == WorldKind::kRoom
                           ? make_room_world(room, derive_seed(seed, 0))
                           : make_iid_world(geometry, room.model, derive_seed(seed, 0)),
                       {}, {}, {}};
  Rng rng(derive_seed(seed, 1));
  double t = 0.0;
  for (const Pose& p : random_free_poses(out.world, options.mapping_scans, rng)) {
    out.mapping.push_back({t, p, sample_scan(out.world, p, options.sensor, rng)});
    t += 0.1;
  }

  Rng odo_rng(derive_seed(seed, 2));
  Pose odo = loop.front();
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const double stamp = 0.1 * static_cast<double>(k);
    out.trajectory.push_back({stamp, loop[k], sample_scan(out.world, loop[k], options.sensor, rng)});
    if (k > 0) {
      const Pose step = relative(loop[k - 1], loop[k]);
      odo = compose(odo, compose(step, sample_perturbation(odo_rng, options.odometry_trans_sigma,
                                                           options.odometry_rot_sigma)));
    }
    out.odometry.push_back({stamp, odo, {}});
  }
  return out;
}

VoxelStatsGrid build_map(const GridGeometry& geometry, const std::vector<ScanRecord>& scans) {
  VoxelStatsGrid grid(geometry);
  for (const auto& s : scans) integrate_scan(grid, s.pose, s.beams);
  return grid;
}

}  // namespace gridbelief
