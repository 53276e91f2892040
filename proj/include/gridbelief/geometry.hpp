#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gridbelief {

using Vec3 = Eigen::Vector3d;
using Cell = Eigen::Matrix<std::int64_t, 3, 1>;
using VoxelIndex = std::uint64_t;

/// Axis-aligned lattice of cubic voxels.
///
/// Voxels are half-open boxes [low, high) along every axis, so a point on a
/// shared face belongs to the voxel with the larger index. Linear indices run
/// x fastest, then y, then z.
class GridGeometry {
 public:
  GridGeometry(const Cell& dims, double edge, const Vec3& origin = Vec3::Zero());

  const Cell& dims() const { return dims_; }
  double edge() const { return edge_; }
  const Vec3& origin() const { return origin_; }
  Vec3 max_corner() const { return origin_ + dims_.cast<double>() * edge_; }
  std::uint64_t voxel_count() const;

  bool contains(const Cell& cell) const;
  std::optional<Cell> cell_of(const Vec3& point) const;
  std::optional<VoxelIndex> voxel_index_of(const Vec3& point) const;

  VoxelIndex linear_index(const Cell& cell) const;
  Cell cell_index(VoxelIndex index) const;
  Vec3 center_of(VoxelIndex index) const;

  bool operator==(const GridGeometry& other) const;

 private:
  Cell dims_;
  double edge_;
  Vec3 origin_;
};

/// Sensor pose in the map frame. The orientation must be a unit quaternion.
struct Pose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Eigen::Quaterniond& q);

  static Pose from_xyz_ypr(double x, double y, double z, double yaw, double pitch = 0.0,
                           double roll = 0.0);

  Vec3 transform_point(const Vec3& p) const { return position + orientation * p; }
  Vec3 rotate(const Vec3& v) const { return orientation * v; }
  Pose inverse() const;
  /// Euler angles (yaw about z, pitch about y, roll about x), radians.
  Vec3 yaw_pitch_roll() const;
};

inline constexpr double kUnitTolerance = 1e-9;

/// this ∘ delta: applies `delta` expressed in the frame of `base`.
Pose compose(const Pose& base, const Pose& delta);
/// Relative motion from `from` to `to`, expressed in the frame of `from`.
Pose relative(const Pose& from, const Pose& to);

}  // namespace gridbelief
