#include "gridbelief/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridbelief {

GridGeometry::GridGeometry(const Cell& dims, double edge, const Vec3& origin)
    : dims_(dims), edge_(edge), origin_(origin) {
  if ((dims.array() < 1).any()) {
    throw std::invalid_argument("grid dimensions must be >= 1 along every axis");
  }
  if (!(edge > 0.0) || !std::isfinite(edge)) {
    throw std::invalid_argument("voxel edge length must be positive");
  }
  if (!origin.allFinite()) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

std::uint64_t GridGeometry::voxel_count() const {
  return static_cast<std::uint64_t>(dims_.x()) * static_cast<std::uint64_t>(dims_.y()) *
         static_cast<std::uint64_t>(dims_.z());
}

bool GridGeometry::contains(const Cell& cell) const {
  return (cell.array() >= 0).all() && (cell.array() < dims_.array()).all();
}

std::optional<Cell> GridGeometry::cell_of(const Vec3& point) const {
  Cell cell;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((point[a] - origin_[a]) / edge_);
    if (!(f >= 0.0) || f >= static_cast<double>(dims_[a])) return std::nullopt;
    cell[a] = static_cast<std::int64_t>(f);
  }
  return cell;
}

std::optional<VoxelIndex> GridGeometry::voxel_index_of(const Vec3& point) const {
  auto cell = cell_of(point);
  if (!cell) return std::nullopt;
  return linear_index(*cell);
}

VoxelIndex GridGeometry::linear_index(const Cell& cell) const {
  return static_cast<VoxelIndex>(cell.x() + dims_.x() * (cell.y() + dims_.y() * cell.z()));
}

Cell GridGeometry::cell_index(VoxelIndex index) const {
  const auto nx = static_cast<VoxelIndex>(dims_.x());
  const auto ny = static_cast<VoxelIndex>(dims_.y());
  return Cell(static_cast<std::int64_t>(index % nx), static_cast<std::int64_t>((index / nx) % ny),
              static_cast<std::int64_t>(index / (nx * ny)));
}

Vec3 GridGeometry::center_of(VoxelIndex index) const {
  return origin_ + (cell_index(index).cast<double>().array() + 0.5).matrix() * edge_;
}

bool GridGeometry::operator==(const GridGeometry& other) const {
  return dims_ == other.dims_ && edge_ == other.edge_ && origin_ == other.origin_;
}

Pose::Pose(const Vec3& p, const Eigen::Quaterniond& q) : position(p), orientation(q) {
  if (std::abs(q.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("pose orientation must be a unit quaternion");
  }
}

Pose Pose::from_xyz_ypr(double x, double y, double z, double yaw, double pitch, double roll) {
  Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                         Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                         Eigen::AngleAxisd(roll, Vec3::UnitX());
  return Pose(Vec3(x, y, z), q.normalized());
}

Pose Pose::inverse() const {
  Pose out;
  out.orientation = orientation.conjugate();
  out.position = -(out.orientation * position);
  return out;
}

Vec3 Pose::yaw_pitch_roll() const {
  const Eigen::Matrix3d r = orientation.toRotationMatrix();
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  return Vec3(yaw, pitch, roll);
}

Pose compose(const Pose& base, const Pose& delta) {
  Pose out;
  out.position = base.position + base.orientation * delta.position;
  out.orientation = (base.orientation * delta.orientation).normalized();
  return out;
}

Pose relative(const Pose& from, const Pose& to) { return compose(from.inverse(), to); }

}  // namespace gridbelief
