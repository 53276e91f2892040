#include "gridbelief/voxel_stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridbelief {

VoxelStats& VoxelStatsGrid::mutable_at(VoxelIndex index) {
  if (index >= geometry_.voxel_count()) {
    throw std::out_of_range("voxel index outside the grid");
  }
  return stats_[index];
}

void VoxelStatsGrid::set(VoxelIndex index, const VoxelStats& stats) {
  if (stats.empty()) {
    if (index >= geometry_.voxel_count()) throw std::out_of_range("voxel index outside the grid");
    stats_.erase(index);
    return;
  }
  mutable_at(index) = stats;
}

std::vector<std::pair<VoxelIndex, VoxelStats>> VoxelStatsGrid::sorted_entries() const {
  std::vector<std::pair<VoxelIndex, VoxelStats>> out;
  out.reserve(stats_.size());
  for (const auto& [index, s] : stats_) {
    if (!s.empty()) out.emplace_back(index, s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<VoxelStats> VoxelStatsGrid::densified() const {
  std::vector<VoxelStats> out(geometry_.voxel_count());
  for (const auto& [index, s] : stats_) out[index] = s;
  return out;
}

bool VoxelStatsGrid::operator==(const VoxelStatsGrid& other) const {
  if (!(geometry_ == other.geometry_)) return false;
  return sorted_entries() == other.sorted_entries();
}

VoxelStatsGrid merge_stats(const VoxelStatsGrid& a, const VoxelStatsGrid& b) {
  if (!(a.geometry() == b.geometry())) {
    throw std::invalid_argument("cannot merge statistics over different grid geometries");
  }
  VoxelStatsGrid out = a;
  for (const auto& [index, s] : b.sorted_entries()) out.mutable_at(index) += s;
  return out;
}

}  // namespace gridbelief
