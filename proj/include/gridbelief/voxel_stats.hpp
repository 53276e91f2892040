#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gridbelief/geometry.hpp"

namespace gridbelief {

/// Sufficient statistics of one voxel: hits, misses and traversed distance.
struct VoxelStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double distance = 0.0;  // meters

  VoxelStats& operator+=(const VoxelStats& o) {
    hits += o.hits;
    misses += o.misses;
    distance += o.distance;
    return *this;
  }
  bool empty() const { return hits == 0 && misses == 0 && distance == 0.0; }
  bool operator==(const VoxelStats&) const = default;
};

inline VoxelStats operator+(VoxelStats a, const VoxelStats& b) { return a += b; }

/// Sparse per-voxel statistics over a grid. Absent voxels read as (0, 0, 0).
class VoxelStatsGrid {
 public:
  explicit VoxelStatsGrid(GridGeometry geometry) : geometry_(std::move(geometry)) {}

  const GridGeometry& geometry() const { return geometry_; }

  VoxelStats at(VoxelIndex index) const {
    auto it = stats_.find(index);
    return it == stats_.end() ? VoxelStats{} : it->second;
  }
  /// Mutable access; throws std::out_of_range for indices outside the grid.
  VoxelStats& mutable_at(VoxelIndex index);
  void set(VoxelIndex index, const VoxelStats& stats);

  std::size_t stored_count() const { return stats_.size(); }
  /// Stored (index, stats) pairs sorted by index.
  std::vector<std::pair<VoxelIndex, VoxelStats>> sorted_entries() const;
  /// Dense copy with one entry per voxel.
  std::vector<VoxelStats> densified() const;

  /// Equal geometry and equal statistics for every voxel (stored or not).
  bool operator==(const VoxelStatsGrid& other) const;

 private:
  GridGeometry geometry_;
  std::unordered_map<VoxelIndex, VoxelStats> stats_;
};

/// Field-wise sum of two grids; throws std::invalid_argument on differing geometry.
VoxelStatsGrid merge_stats(const VoxelStatsGrid& a, const VoxelStatsGrid& b);

}  // namespace gridbelief
