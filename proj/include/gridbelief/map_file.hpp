#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>

#include "gridbelief/mapping.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// Little-endian binary map:
///
///   magic "GRDBLF\0\1", u32 version, u32 model, i64 dims[3], f64 edge,
///   f64 origin[3], f64 alpha, f64 beta, u64 record count,
///   then records (u64 index, u64 H, u64 M, f64 R) in strictly increasing
///   index order, one for every voxel with evidence.
struct MapFile {
  VoxelStatsGrid grid;
  PriorParams prior;
};

inline constexpr std::uint32_t kMapFileVersion = 1;

class MapFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_map(std::ostream& out, const MapFile& map);
void write_map(const std::filesystem::path& path, const MapFile& map);

/// Throws MapFileError on a bad magic, unsupported version, truncated data,
/// unordered records, or a model other than `expected_model` when given.
MapFile read_map(std::istream& in, std::optional<MapModel> expected_model = std::nullopt);
MapFile read_map(const std::filesystem::path& path,
                 std::optional<MapModel> expected_model = std::nullopt);

}  // namespace gridbelief
