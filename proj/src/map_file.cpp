#include "gridbelief/map_file.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace gridbelief {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'R', 'D', 'B', 'L', 'F', '\0', '\1'};

template <class T>
void put(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw MapFileError(std::string("map file truncated while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::uint32_t model_code(MapModel model) { return model == MapModel::kReflection ? 0u : 1u; }

}  // namespace

void write_map(std::ostream& out, const MapFile& map) {
  const auto& g = map.grid.geometry();
  if (map.prior.model != MapModel::kReflection && map.prior.model != MapModel::kDecay) {
    throw MapFileError("unknown map model");
  }
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kMapFileVersion);
  put<std::uint32_t>(out, model_code(map.prior.model));
  for (int a = 0; a < 3; ++a) put<std::int64_t>(out, g.dims()[a]);
  put<double>(out, g.edge());
  for (int a = 0; a < 3; ++a) put<double>(out, g.origin()[a]);
  put<double>(out, map.prior.alpha);
  put<double>(out, map.prior.beta);
  std::vector<std::pair<VoxelIndex, VoxelStats>> records;
  for (const auto& [index, s] : map.grid.sorted_entries()) {
    if (s.hits + s.misses > 0 || s.distance > 0.0) records.emplace_back(index, s);
  }
  put<std::uint64_t>(out, records.size());
  for (const auto& [index, s] : records) {
    put<std::uint64_t>(out, index);
    put<std::uint64_t>(out, s.hits);
    put<std::uint64_t>(out, s.misses);
    put<double>(out, s.distance);
  }
  if (!out) throw MapFileError("failed writing map file");
}

void write_map(const std::filesystem::path& path, const MapFile& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MapFileError("cannot write map file " + path.string());
  write_map(out, map);
}

MapFile read_map(std::istream& in, std::optional<MapModel> expected_model) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw MapFileError("not a map file (bad magic)");
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kMapFileVersion) {
    throw MapFileError("unsupported map file version " + std::to_string(version));
  }
  const auto code = get<std::uint32_t>(in, "model");
  if (code > 1) throw MapFileError("unknown map model code " + std::to_string(code));
  const MapModel model = code == 0 ? MapModel::kReflection : MapModel::kDecay;
  if (expected_model && *expected_model != model) {
    throw MapFileError("map file holds a " + std::string(to_string(model)) + " map, expected " +
                       std::string(to_string(*expected_model)));
  }
  Cell dims;
  for (int a = 0; a < 3; ++a) dims[a] = get<std::int64_t>(in, "dims");
  const double edge = get<double>(in, "edge");
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = get<double>(in, "origin");
  PriorParams prior{model, get<double>(in, "alpha"), 0.0};
  prior.beta = get<double>(in, "beta");
  if (!prior.valid()) throw MapFileError("map file holds invalid prior parameters");

  std::optional<VoxelStatsGrid> grid;
  try {
    grid.emplace(GridGeometry(dims, edge, origin));
  } catch (const std::invalid_argument& e) {
    throw MapFileError(std::string("map file holds invalid geometry: ") + e.what());
  }
  const auto count = get<std::uint64_t>(in, "record count");
  const auto voxels = grid->geometry().voxel_count();
  std::optional<std::uint64_t> previous;
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto index = get<std::uint64_t>(in, "record");
    VoxelStats s;
    s.hits = get<std::uint64_t>(in, "record");
    s.misses = get<std::uint64_t>(in, "record");
    s.distance = get<double>(in, "record");
    if (index >= voxels) throw MapFileError("record index outside the grid");
    if (previous && index <= *previous) throw MapFileError("record indices not strictly increasing");
    if (!(s.distance >= 0.0)) throw MapFileError("record has negative distance");
    previous = index;
    grid->set(index, s);
  }
  return MapFile{std::move(*grid), prior};
}

MapFile read_map(const std::filesystem::path& path, std::optional<MapModel> expected_model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapFileError("cannot open map file " + path.string());
  return read_map(in, expected_model);
}

}  // namespace gridbelief
