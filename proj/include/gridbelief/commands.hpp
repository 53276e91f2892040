#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridbelief/corridor.hpp"
#include "gridbelief/evaluation.hpp"
#include "gridbelief/map_file.hpp"
#include "gridbelief/mapping.hpp"
#include "gridbelief/particle_filter.hpp"
#include "gridbelief/scan_log.hpp"
#include "gridbelief/world.hpp"

namespace gridbelief {

/// How the voxel prior is chosen: flat ("uniform" and "uninformative" both
/// name Beta(1,1) / Gamma(1,0)), moment-matched to the map, or fixed values.
struct PriorChoice {
  enum class Kind { kFlat, kMomentMatched, kFixed } kind = Kind::kMomentMatched;
  double alpha = 1.0;
  double beta = 1.0;

  static PriorChoice parse(std::string_view text);
  PriorParams resolve(const VoxelStatsGrid& grid, MapModel model) const;
};

/// Grid placement. Unset dims derive a bounding box from the scan log.
struct GeometryOptions {
  std::optional<Cell> dims;
  double voxel_size = 0.5;
  std::optional<Vec3> origin;
};

/// Smallest grid aligned to multiples of `voxel_size` that holds every sensor
/// position and hit endpoint, padded by one voxel.
GridGeometry bounding_geometry(const std::vector<ScanRecord>& scans, const GeometryOptions& options);

struct BuildMapOptions {
  std::vector<std::filesystem::path> scan_logs;
  std::optional<std::filesystem::path> output;
  MapModel model = MapModel::kDecay;
  GeometryOptions geometry;
  PriorChoice prior;
};

/// Scans are integrated in fixed-size chunks that are merged in order, so
/// the result does not depend on the thread count.
VoxelStatsGrid build_grid(const GridGeometry& geometry, const std::vector<ScanRecord>& scans);

/// Builds the map, writes it when an output path is set, and prints beam and
/// coverage counts plus the moment-matched prior to `report`.
MapFile cmd_build_map(const BuildMapOptions& options, std::ostream& report);

enum class ModeKind { kMlm, kFmp };
ModeKind parse_mode_kind(std::string_view text);

struct LocalizeCommandOptions {
  std::filesystem::path map;
  std::filesystem::path scan_log;
  /// Dead-reckoned poses, one per scan. When given, the scan log poses are
  /// ground truth and the error column is filled.
  std::optional<std::filesystem::path> odometry_log;
  std::optional<MapModel> model;
  ModeKind mode = ModeKind::kFmp;
  std::optional<PriorChoice> prior;  // default: the prior stored in the map
  std::optional<double> mlm_floor;
  LocalizeOptions filter;
  std::optional<double> motion_sigma_trans;  // default: init sigmas
  std::optional<double> motion_sigma_rot;
  bool planar = false;
};

/// CSV rows t,x,y,z,yaw,pitch,roll,error. Returns the per-step errors
/// (empty without ground truth).
std::vector<double> cmd_localize(const LocalizeCommandOptions& options, std::ostream& csv);

struct SimulateOptions {
  std::vector<MapModel> models = {MapModel::kReflection, MapModel::kDecay};
  std::vector<int> n_list = {1, 2, 3, 4, 5, 10, 20, 50, 100, 200};
  int runs = 10000;
  std::uint64_t seed = 1;
  int length = 100;
  CorridorSensor sensor = CorridorSensor::kSingleVoxel;
};

std::vector<SweepRow> cmd_simulate(const SimulateOptions& options, std::ostream& csv);

struct EvalOptions {
  std::filesystem::path map;
  std::filesystem::path scan_log;
  std::optional<MapModel> model;
  std::optional<PriorChoice> prior;  // default: the prior stored in the map
  double sigma = 0.05;
  int samples = 441;
  std::uint64_t seed = 1;
};

struct EvalReport {
  LoglikReport loglik;
  KlReport kl;
};

/// Prints the cumulated log-likelihoods and KL divergences per mode, both
/// MLM/FMP ratios and the excluded-beam counts. `csv`, when given, receives
/// the same numbers as metric,mlm,fmp,ratio,included,excluded rows.
EvalReport cmd_eval(const EvalOptions& options, std::ostream& report, std::ostream* csv = nullptr);

struct SynthesizeOptions {
  DatasetOptions dataset;
  std::uint64_t seed = 1;
  std::filesystem::path prefix;  // writes <prefix>mapping.log, trajectory.log, odometry.log
};

SyntheticDataset cmd_synthesize(const SynthesizeOptions& options, std::ostream& report);

}  // namespace gridbelief
