#pragma once

#include <optional>
#include <span>

#include "gridbelief/beam.hpp"
#include "gridbelief/mapping.hpp"
#include "gridbelief/raycast.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// FMP integrates the sensor model over the map posterior; MLM evaluates it
/// on the single most likely map.
enum class LikelihoodKind { kFmp, kMlm };

struct LikelihoodMode {
  LikelihoodKind kind = LikelihoodKind::kFmp;
  MapModel model = MapModel::kReflection;
  /// FMP: prior of the voxel posteriors.
  PriorParams prior = PriorParams::flat(MapModel::kReflection);
  /// FMP: prior used instead of `prior` for voxels without evidence. Needed
  /// with the improper decay prior Gamma(1, 0), under which an unvisited
  /// voxel would block every beam.
  std::optional<PriorParams> unvisited_prior;
  /// MLM: voxel value assumed where the map has no evidence.
  double ml_default = 0.5;
  /// MLM: optional lower bound on each per-voxel factor. Unset keeps exact
  /// zero likelihoods (log = -inf).
  std::optional<double> voxel_floor;

  static LikelihoodMode fmp(const PriorParams& prior,
                            std::optional<PriorParams> unvisited_prior = std::nullopt);
  static LikelihoodMode mlm(MapModel model, double ml_default,
                            std::optional<double> voxel_floor = std::nullopt);
};

/// FMP mode for a built map. An improper prior (Gamma(a, 0)) is paired with
/// the map's moment-matched prior for voxels without evidence.
LikelihoodMode fmp_mode_for(const VoxelStatsGrid& grid, const PriorParams& prior);

/// MLM mode for a built map. Voxels without evidence read 0.5 (reflection)
/// or the mean of the map's moment-matched prior (decay).
LikelihoodMode mlm_mode_for(const VoxelStatsGrid& grid, MapModel model,
                            std::optional<double> voxel_floor = std::nullopt);

/// Posterior-predictive reflection probability of one voxel:
/// (H + a)^d (M + b)^(1 - d) / (H + a + M + b).
double l_ref(const VoxelStats& stats, const PriorParams& prior, bool hit);
/// Reflection factor on the ML map; `fallback` is the value of unvisited voxels.
double l_ref_mlm(const VoxelStats& stats, double fallback, bool hit);
/// Posterior-predictive decay factor for travelling `r` meters in the voxel:
/// ((R + b) / (R + b + r))^(H + a) * ((H + a) / (R + b + r))^d.
/// For d = 1 this is a density in r. Throws std::domain_error if
/// R + b + r = 0 with d = 1.
double l_dec(const VoxelStats& stats, const PriorParams& prior, double r, bool hit);
/// Decay factor on the ML map, exp(-lambda r) lambda^d with lambda = H / R,
/// or `fallback` where R = 0.
double l_dec_mlm(const VoxelStats& stats, double fallback, double r, bool hit);

/// log l(r, d) for one voxel in the given mode.
double voxel_log_likelihood(const VoxelStats& stats, const LikelihoodMode& mode, double r,
                            bool hit);

/// Sum of per-voxel log factors over a hit trace, with d = 1 only on the
/// terminal segment. A hit whose reflection point lies outside the grid
/// contributes pass factors only. Throws std::invalid_argument for traces of
/// out-of-range beams; use out_of_range_log_prob for those.
double beam_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                           const BeamTrace& trace);

enum class OutOfRange { kShortRange, kMaxRange };

/// log P(r < r_min) = log(1 - prod l(r_i, 0)) or log P(r > r_max) = sum log l(r_i, 0)
/// over a trace computed with radius r_min or r_max respectively.
double out_of_range_log_prob(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                             const BeamTrace& trace, OutOfRange kind);

/// Traces a map-frame beam and dispatches on its status.
double measurement_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                                  const Beam& beam);

/// Joint log-likelihood of a scan taken at `pose`.
double scan_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                           const Pose& pose, std::span<const SensorBeam> beams);

}  // namespace gridbelief
