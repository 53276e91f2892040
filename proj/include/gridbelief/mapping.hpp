#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "gridbelief/raycast.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// Which forward sensor model a map encodes: per-voxel reflection
/// probability (Beta posterior) or per-voxel decay rate (Gamma posterior).
enum class MapModel { kReflection, kDecay };

std::string_view to_string(MapModel model);
MapModel parse_map_model(std::string_view text);

/// Prior over a voxel value: Beta(alpha, beta) for reflection maps,
/// Gamma(alpha, beta) with rate beta for decay maps.
struct PriorParams {
  MapModel model = MapModel::kReflection;
  double alpha = 1.0;
  double beta = 1.0;

  /// Beta(1, 1) for reflection; the improper Gamma(1, 0) for decay.
  static PriorParams flat(MapModel model);
  bool valid() const;
  void validate() const;
  /// Gamma(a, 0) is improper and has no mean.
  bool proper() const;
  double mean() const;

  bool operator==(const PriorParams&) const = default;
};

/// Beta(a, b) over the reflection probability or Gamma(a, b) over the decay rate.
struct PosteriorParams {
  MapModel model = MapModel::kReflection;
  double a = 1.0;
  double b = 1.0;

  double mean() const;
  /// Interior or boundary mode; absent where the density has none (b = 0 for Gamma).
  std::optional<double> mode() const;
  double log_density(double x) const;

  bool operator==(const PosteriorParams&) const = default;
};

/// Accumulates one traced beam: every segment adds its length to the voxel's
/// distance, the reflecting voxel gains a hit, all other voxels a miss.
/// Throws std::out_of_range (grid unchanged) if any index is outside the grid.
void update_stats(VoxelStatsGrid& grid, const BeamTrace& trace);

/// Traces and accumulates every beam of a scan taken at `pose`. Short-range
/// beams carry no segment evidence and are skipped. Returns the number of
/// beams integrated.
std::size_t integrate_scan(VoxelStatsGrid& grid, const Pose& pose,
                           std::span<const SensorBeam> beams);

/// Closed-form posterior: Beta(H + alpha, M + beta) or Gamma(H + alpha, R + beta).
PosteriorParams posterior(const VoxelStats& stats, const PriorParams& prior);

/// Maximum-likelihood voxel value, H / (H + M) or H / R, or `fallback` when
/// the voxel carries no evidence.
double ml_value(const VoxelStats& stats, MapModel model, double fallback);

/// Default ML value for voxels without evidence: 0.5 for reflection, the
/// prior mean for decay.
double default_ml_value(MapModel model, const PriorParams& prior);

inline constexpr double kPriorFloor = 1e-3;

/// Chooses (alpha, beta) so that the prior's mean and variance equal the
/// empirical moments of `values`. Both parameters are clamped below at
/// kPriorFloor. Throws std::invalid_argument for fewer than two values, zero
/// variance, or reflection values outside [0, 1].
PriorParams moment_match_prior(std::span<const double> values, MapModel model);

/// Moment matching from already computed mean and (population) variance.
PriorParams prior_from_moments(double mean, double variance, MapModel model);

/// Moment-matched prior fitted to the ML values of every voxel with evidence
/// (H + M > 0 for reflection, R > 0 for decay).
PriorParams fit_prior(const VoxelStatsGrid& grid, MapModel model);

}  // namespace gridbelief
