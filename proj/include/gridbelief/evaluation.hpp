#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gridbelief/geometry.hpp"
#include "gridbelief/likelihood.hpp"
#include "gridbelief/mapping.hpp"
#include "gridbelief/scan_log.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// Cumulated measurement log-likelihoods at the logged (ground-truth) poses.
/// Beams that are impossible under MLM are dropped from both sums.
struct LoglikReport {
  double mlm_sum = 0.0;
  double fmp_sum = 0.0;
  double mlm_hit = 0.0;  // share of the sums from hit beams
  double fmp_hit = 0.0;
  double mlm_out_of_range = 0.0;  // share from short- and max-range beams
  double fmp_out_of_range = 0.0;
  double ratio = 0.0;  // mlm_sum / fmp_sum
  std::size_t included = 0;
  std::size_t excluded = 0;
};

/// MLM and FMP modes are built from `grid` and `prior` (see mlm_mode_for and
/// fmp_mode_for). Throws std::invalid_argument for an empty scan list and
/// std::domain_error when every beam is excluded.
LoglikReport loglik_ratio(const VoxelStatsGrid& grid, std::span<const ScanRecord> scans,
                          const PriorParams& prior);

/// Sample poses for the KL estimate: a square lattice of floor(sqrt(samples))^2
/// points spanning +-4 sigma around `center` in x and y, cell-centred and
/// shifted as a whole by a seed-dependent offset of at most a quarter cell.
/// Orientation and z are those of `center`.
std::vector<Pose> kl_sample_poses(const Pose& center, double sigma, int samples,
                                  std::uint64_t seed);

/// Discrete KL divergence sum p log(p / q) after normalizing both unnormalized
/// log weights over the samples. +inf when q vanishes where p does not.
double kl_from_log_weights(std::span<const double> log_p, std::span<const double> log_q);

/// KL(p_gt || p) with p_gt an isotropic normal of std `sigma` in x, y around
/// `center` and p proportional to exp(log_lik_fn). Requires samples >= 100.
double kl_divergence_mc(const Pose& center, double sigma,
                        const std::function<double(const Pose&)>& log_lik_fn, int samples,
                        std::uint64_t seed);

struct KlReport {
  double mlm_sum = 0.0;
  double fmp_sum = 0.0;
  double ratio = 0.0;  // mlm_sum / fmp_sum
  std::size_t scans = 0;
  std::size_t included_beams = 0;
  std::size_t excluded_beams = 0;  // impossible under MLM at some sample pose
};

/// Cumulated KL divergences between the ground-truth pose distribution and
/// the scan likelihood, one term per scan. Beams that are impossible under
/// MLM at any sample pose are dropped from both modes for that scan.
KlReport kl_ratio(const VoxelStatsGrid& grid, std::span<const ScanRecord> scans,
                  const PriorParams& prior, double sigma = 0.05, int samples = 441,
                  std::uint64_t seed = 1);

}  // namespace gridbelief
