#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridbelief/likelihood.hpp"
#include "gridbelief/mapping.hpp"
#include "gridbelief/random.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

/// Localization algorithms compared in the corridor experiment.
enum class CorridorMethod {
  kMlm,           // most likely map
  kFmpUniform,    // map posterior under the flat prior (Beta(1,1) / Gamma(1,0))
  kFmpConjugate,  // map posterior under the moment-matched conjugate prior
};

std::string_view to_string(CorridorMethod method);
CorridorMethod parse_corridor_method(std::string_view text);

/// How the simulated robot senses the corridor.
enum class CorridorSensor {
  /// Every observation is one draw of the voxel's own sensor model: a
  /// Bernoulli reflection event, or an exponential travel distance for the
  /// decay model (always a hit, so H = n, M = 0 after mapping). This is the
  /// default and matches the published corridor results.
  kSingleVoxel,
  /// A beam fired down the corridor that stops at the first reflecting voxel
  /// (decay: exponential depth censored at each voxel's far face).
  kForwardBeam,
};

std::string_view to_string(CorridorSensor sensor);
CorridorSensor parse_corridor_sensor(std::string_view text);

struct CorridorConfig {
  int length = 100;
  int n = 1;
  MapModel model = MapModel::kReflection;
  CorridorMethod method = CorridorMethod::kMlm;
  int runs = 10000;
  std::uint64_t seed = 1;
  CorridorSensor sensor = CorridorSensor::kSingleVoxel;

  void validate() const;
};

struct RunResult {
  std::vector<double> rho;  // one value per run
  double mean = 0.0;
  double variance = 0.0;  // population variance across runs
};

/// I.i.d. voxel values: Uniform(0, 1) reflection probabilities or Gamma(1, 1)
/// decay rates.
std::vector<double> synth_corridor_map(int length, MapModel model, Rng& rng);
std::vector<double> synth_corridor_map(int length, MapModel model, std::uint64_t seed);

/// Mapping phase: every voxel is observed exactly n times.
///
/// kSingleVoxel: reflection H ~ Binomial(n, mu), M = n - H, R = n; decay
/// H = n, R = sum of n Exponential(lambda) draws.
/// kForwardBeam: reflection as above; decay draws t ~ Exponential(lambda)
/// censored at 1 (t < 1: hit, R += t; else miss, R += 1).
VoxelStatsGrid simulate_mapping(std::span<const double> map, int n, MapModel model, Rng& rng,
                                CorridorSensor sensor = CorridorSensor::kSingleVoxel);

/// What the robot measures, relative to its own voxel.
struct CorridorReading {
  std::optional<std::int64_t> hit_offset;  // voxels ahead of the robot; none = max range
  double depth = 1.0;                      // distance travelled inside the hit voxel
};

/// Absolute outcome of a forward beam: the reflecting voxel (if any) and the
/// depth inside it.
struct CorridorOutcome {
  std::optional<std::int64_t> hit_voxel;
  double depth = 1.0;
};

/// Forward beam from `position`: reflection stops with probability mu_i in
/// each voxel; decay samples t ~ Exponential(lambda_i) and stops if t < 1.
CorridorOutcome simulate_beam(std::span<const double> map, std::int64_t position,
                              MapModel model, Rng& rng);

/// One single-voxel observation at `position`.
CorridorReading observe_voxel(std::span<const double> map, std::int64_t position,
                              MapModel model, Rng& rng);

/// Likelihood mode a corridor method localizes with, built from the run's map.
LikelihoodMode corridor_mode(const VoxelStatsGrid& grid, MapModel model, CorridorMethod method);

/// Per-cell log-likelihood of a corridor reading for a robot standing in
/// each cell. Caches the dense statistics of the run's map.
class CorridorLikelihood {
 public:
  CorridorLikelihood(const VoxelStatsGrid& grid, LikelihoodMode mode, CorridorSensor sensor);

  void evaluate(const CorridorReading& reading, std::span<double> out) const;
  std::size_t size() const { return stats_.size(); }

 private:
  const VoxelStatsGrid& grid_;
  LikelihoodMode mode_;
  CorridorSensor sensor_;
  std::vector<VoxelStats> stats_;
  std::vector<double> log_pass_;  // log l(1, 0) per cell
  std::vector<double> log_stop_;  // log l(1, 1) per cell (reflection only)
};

/// Mapping, prior fit and a `length`-step histogram-filter pass with cyclic
/// deterministic motion; rho is the mean over steps of the predicted belief
/// at the true cell. Runs use independent streams derived from (seed, run),
/// so different methods with the same seed see identical data.
RunResult run_corridor_experiment(const CorridorConfig& config);

double corridor_run_rho(const CorridorConfig& config, std::uint64_t run_index);

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;  // one-tailed, alternative: mean(a - b) > 0
};

/// Paired one-tailed Student's t-test. Throws for fewer than two pairs or
/// differing lengths.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct SweepRow {
  int n = 1;
  CorridorMethod method = CorridorMethod::kMlm;
  MapModel model = MapModel::kReflection;
  RunResult result;
  int runs = 0;
  std::uint64_t seed = 0;
  std::optional<double> p_vs_mlm;          // method better than MLM
  std::optional<double> p_vs_fmp_uniform;  // method better than FMP-uniform
};

/// All three methods for every n, paired on identical data.
std::vector<SweepRow> run_corridor_sweep(MapModel model, std::span<const int> n_list, int runs,
                                         std::uint64_t seed, int length = 100,
                                         CorridorSensor sensor = CorridorSensor::kSingleVoxel);

/// Columns: n,method,model,mean_rho,var_rho,runs,seed,p_vs_mlm,p_vs_fmp_uniform
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace gridbelief
