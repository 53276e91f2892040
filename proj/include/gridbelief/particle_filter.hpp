#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridbelief/beam.hpp"
#include "gridbelief/geometry.hpp"
#include "gridbelief/likelihood.hpp"
#include "gridbelief/random.hpp"
#include "gridbelief/voxel_stats.hpp"

namespace gridbelief {

struct Particle {
  Pose pose;
  double log_weight = 0.0;
};

/// Thrown when every particle has zero likelihood.
class WeightCollapse : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ParticleSet {
  std::vector<Particle> particles;

  std::size_t size() const { return particles.size(); }
  /// Shifts log weights so that the weights sum to one.
  void normalize();
  std::vector<double> weights() const;
  double effective_sample_size() const;
};

struct MotionNoise {
  double trans_sigma = 0.1;  // meters, per axis
  double rot_sigma = 0.1;    // radians, per axis-angle component
  /// Restricts noise to x, y translation and rotation about z.
  bool planar = false;
};

/// Gaussian perturbation in the body frame: translation per axis and an
/// axis-angle rotation vector with independent components. Planar noise
/// leaves z, roll and pitch untouched.
Pose sample_perturbation(Rng& rng, double trans_sigma, double rot_sigma, bool planar = false);

/// `count` particles around `center` with uniform weights. Positions are
/// perturbed in the map frame, orientations in the body frame.
ParticleSet pf_init(const Pose& center, double trans_sigma, double rot_sigma,
                    std::size_t count, std::uint64_t seed, bool planar = false);

/// Low-variance (systematic) resampling; the result has uniform weights.
ParticleSet systematic_resample(const ParticleSet& set, Rng& rng);

/// One filter cycle: motion (odometry composed with sampled noise), scan
/// weighting, normalization, and systematic resampling when the effective
/// sample size drops below half the particle count. Throws WeightCollapse
/// if no particle has positive likelihood.
ParticleSet pf_step(const ParticleSet& set, const Pose& odometry, const MotionNoise& noise,
                    std::span<const SensorBeam> scan, const VoxelStatsGrid& grid,
                    const LikelihoodMode& mode, std::uint64_t seed);

/// Weighted mean position and weighted quaternion average (dominant
/// eigenvector of sum w q q^T).
Pose pf_estimate(const ParticleSet& set);

struct LocalizeOptions {
  std::size_t particles = 3000;
  double init_sigma_trans = 0.1;
  double init_sigma_rot = 0.1;
  MotionNoise noise;
  std::uint64_t seed = 1;
  std::size_t beam_step = 1;  // use every k-th beam of each scan
};

struct LocalizeStep {
  double timestamp = 0.0;
  Pose estimate;
};

/// Monte Carlo localization over a scan sequence. Particles start around
/// odometry[0]; step k applies the motion relative(odometry[k-1], odometry[k])
/// and weights with scans[k]. A WeightCollapse names the failing step.
std::vector<LocalizeStep> run_localization(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                                           std::span<const Pose> odometry,
                                           std::span<const std::vector<SensorBeam>> scans,
                                           std::span<const double> timestamps,
                                           const LocalizeOptions& options);

}  // namespace gridbelief
