#include "gridbelief/particle_filter.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gridbelief/parallel.hpp"

namespace gridbelief {

void ParticleSet::normalize() {
  if (particles.empty()) throw std::invalid_argument("particle set is empty");
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& p : particles) top = std::max(top, p.log_weight);
  if (!std::isfinite(top)) throw WeightCollapse("all particle weights are zero");
  double sum = 0.0;
  for (const auto& p : particles) sum += std::exp(p.log_weight - top);
  const double shift = top + std::log(sum);
  for (auto& p : particles) p.log_weight -= shift;
}

std::vector<double> ParticleSet::weights() const {
  std::vector<double> w;
  w.reserve(particles.size());
  for (const auto& p : particles) w.push_back(std::exp(p.log_weight));
  return w;
}

double ParticleSet::effective_sample_size() const {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& p : particles) {
    const double w = std::exp(p.log_weight);
    sum += w;
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

Pose sample_perturbation(Rng& rng, double trans_sigma, double rot_sigma, bool planar) {
  Pose out;
  if (trans_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, trans_sigma);
    for (int a = 0; a < (planar ? 2 : 3); ++a) out.position[a] = n(rng);
  }
  if (rot_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, rot_sigma);
    const Vec3 v = planar ? Vec3(0.0, 0.0, n(rng)) : Vec3(n(rng), n(rng), n(rng));
    const double angle = v.norm();
    if (angle > 0.0) out.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(angle, v / angle));
  }
  return out;
}

ParticleSet pf_init(const Pose& center, double trans_sigma, double rot_sigma,
                    std::size_t count, std::uint64_t seed, bool planar) {
  if (count == 0) throw std::invalid_argument("particle count must be at least one");
  if (!(trans_sigma >= 0.0) || !(rot_sigma >= 0.0)) {
    throw std::invalid_argument("initial sigmas must be non-negative");
  }
  Rng rng(seed);
  ParticleSet set;
  set.particles.reserve(count);
  const double log_w = -std::log(static_cast<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Pose d = sample_perturbation(rng, trans_sigma, rot_sigma, planar);
    Pose p;
    p.position = center.position + d.position;
    p.orientation = (center.orientation * d.orientation).normalized();
    set.particles.push_back({p, log_w});
  }
  return set;
}

ParticleSet systematic_resample(const ParticleSet& set, Rng& rng) {
  const std::size_t n = set.size();
  const std::vector<double> w = set.weights();
  std::uniform_real_distribution<double> u(0.0, 1.0 / static_cast<double>(n));
  const double start = u(rng);
  ParticleSet out;
  out.particles.reserve(n);
  const double log_w = -std::log(static_cast<double>(n));
  double cumulative = w[0];
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = start + static_cast<double>(k) / static_cast<double>(n);
    while (target > cumulative && i + 1 < n) cumulative += w[++i];
    out.particles.push_back({set.particles[i].pose, log_w});
  }
  return out;
}

ParticleSet pf_step(const ParticleSet& set, const Pose& odometry, const MotionNoise& noise,
                    std::span<const SensorBeam> scan, const VoxelStatsGrid& grid,
                    const LikelihoodMode& mode, std::uint64_t seed) {
  if (scan.empty()) throw std::invalid_argument("pf_step needs a non-empty scan");
  Rng rng(seed);
  ParticleSet out = set;
  for (auto& p : out.particles) {
    const Pose e = sample_perturbation(rng, noise.trans_sigma, noise.rot_sigma, noise.planar);
    p.pose = compose(compose(p.pose, odometry), e);
  }
  std::vector<double> log_liks(out.size());
  parallel_for(out.size(), [&](std::size_t i) {
    log_liks[i] = scan_log_likelihood(grid, mode, out.particles[i].pose, scan);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out.particles[i].log_weight += log_liks[i];
  out.normalize();
  if (out.effective_sample_size() < 0.5 * static_cast<double>(out.size())) {
    out = systematic_resample(out, rng);
  }
  return out;
}

Pose pf_estimate(const ParticleSet& set) {
  if (set.particles.empty()) throw std::invalid_argument("particle set is empty");
  const std::vector<double> w = set.weights();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw WeightCollapse("particle weights sum to zero");

  Vec3 position = Vec3::Zero();
  Eigen::Matrix4d scatter = Eigen::Matrix4d::Zero();
  std::size_t heaviest = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double wi = w[i] / total;
    position += wi * set.particles[i].pose.position;
    const Eigen::Vector4d q = set.particles[i].pose.orientation.coeffs();
    scatter += wi * q * q.transpose();
    if (w[i] > w[heaviest]) heaviest = i;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(scatter);
  Eigen::Vector4d q = eig.eigenvectors().col(3);
  if (q.dot(set.particles[heaviest].pose.orientation.coeffs()) < 0.0) q = -q;
  Eigen::Quaterniond orientation(q[3], q[0], q[1], q[2]);
  Pose out;
  out.position = position;
  out.orientation = orientation.normalized();
  return out;
}

std::vector<LocalizeStep> run_localization(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                                           std::span<const Pose> odometry,
                                           std::span<const std::vector<SensorBeam>> scans,
                                           std::span<const double> timestamps,
                                           const LocalizeOptions& options) {
  if (odometry.size() != scans.size() || timestamps.size() != scans.size()) {
    throw std::invalid_argument("odometry, scans and timestamps differ in length");
  }
  if (options.beam_step == 0) throw std::invalid_argument("beam step must be at least one");
  std::vector<LocalizeStep> out;
  if (scans.empty()) return out;
  ParticleSet set = pf_init(odometry[0], options.init_sigma_trans, options.init_sigma_rot,
                            options.particles, derive_seed(options.seed, 0), options.noise.planar);
  std::vector<SensorBeam> used;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    used.clear();
    for (std::size_t b = 0; b < scans[k].size(); b += options.beam_step) used.push_back(scans[k][b]);
    // The first scan only weights the initial spread.
    const Pose motion = k == 0 ? Pose() : relative(odometry[k - 1], odometry[k]);
    const MotionNoise noise = k == 0 ? MotionNoise{0.0, 0.0, options.noise.planar} : options.noise;
    try {
      set = pf_step(set, motion, noise, used, grid, mode, derive_seed(options.seed, k + 1));
    } catch (const WeightCollapse&) {
      throw WeightCollapse("particle weights collapsed at step " + std::to_string(k));
    }
    out.push_back({timestamps[k], pf_estimate(set)});
  }
  return out;
}

}  // namespace gridbelief
