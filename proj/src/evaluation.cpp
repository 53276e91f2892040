#include "gridbelief/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridbelief/parallel.hpp"
#include "gridbelief/random.hpp"

namespace gridbelief {

namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double gaussian_log_weight(const Pose& p, const Pose& center, double sigma) {
  const double dx = p.position.x() - center.position.x();
  const double dy = p.position.y() - center.position.y();
  return -0.5 * (dx * dx + dy * dy) / (sigma * sigma);
}

}  // namespace

LoglikReport loglik_ratio(const VoxelStatsGrid& grid, std::span<const ScanRecord> scans,
                          const PriorParams& prior) {
  if (scans.empty()) throw std::invalid_argument("no scans to evaluate");
  const LikelihoodMode mlm = mlm_mode_for(grid, prior.model);
  const LikelihoodMode fmp = fmp_mode_for(grid, prior);
  LoglikReport r;
  for (const auto& scan : scans) {
    for (const auto& b : scan.beams) {
      const Beam beam = to_world(scan.pose, b);
      const double lm = measurement_log_likelihood(grid, mlm, beam);
      const double lf = measurement_log_likelihood(grid, fmp, beam);
      if (!std::isfinite(lm) || !std::isfinite(lf)) {
        ++r.excluded;
        continue;
      }
      ++r.included;
      r.mlm_sum += lm;
      r.fmp_sum += lf;
      if (b.status == BeamStatus::kHit) {
        r.mlm_hit += lm;
        r.fmp_hit += lf;
      } else {
        r.mlm_out_of_range += lm;
        r.fmp_out_of_range += lf;
      }
    }
  }
  if (r.included == 0) throw std::domain_error("every beam was excluded");
  r.ratio = r.mlm_sum / r.fmp_sum;
  return r;
}

std::vector<Pose> kl_sample_poses(const Pose& center, double sigma, int samples,
                                  std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("KL estimate needs at least 100 samples");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(samples))));
  const double h = 8.0 * sigma / m;
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25 * h, 0.25 * h);
  const double ox = jitter(rng);
  const double oy = jitter(rng);
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      Pose p = center;
      p.position.x() += -4.0 * sigma + (i + 0.5) * h + ox;
      p.position.y() += -4.0 * sigma + (j + 0.5) * h + oy;
      out.push_back(p);
    }
  }
  return out;
}

double kl_from_log_weights(std::span<const double> log_p, std::span<const double> log_q) {
  if (log_p.size() != log_q.size() || log_p.empty()) {
    throw std::invalid_argument("KL inputs must be non-empty and of equal length");
  }
  const double zp = log_sum_exp(log_p);
  const double zq = log_sum_exp(log_q);
  if (!std::isfinite(zp)) throw std::domain_error("reference distribution has no mass");
  if (!std::isfinite(zq)) return std::numeric_limits<double>::infinity();
  double kl = 0.0;
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    const double lp = log_p[i] - zp;
    if (!std::isfinite(lp)) continue;
    const double lq = log_q[i] - zq;
    if (!std::isfinite(lq)) return std::numeric_limits<double>::infinity();
    kl += std::exp(lp) * (lp - lq);
  }
  return std::max(kl, 0.0);
}

double kl_divergence_mc(const Pose& center, double sigma,
                        const std::function<double(const Pose&)>& log_lik_fn, int samples,
                        std::uint64_t seed) {
  const std::vector<Pose> poses = kl_sample_poses(center, sigma, samples, seed);
  std::vector<double> log_p(poses.size());
  std::vector<double> log_q(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    log_p[i] = gaussian_log_weight(poses[i], center, sigma);
    log_q[i] = log_lik_fn(poses[i]);
  }
  return kl_from_log_weights(log_p, log_q);
}

KlReport kl_ratio(const VoxelStatsGrid& grid, std::span<const ScanRecord> scans,
                  const PriorParams& prior, double sigma, int samples, std::uint64_t seed) {
  if (scans.empty()) throw std::invalid_argument("no scans to evaluate");
  const LikelihoodMode mlm = mlm_mode_for(grid, prior.model);
  const LikelihoodMode fmp = fmp_mode_for(grid, prior);
  KlReport r;
  for (std::size_t s = 0; s < scans.size(); ++s) {
    const ScanRecord& scan = scans[s];
    const std::vector<Pose> poses = kl_sample_poses(scan.pose, sigma, samples, derive_seed(seed, s));
    const std::size_t nb = scan.beams.size();
    // Per-beam log-likelihoods at every sample pose, beam-major.
    std::vector<double> lm(nb * poses.size());
    std::vector<double> lf(nb * poses.size());
    parallel_for(poses.size(), [&](std::size_t i) {
      for (std::size_t b = 0; b < nb; ++b) {
        const Beam beam = to_world(poses[i], scan.beams[b]);
        lm[b * poses.size() + i] = measurement_log_likelihood(grid, mlm, beam);
        lf[b * poses.size() + i] = measurement_log_likelihood(grid, fmp, beam);
      }
    });
    std::vector<double> sum_m(poses.size(), 0.0);
    std::vector<double> sum_f(poses.size(), 0.0);
    std::size_t used = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto first = b * poses.size();
      bool finite = true;
      for (std::size_t i = 0; i < poses.size() && finite; ++i) {
        finite = std::isfinite(lm[first + i]) && std::isfinite(lf[first + i]);
      }
      if (!finite) {
        ++r.excluded_beams;
        continue;
      }
      ++used;
      for (std::size_t i = 0; i < poses.size(); ++i) {
        sum_m[i] += lm[first + i];
        sum_f[i] += lf[first + i];
      }
    }
    r.included_beams += used;
    if (used == 0) continue;
    std::vector<double> log_gt(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
      log_gt[i] = gaussian_log_weight(poses[i], scan.pose, sigma);
    }
    r.mlm_sum += kl_from_log_weights(log_gt, sum_m);
    r.fmp_sum += kl_from_log_weights(log_gt, sum_f);
    ++r.scans;
  }
  if (r.scans == 0) throw std::domain_error("every beam was excluded");
  r.ratio = r.mlm_sum / r.fmp_sum;
  return r;
}

}  // namespace gridbelief
