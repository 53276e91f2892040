#include "gridbelief/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridbelief {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool has_evidence(const VoxelStats& s, MapModel model) {
  return model == MapModel::kReflection ? s.hits + s.misses > 0 : s.distance > 0.0;
}

double log_or_neg_inf(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// log of ((R + b) / (R + b + r))^A ((A) / (R + b + r))^d without forming the powers.
double log_l_dec(double shape, double rate, double r, bool hit) {
  if (r == 0.0 && !hit) return 0.0;
  const double denom = rate + r;
  if (!(denom > 0.0)) throw std::domain_error("decay likelihood needs R + beta + r > 0");
  double out = rate > 0.0 ? -shape * std::log1p(r / rate) : kNegInf;
  if (hit) out += std::log(shape) - std::log(denom);
  return out;
}

}  // namespace

LikelihoodMode LikelihoodMode::fmp(const PriorParams& prior,
                                   std::optional<PriorParams> unvisited_prior) {
  prior.validate();
  if (unvisited_prior) {
    unvisited_prior->validate();
    if (unvisited_prior->model != prior.model) {
      throw std::invalid_argument("unvisited-voxel prior must use the same model");
    }
  }
  LikelihoodMode m;
  m.kind = LikelihoodKind::kFmp;
  m.model = prior.model;
  m.prior = prior;
  m.unvisited_prior = unvisited_prior;
  return m;
}

LikelihoodMode LikelihoodMode::mlm(MapModel model, double ml_default,
                                   std::optional<double> voxel_floor) {
  if (!(ml_default >= 0.0) || (model == MapModel::kReflection && ml_default > 1.0)) {
    throw std::invalid_argument("ML default value outside the model's support");
  }
  LikelihoodMode m;
  m.kind = LikelihoodKind::kMlm;
  m.model = model;
  m.prior = PriorParams::flat(model);
  m.ml_default = ml_default;
  m.voxel_floor = voxel_floor;
  return m;
}

LikelihoodMode fmp_mode_for(const VoxelStatsGrid& grid, const PriorParams& prior) {
  if (prior.proper()) return LikelihoodMode::fmp(prior);
  return LikelihoodMode::fmp(prior, fit_prior(grid, prior.model));
}

LikelihoodMode mlm_mode_for(const VoxelStatsGrid& grid, MapModel model,
                            std::optional<double> voxel_floor) {
  const double fallback =
      model == MapModel::kReflection ? 0.5 : default_ml_value(model, fit_prior(grid, model));
  return LikelihoodMode::mlm(model, fallback, voxel_floor);
}

double l_ref(const VoxelStats& stats, const PriorParams& prior, bool hit) {
  const double a = static_cast<double>(stats.hits) + prior.alpha;
  const double b = static_cast<double>(stats.misses) + prior.beta;
  return (hit ? a : b) / (a + b);
}

double l_ref_mlm(const VoxelStats& stats, double fallback, bool hit) {
  const double mu = ml_value(stats, MapModel::kReflection, fallback);
  return hit ? mu : 1.0 - mu;
}

double l_dec(const VoxelStats& stats, const PriorParams& prior, double r, bool hit) {
  if (r == 0.0 && !hit) return 1.0;
  const double shape = static_cast<double>(stats.hits) + prior.alpha;
  const double rate = stats.distance + prior.beta;
  const double denom = rate + r;
  if (!(denom > 0.0)) throw std::domain_error("decay likelihood needs R + beta + r > 0");
  double out = std::pow(rate / denom, shape);
  if (hit) out *= shape / denom;
  return out;
}

double l_dec_mlm(const VoxelStats& stats, double fallback, double r, bool hit) {
  const double lambda = ml_value(stats, MapModel::kDecay, fallback);
  double out = std::exp(-lambda * r);
  if (hit) out *= lambda;
  return out;
}

double voxel_log_likelihood(const VoxelStats& stats, const LikelihoodMode& mode, double r,
                            bool hit) {
  if (mode.kind == LikelihoodKind::kFmp) {
    const PriorParams& prior = mode.unvisited_prior && !has_evidence(stats, mode.model)
                                   ? *mode.unvisited_prior
                                   : mode.prior;
    if (mode.model == MapModel::kReflection) return std::log(l_ref(stats, prior, hit));
    return log_l_dec(static_cast<double>(stats.hits) + prior.alpha, stats.distance + prior.beta,
                     r, hit);
  }
  double l = mode.model == MapModel::kReflection ? l_ref_mlm(stats, mode.ml_default, hit)
                                                 : l_dec_mlm(stats, mode.ml_default, r, hit);
  if (mode.voxel_floor && l < *mode.voxel_floor) l = *mode.voxel_floor;
  return log_or_neg_inf(l);
}

double beam_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                           const BeamTrace& trace) {
  if (trace.status != BeamStatus::kHit) {
    throw std::invalid_argument("beam_log_likelihood called with an out-of-range beam");
  }
  double sum = 0.0;
  const std::size_t n = trace.segments.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& seg = trace.segments[k];
    const bool hit = trace.terminal_hit && k + 1 == n;
    sum += voxel_log_likelihood(grid.at(seg.voxel), mode, seg.length, hit);
    if (sum == kNegInf) break;
  }
  return sum;
}

double out_of_range_log_prob(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                             const BeamTrace& trace, OutOfRange kind) {
  double pass = 0.0;
  for (const auto& seg : trace.segments) {
    pass += voxel_log_likelihood(grid.at(seg.voxel), mode, seg.length, false);
    if (pass == kNegInf) break;
  }
  if (kind == OutOfRange::kMaxRange) return pass;
  if (pass == kNegInf) return 0.0;
  return log_or_neg_inf(-std::expm1(pass));
}

double measurement_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                                  const Beam& beam) {
  const BeamTrace trace = trace_beam(grid.geometry(), beam);
  switch (beam.status) {
    case BeamStatus::kHit:
      return beam_log_likelihood(grid, mode, trace);
    case BeamStatus::kShortRange:
      return out_of_range_log_prob(grid, mode, trace, OutOfRange::kShortRange);
    case BeamStatus::kMaxRange:
      return out_of_range_log_prob(grid, mode, trace, OutOfRange::kMaxRange);
  }
  return kNegInf;
}

double scan_log_likelihood(const VoxelStatsGrid& grid, const LikelihoodMode& mode,
                           const Pose& pose, std::span<const SensorBeam> beams) {
  double sum = 0.0;
  for (const auto& b : beams) sum += measurement_log_likelihood(grid, mode, to_world(pose, b));
  return sum;
}

}  // namespace gridbelief
