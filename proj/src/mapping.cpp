#include "gridbelief/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridbelief {

std::string_view to_string(MapModel model) {
  return model == MapModel::kReflection ? "reflection" : "decay";
}

MapModel parse_map_model(std::string_view text) {
  if (text == "reflection" || text == "ref") return MapModel::kReflection;
  if (text == "decay" || text == "dec") return MapModel::kDecay;
  throw std::invalid_argument("unknown map model: " + std::string(text));
}

PriorParams PriorParams::flat(MapModel model) {
  return model == MapModel::kReflection ? PriorParams{model, 1.0, 1.0}
                                        : PriorParams{model, 1.0, 0.0};
}

bool PriorParams::valid() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) return false;
  return model == MapModel::kReflection ? beta > 0.0 : beta >= 0.0;
}

void PriorParams::validate() const {
  if (!valid()) {
    throw std::invalid_argument("invalid prior parameters for the " +
                                std::string(to_string(model)) + " model");
  }
}

bool PriorParams::proper() const { return valid() && beta > 0.0; }

double PriorParams::mean() const {
  if (!proper()) throw std::logic_error("improper prior has no mean");
  return model == MapModel::kReflection ? alpha / (alpha + beta) : alpha / beta;
}

double PosteriorParams::mean() const {
  return model == MapModel::kReflection ? a / (a + b) : a / b;
}

std::optional<double> PosteriorParams::mode() const {
  if (model == MapModel::kReflection) {
    if (a > 1.0 && b > 1.0) return (a - 1.0) / (a + b - 2.0);
    if (a <= 1.0 && b > 1.0) return 0.0;
    if (a > 1.0 && b <= 1.0) return 1.0;
    return std::nullopt;
  }
  if (!(b > 0.0)) return std::nullopt;
  return a >= 1.0 ? (a - 1.0) / b : 0.0;
}

double PosteriorParams::log_density(double x) const {
  if (model == MapModel::kReflection) {
    if (x < 0.0 || x > 1.0) return -INFINITY;
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
           (b - 1.0) * std::log1p(-x);
  }
  if (x < 0.0) return -INFINITY;
  return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
}

void update_stats(VoxelStatsGrid& grid, const BeamTrace& trace) {
  const auto count = grid.geometry().voxel_count();
  for (const auto& s : trace.segments) {
    if (s.voxel >= count) throw std::out_of_range("trace voxel index outside the grid");
  }
  for (std::size_t k = 0; k < trace.segments.size(); ++k) {
    const auto& seg = trace.segments[k];
    VoxelStats& v = grid.mutable_at(seg.voxel);
    v.distance += seg.length;
    if (trace.terminal_hit && k + 1 == trace.segments.size()) {
      ++v.hits;
    } else {
      ++v.misses;
    }
  }
}

std::size_t integrate_scan(VoxelStatsGrid& grid, const Pose& pose,
                           std::span<const SensorBeam> beams) {
  std::size_t used = 0;
  for (const auto& b : beams) {
    if (b.status == BeamStatus::kShortRange) continue;
    update_stats(grid, trace_beam(grid.geometry(), to_world(pose, b)));
    ++used;
  }
  return used;
}

PosteriorParams posterior(const VoxelStats& stats, const PriorParams& prior) {
  const auto h = static_cast<double>(stats.hits);
  if (prior.model == MapModel::kReflection) {
    return {prior.model, h + prior.alpha, static_cast<double>(stats.misses) + prior.beta};
  }
  return {prior.model, h + prior.alpha, stats.distance + prior.beta};
}

double ml_value(const VoxelStats& stats, MapModel model, double fallback) {
  const auto h = static_cast<double>(stats.hits);
  if (model == MapModel::kReflection) {
    const auto n = h + static_cast<double>(stats.misses);
    return n > 0.0 ? h / n : fallback;
  }
  return stats.distance > 0.0 ? h / stats.distance : fallback;
}

double default_ml_value(MapModel model, const PriorParams& prior) {
  if (model == MapModel::kReflection) return 0.5;
  return prior.mean();
}

PriorParams moment_match_prior(std::span<const double> values, MapModel model) {
  if (values.size() < 2) {
    throw std::invalid_argument("moment matching needs at least two values");
  }
  double mean = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || (model == MapModel::kReflection && v > 1.0)) {
      throw std::invalid_argument("map value outside the model's support");
    }
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());

  return prior_from_moments(mean, var, model);
}

PriorParams prior_from_moments(double mean, double variance, MapModel model) {
  if (!(variance > 0.0)) throw std::invalid_argument("moment matching needs non-zero variance");
  double alpha = 0.0;
  double beta = 0.0;
  if (model == MapModel::kReflection) {
    const double e = mean;
    const double v = variance;
    alpha = -e * (e * e - e + v) / v;
    beta = (e - v + e * v - 2.0 * e * e + e * e * e) / v;
  } else {
    alpha = mean * mean / variance;
    beta = mean / variance;
  }
  return {model, std::max(alpha, kPriorFloor), std::max(beta, kPriorFloor)};
}

PriorParams fit_prior(const VoxelStatsGrid& grid, MapModel model) {
  std::vector<double> values;
  for (const auto& [index, s] : grid.sorted_entries()) {
    const bool evidence =
        model == MapModel::kReflection ? s.hits + s.misses > 0 : s.distance > 0.0;
    if (evidence) values.push_back(ml_value(s, model, 0.0));
  }
  return moment_match_prior(values, model);
}

}  // namespace gridbelief
