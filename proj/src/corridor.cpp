#include "gridbelief/corridor.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gridbelief/histogram_filter.hpp"
#include "gridbelief/parallel.hpp"
#include "gridbelief/raycast.hpp"

namespace gridbelief {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double draw_exponential(double rate, Rng& rng) {
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return std::exponential_distribution<double>(rate)(rng);
}

GridGeometry corridor_geometry(std::size_t length) {
  return GridGeometry(Cell(static_cast<std::int64_t>(length), 1, 1), 1.0);
}

}  // namespace

std::string_view to_string(CorridorMethod method) {
  switch (method) {
    case CorridorMethod::kMlm:
      return "mlm";
    case CorridorMethod::kFmpUniform:
      return "fmp_uniform";
    case CorridorMethod::kFmpConjugate:
      return "fmp_conjugate";
  }
  return "unknown";
}

CorridorMethod parse_corridor_method(std::string_view text) {
  if (text == "mlm") return CorridorMethod::kMlm;
  if (text == "fmp_uniform" || text == "fmp-uniform") return CorridorMethod::kFmpUniform;
  if (text == "fmp_conjugate" || text == "fmp-conjugate") return CorridorMethod::kFmpConjugate;
  throw std::invalid_argument("unknown corridor method: " + std::string(text));
}

std::string_view to_string(CorridorSensor sensor) {
  return sensor == CorridorSensor::kSingleVoxel ? "single-voxel" : "forward-beam";
}

CorridorSensor parse_corridor_sensor(std::string_view text) {
  if (text == "single-voxel" || text == "single_voxel") return CorridorSensor::kSingleVoxel;
  if (text == "forward-beam" || text == "forward_beam") return CorridorSensor::kForwardBeam;
  throw std::invalid_argument("unknown corridor sensor: " + std::string(text));
}

void CorridorConfig::validate() const {
  if (length < 2) throw std::invalid_argument("corridor length must be at least 2");
  if (n < 1) throw std::invalid_argument("observations per voxel must be at least 1");
  if (runs < 1) throw std::invalid_argument("run count must be at least 1");
}

std::vector<double> synth_corridor_map(int length, MapModel model, Rng& rng) {
  if (length < 1) throw std::invalid_argument("corridor length must be positive");
  std::vector<double> map(static_cast<std::size_t>(length));
  if (model == MapModel::kReflection) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : map) v = u(rng);
  } else {
    std::gamma_distribution<double> g(1.0, 1.0);
    for (double& v : map) v = g(rng);
  }
  return map;
}

std::vector<double> synth_corridor_map(int length, MapModel model, std::uint64_t seed) {
  Rng rng(seed);
  return synth_corridor_map(length, model, rng);
}

VoxelStatsGrid simulate_mapping(std::span<const double> map, int n, MapModel model, Rng& rng,
                                CorridorSensor sensor) {
  if (n < 1) throw std::invalid_argument("observations per voxel must be at least 1");
  VoxelStatsGrid grid(corridor_geometry(map.size()));
  const auto count = static_cast<std::uint64_t>(n);
  for (std::size_t i = 0; i < map.size(); ++i) {
    VoxelStats s;
    if (model == MapModel::kReflection) {
      s.hits = std::binomial_distribution<std::uint64_t>(count, map[i])(rng);
      s.misses = count - s.hits;
      s.distance = static_cast<double>(n);
    } else if (sensor == CorridorSensor::kSingleVoxel) {
      s.hits = count;
      for (int k = 0; k < n; ++k) s.distance += draw_exponential(map[i], rng);
    } else {
      for (int k = 0; k < n; ++k) {
        const double t = draw_exponential(map[i], rng);
        if (t < 1.0) {
          ++s.hits;
          s.distance += t;
        } else {
          ++s.misses;
          s.distance += 1.0;
        }
      }
    }
    grid.set(i, s);
  }
  return grid;
}

CorridorOutcome simulate_beam(std::span<const double> map, std::int64_t position,
                              MapModel model, Rng& rng) {
  const auto length = static_cast<std::int64_t>(map.size());
  if (position < 0 || position >= length) {
    throw std::invalid_argument("corridor position out of range");
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t v = position; v < length; ++v) {
    const double value = map[static_cast<std::size_t>(v)];
    if (model == MapModel::kReflection) {
      if (u(rng) < value) return {v, 1.0};
    } else {
      const double t = draw_exponential(value, rng);
      if (t < 1.0) return {v, t};
    }
  }
  return {};
}

CorridorReading observe_voxel(std::span<const double> map, std::int64_t position,
                              MapModel model, Rng& rng) {
  if (position < 0 || position >= static_cast<std::int64_t>(map.size())) {
    throw std::invalid_argument("corridor position out of range");
  }
  const double value = map[static_cast<std::size_t>(position)];
  if (model == MapModel::kReflection) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < value) return {0, 1.0};
    return {};
  }
  return {0, draw_exponential(value, rng)};
}

LikelihoodMode corridor_mode(const VoxelStatsGrid& grid, MapModel model,
                             CorridorMethod method) {
  switch (method) {
    case CorridorMethod::kMlm:
      return mlm_mode_for(grid, model);
    case CorridorMethod::kFmpUniform:
      return fmp_mode_for(grid, PriorParams::flat(model));
    case CorridorMethod::kFmpConjugate:
      return LikelihoodMode::fmp(fit_prior(grid, model));
  }
  throw std::invalid_argument("unknown corridor method");
}

CorridorLikelihood::CorridorLikelihood(const VoxelStatsGrid& grid, LikelihoodMode mode,
                                       CorridorSensor sensor)
    : grid_(grid), mode_(std::move(mode)), sensor_(sensor), stats_(grid.densified()) {
  log_pass_.resize(stats_.size());
  log_stop_.resize(stats_.size());
  for (std::size_t c = 0; c < stats_.size(); ++c) {
    log_pass_[c] = voxel_log_likelihood(stats_[c], mode_, 1.0, false);
    if (mode_.model == MapModel::kReflection) {
      log_stop_[c] = voxel_log_likelihood(stats_[c], mode_, 1.0, true);
    }
  }
}

void CorridorLikelihood::evaluate(const CorridorReading& reading, std::span<double> out) const {
  const std::size_t n = stats_.size();
  if (out.size() != n) throw std::invalid_argument("output span has the wrong length");

  if (sensor_ == CorridorSensor::kSingleVoxel) {
    if (mode_.model == MapModel::kReflection) {
      const auto& table = reading.hit_offset ? log_stop_ : log_pass_;
      std::copy(table.begin(), table.end(), out.begin());
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      out[c] = voxel_log_likelihood(stats_[c], mode_, reading.depth, reading.hit_offset.has_value());
    }
    return;
  }

  const auto length = static_cast<std::int64_t>(n);
  for (std::int64_t c = 0; c < length; ++c) {
    if (!reading.hit_offset) {
      const BeamTrace trace = trace_corridor(c, length, std::nullopt);
      out[static_cast<std::size_t>(c)] =
          out_of_range_log_prob(grid_, mode_, trace, OutOfRange::kMaxRange);
      continue;
    }
    const std::int64_t hit = c + *reading.hit_offset;
    if (hit >= length) {
      out[static_cast<std::size_t>(c)] = kNegInf;
      continue;
    }
    const BeamTrace trace = trace_corridor(c, length, hit, reading.depth);
    out[static_cast<std::size_t>(c)] = beam_log_likelihood(grid_, mode_, trace);
  }
}

double corridor_run_rho(const CorridorConfig& config, std::uint64_t run_index) {
  Rng rng(derive_seed(config.seed, run_index));
  const std::vector<double> map = synth_corridor_map(config.length, config.model, rng);
  const VoxelStatsGrid grid = simulate_mapping(map, config.n, config.model, rng, config.sensor);
  const CorridorLikelihood likelihood(grid, corridor_mode(grid, config.model, config.method),
                                      config.sensor);

  const auto cells = static_cast<std::size_t>(config.length);
  HistogramBelief belief = HistogramBelief::uniform(cells);
  std::vector<double> log_liks(cells);
  double rho = 0.0;
  for (std::size_t step = 0; step < cells; ++step) {
    belief = histogram_predict(belief, 1, Boundary::kWrap);
    const auto truth = static_cast<std::int64_t>(step);
    rho += belief[step];

    CorridorReading reading;
    if (config.sensor == CorridorSensor::kSingleVoxel) {
      reading = observe_voxel(map, truth, config.model, rng);
    } else {
      const CorridorOutcome outcome = simulate_beam(map, truth, config.model, rng);
      if (outcome.hit_voxel) reading.hit_offset = *outcome.hit_voxel - truth;
      reading.depth = outcome.depth;
    }
    likelihood.evaluate(reading, log_liks);
    // A reading every cell rules out restarts the filter from the uniform prior.
    auto updated = try_histogram_update(belief, log_liks);
    belief = updated ? std::move(*updated) : HistogramBelief::uniform(cells);
  }
  return rho / static_cast<double>(cells);
}

RunResult run_corridor_experiment(const CorridorConfig& config) {
  config.validate();
  RunResult result;
  result.rho.resize(static_cast<std::size_t>(config.runs));
  parallel_for(result.rho.size(), [&](std::size_t r) { result.rho[r] = corridor_run_rho(config, r); });
  double sum = 0.0;
  for (double v : result.rho) sum += v;
  result.mean = sum / static_cast<double>(result.rho.size());
  double sq = 0.0;
  for (double v : result.rho) sq += (v - result.mean) * (v - result.mean);
  result.variance = sq / static_cast<double>(result.rho.size());
  return result;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  if (a.size() < 2) throw std::invalid_argument("paired t-test needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  TTestResult out;
  out.dof = n - 1.0;
  const double se = std::sqrt(ss / (n - 1.0) / n);
  if (se == 0.0) {
    out.t = mean > 0.0 ? INFINITY : (mean < 0.0 ? -INFINITY : 0.0);
    out.p_value = mean > 0.0 ? 0.0 : (mean < 0.0 ? 1.0 : 0.5);
    return out;
  }
  out.t = mean / se;
  const boost::math::students_t dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

std::vector<SweepRow> run_corridor_sweep(MapModel model, std::span<const int> n_list, int runs,
                                         std::uint64_t seed, int length,
                                         CorridorSensor sensor) {
  constexpr CorridorMethod kMethods[] = {CorridorMethod::kMlm, CorridorMethod::kFmpUniform,
                                         CorridorMethod::kFmpConjugate};
  std::vector<SweepRow> rows;
  for (int n : n_list) {
    const std::size_t first = rows.size();
    for (CorridorMethod method : kMethods) {
      CorridorConfig config{length, n, model, method, runs, seed, sensor};
      SweepRow row;
      row.n = n;
      row.method = method;
      row.model = model;
      row.result = run_corridor_experiment(config);
      row.runs = runs;
      row.seed = seed;
      rows.push_back(std::move(row));
    }
    if (runs < 2) continue;
    const auto& mlm = rows[first].result.rho;
    const auto& uniform = rows[first + 1].result.rho;
    for (std::size_t k = first + 1; k < rows.size(); ++k) {
      rows[k].p_vs_mlm = paired_t_test(rows[k].result.rho, mlm).p_value;
      if (rows[k].method == CorridorMethod::kFmpConjugate) {
        rows[k].p_vs_fmp_uniform = paired_t_test(rows[k].result.rho, uniform).p_value;
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "n,method,model,mean_rho,var_rho,runs,seed,p_vs_mlm,p_vs_fmp_uniform\n";
  const auto old_precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.n << ',' << to_string(r.method) << ',' << to_string(r.model) << ','
        << r.result.mean << ',' << r.result.variance << ',' << r.runs << ',' << r.seed << ',';
    if (r.p_vs_mlm) out << *r.p_vs_mlm;
    out << ',';
    if (r.p_vs_fmp_uniform) out << *r.p_vs_fmp_uniform;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace gridbelief
