#include "gridbelief/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "gridbelief/parallel.hpp"

namespace gridbelief {

namespace {

constexpr std::size_t kScanChunk = 256;

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  }
  return v;
}

std::vector<ScanRecord> read_logs(const std::vector<std::filesystem::path>& paths) {
  std::vector<ScanRecord> out;
  for (const auto& p : paths) {
    auto part = read_scan_log(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

LikelihoodMode make_mode(ModeKind kind, const VoxelStatsGrid& grid, const PriorParams& prior,
                         std::optional<double> floor) {
  if (kind == ModeKind::kMlm) return mlm_mode_for(grid, prior.model, floor);
  return fmp_mode_for(grid, prior);
}

void print_csv_number(std::ostream& out, double v) {
  out << std::setprecision(10) << v;
}

}  // namespace

PriorChoice PriorChoice::parse(std::string_view text) {
  PriorChoice c;
  if (text == "uniform" || text == "uninformative") {
    c.kind = Kind::kFlat;
  } else if (text == "moment-matched") {
    c.kind = Kind::kMomentMatched;
  } else if (text.starts_with("fixed=")) {
    const auto body = text.substr(6);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("fixed prior needs 'fixed=alpha,beta'");
    c.kind = Kind::kFixed;
    c.alpha = parse_double(body.substr(0, comma), "prior alpha");
    c.beta = parse_double(body.substr(comma + 1), "prior beta");
    if (!(c.alpha > 0.0) || !(c.beta >= 0.0)) {
      throw std::invalid_argument("fixed prior needs alpha > 0 and beta >= 0");
    }
  } else {
    throw std::invalid_argument("unknown prior: " + std::string(text));
  }
  return c;
}

PriorParams PriorChoice::resolve(const VoxelStatsGrid& grid, MapModel model) const {
  switch (kind) {
    case Kind::kFlat:
      return PriorParams::flat(model);
    case Kind::kMomentMatched:
      return fit_prior(grid, model);
    case Kind::kFixed: {
      PriorParams p{model, alpha, beta};
      p.validate();
      return p;
    }
  }
  throw std::logic_error("unhandled prior kind");
}

GridGeometry bounding_geometry(const std::vector<ScanRecord>& scans, const GeometryOptions& options) {
  const double edge = options.voxel_size;
  if (!(edge > 0.0)) throw std::invalid_argument("voxel size must be positive");
  if (options.dims) {
    return GridGeometry(*options.dims, edge, options.origin.value_or(Vec3::Zero()));
  }
  if (scans.empty()) throw std::invalid_argument("cannot derive grid bounds from an empty scan log");
  Vec3 lo = scans.front().pose.position;
  Vec3 hi = lo;
  for (const auto& s : scans) {
    lo = lo.cwiseMin(s.pose.position);
    hi = hi.cwiseMax(s.pose.position);
    for (const auto& b : s.beams) {
      if (b.status != BeamStatus::kHit) continue;
      const Vec3 end = s.pose.position + s.pose.rotate(b.direction) * b.radius;
      lo = lo.cwiseMin(end);
      hi = hi.cwiseMax(end);
    }
  }
  Vec3 origin;
  if (options.origin) {
    origin = *options.origin;
  } else {
    for (int a = 0; a < 3; ++a) origin[a] = (std::floor(lo[a] / edge) - 1.0) * edge;
  }
  Cell dims;
  for (int a = 0; a < 3; ++a) {
    dims[a] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor((hi[a] - origin[a]) / edge)) + 2);
  }
  return GridGeometry(dims, edge, origin);
}

VoxelStatsGrid build_grid(const GridGeometry& geometry, const std::vector<ScanRecord>& scans) {
  const std::size_t chunks = (scans.size() + kScanChunk - 1) / kScanChunk;
  std::vector<VoxelStatsGrid> parts(chunks, VoxelStatsGrid(geometry));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(scans.size(), (c + 1) * kScanChunk);
    for (std::size_t i = c * kScanChunk; i < end; ++i) {
      integrate_scan(parts[c], scans[i].pose, scans[i].beams);
    }
  });
  VoxelStatsGrid out(geometry);
  for (const auto& p : parts) out = merge_stats(out, p);
  return out;
}

MapFile cmd_build_map(const BuildMapOptions& options, std::ostream& report) {
  if (options.scan_logs.empty()) throw std::invalid_argument("no scan log given");
  const std::vector<ScanRecord> scans = read_logs(options.scan_logs);
  const GridGeometry geometry = bounding_geometry(scans, options.geometry);
  MapFile map{build_grid(geometry, scans), PriorParams::flat(options.model)};

  std::size_t beams = 0;
  std::size_t short_range = 0;
  for (const auto& s : scans) {
    beams += s.beams.size();
    for (const auto& b : s.beams) short_range += b.status == BeamStatus::kShortRange;
  }
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  for (const auto& [index, st] : map.grid.sorted_entries()) {
    hits += st.hits;
    misses += st.misses;
  }
  const auto total = geometry.voxel_count();
  const auto covered = map.grid.stored_count();

  report << "scans: " << scans.size() << "\n"
         << "beams: " << beams << " (skipped short-range: " << short_range << ")\n"
         << "grid: " << geometry.dims().x() << "x" << geometry.dims().y() << "x"
         << geometry.dims().z() << " voxels, edge " << geometry.edge() << " m, origin ("
         << geometry.origin().x() << ", " << geometry.origin().y() << ", "
         << geometry.origin().z() << ")\n"
         << "voxels with evidence: " << covered << " of " << total << " ("
         << std::setprecision(4) << 100.0 * static_cast<double>(covered) / static_cast<double>(total)
         << "%)\n"
         << "hits: " << hits << ", misses: " << misses << "\n";
  try {
    const PriorParams fitted = fit_prior(map.grid, options.model);
    report << "moment-matched prior: alpha " << std::setprecision(8) << fitted.alpha << ", beta "
           << fitted.beta << "\n";
  } catch (const std::invalid_argument& e) {
    report << "moment-matched prior: unavailable (" << e.what() << ")\n";
  }
  map.prior = options.prior.resolve(map.grid, options.model);
  report << "stored prior: alpha " << std::setprecision(8) << map.prior.alpha << ", beta "
         << map.prior.beta << "\n";
  if (options.output) write_map(*options.output, map);
  return map;
}

ModeKind parse_mode_kind(std::string_view text) {
  if (text == "mlm") return ModeKind::kMlm;
  if (text == "fmp") return ModeKind::kFmp;
  throw std::invalid_argument("unknown mode: " + std::string(text));
}

std::vector<double> cmd_localize(const LocalizeCommandOptions& options, std::ostream& csv) {
  const MapFile map = read_map(options.map, options.model);
  const std::vector<ScanRecord> scans = read_scan_log(options.scan_log);
  if (scans.empty()) throw std::invalid_argument("scan log is empty");
  const PriorParams prior =
      options.prior ? options.prior->resolve(map.grid, map.prior.model) : map.prior;
  const LikelihoodMode mode = make_mode(options.mode, map.grid, prior, options.mlm_floor);

  std::vector<Pose> odometry;
  const bool truth = options.odometry_log.has_value();
  if (truth) {
    for (const auto& r : read_scan_log(*options.odometry_log)) odometry.push_back(r.pose);
    if (odometry.size() != scans.size()) {
      throw std::invalid_argument("odometry log has " + std::to_string(odometry.size()) +
                                  " poses for " + std::to_string(scans.size()) + " scans");
    }
  } else {
    for (const auto& s : scans) odometry.push_back(s.pose);
  }
  std::vector<std::vector<SensorBeam>> beams;
  std::vector<double> stamps;
  for (const auto& s : scans) {
    beams.push_back(s.beams);
    stamps.push_back(s.timestamp);
  }
  LocalizeOptions filter = options.filter;
  filter.noise.trans_sigma = options.motion_sigma_trans.value_or(filter.init_sigma_trans);
  filter.noise.rot_sigma = options.motion_sigma_rot.value_or(filter.init_sigma_rot);
  filter.noise.planar = options.planar;

  const auto steps = run_localization(map.grid, mode, odometry, beams, stamps, filter);
  std::vector<double> errors;
  csv << "t,x,y,z,yaw,pitch,roll,error\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Pose& e = steps[k].estimate;
    const Vec3 ypr = e.yaw_pitch_roll();
    for (double v : {steps[k].timestamp, e.position.x(), e.position.y(), e.position.z(), ypr[0],
                     ypr[1], ypr[2]}) {
      print_csv_number(csv, v);
      csv << ',';
    }
    if (truth) {
      const double err = (e.position - scans[k].pose.position).norm();
      errors.push_back(err);
      print_csv_number(csv, err);
    }
    csv << '\n';
  }
  return errors;
}

std::vector<SweepRow> cmd_simulate(const SimulateOptions& options, std::ostream& csv) {
  if (options.n_list.empty()) throw std::invalid_argument("empty n list");
  std::vector<SweepRow> rows;
  for (MapModel model : options.models) {
    auto part = run_corridor_sweep(model, options.n_list, options.runs, options.seed,
                                   options.length, options.sensor);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_sweep_csv(csv, rows);
  return rows;
}

EvalReport cmd_eval(const EvalOptions& options, std::ostream& report, std::ostream* csv) {
  const MapFile map = read_map(options.map, options.model);
  const std::vector<ScanRecord> scans = read_scan_log(options.scan_log);
  if (scans.empty()) throw std::invalid_argument("scan log is empty");
  const PriorParams prior =
      options.prior ? options.prior->resolve(map.grid, map.prior.model) : map.prior;
  EvalReport r{loglik_ratio(map.grid, scans, prior),
               kl_ratio(map.grid, scans, prior, options.sigma, options.samples, options.seed)};
  report << std::setprecision(8) << "prior: alpha " << prior.alpha << ", beta " << prior.beta
         << "\n"
         << "log-likelihood MLM: " << r.loglik.mlm_sum << " (hit " << r.loglik.mlm_hit
         << ", out-of-range " << r.loglik.mlm_out_of_range << ")\n"
         << "log-likelihood FMP: " << r.loglik.fmp_sum << " (hit " << r.loglik.fmp_hit
         << ", out-of-range " << r.loglik.fmp_out_of_range << ")\n"
         << "log-likelihood ratio MLM/FMP: " << r.loglik.ratio << "\n"
         << "beams included: " << r.loglik.included << ", excluded: " << r.loglik.excluded << "\n"
         << "KL MLM: " << r.kl.mlm_sum << "\n"
         << "KL FMP: " << r.kl.fmp_sum << "\n"
         << "KL ratio MLM/FMP: " << r.kl.ratio << "\n"
         << "KL scans: " << r.kl.scans << ", beams included: " << r.kl.included_beams
         << ", excluded: " << r.kl.excluded_beams << "\n";
  if (csv) {
    *csv << std::setprecision(10) << "metric,mlm,fmp,ratio,included,excluded\n"
         << "loglik," << r.loglik.mlm_sum << ',' << r.loglik.fmp_sum << ',' << r.loglik.ratio
         << ',' << r.loglik.included << ',' << r.loglik.excluded << '\n'
         << "kl," << r.kl.mlm_sum << ',' << r.kl.fmp_sum << ',' << r.kl.ratio << ','
         << r.kl.included_beams << ',' << r.kl.excluded_beams << '\n';
  }
  return r;
}

SyntheticDataset cmd_synthesize(const SynthesizeOptions& options, std::ostream& report) {
  SyntheticDataset ds = make_dataset(options.dataset, options.seed);
  const auto base = options.prefix.string();
  write_scan_log(base + "mapping.log", ds.mapping);
  write_scan_log(base + "trajectory.log", ds.trajectory);
  write_scan_log(base + "odometry.log", ds.odometry);
  report << "world: " << to_string(options.dataset.kind) << ", " << to_string(ds.world.model)
         << ", " << ds.world.geometry.voxel_count() << " voxels\n"
         << "wrote " << base << "mapping.log (" << ds.mapping.size() << " scans), " << base
         << "trajectory.log (" << ds.trajectory.size() << " scans), " << base
         << "odometry.log\n";
  return ds;
}

}  // namespace gridbelief
