// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. `--quick` uses 2000 corridor runs with
// doubled tolerances. `--known-failures 3,7` still prints those criteria as
// FAIL but leaves them out of the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "gridbelief/corridor.hpp"
#include "gridbelief/evaluation.hpp"
#include "gridbelief/particle_filter.hpp"
#include "gridbelief/world.hpp"

using namespace gridbelief;

namespace {

int failures = 0;
int known = 0;
std::set<int> known_failures;

void report(int id, bool pass, const std::string& what) {
  std::printf("%s %2d  %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (pass) return;
  ++failures;
  if (known_failures.count(id)) ++known;
}

void info(const std::string& text) {
  std::printf("        %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

using SweepKey = std::pair<int, CorridorMethod>;

std::map<SweepKey, SweepRow> index_rows(const std::vector<SweepRow>& rows) {
  std::map<SweepKey, SweepRow> out;
  for (const auto& r : rows) out[{r.n, r.method}] = r;
  return out;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

void corridor_criteria(int runs, double scale) {
  Timer t;
  const std::vector<int> refl_ns = {1, 2, 3, 4, 5, 10, 20, 50, 100, 200};
  const std::vector<int> dec_ns = {1, 2, 3, 4, 200};
  const auto refl = index_rows(run_corridor_sweep(MapModel::kReflection, refl_ns, runs, 1));
  const auto dec = index_rows(run_corridor_sweep(MapModel::kDecay, dec_ns, runs, 1));
  info(fmt("corridor sweeps: %d runs per point, %.0f s", runs, t.seconds()));
  for (const auto& [name, rows] : {std::pair{"reflection", &refl}, std::pair{"decay", &dec}}) {
    for (const auto& [key, r] : *rows) {
      info(fmt("%-10s n=%-3d %-13s mean %.4f var %.5f", name, key.first,
               std::string(to_string(key.second)).c_str(), r.result.mean, r.result.variance));
    }
  }

  // 1. Anchors at n = 1.
  const double rm = refl.at({1, CorridorMethod::kMlm}).result.mean;
  const double ru = refl.at({1, CorridorMethod::kFmpUniform}).result.mean;
  const double rc = refl.at({1, CorridorMethod::kFmpConjugate}).result.mean;
  const double dm = dec.at({1, CorridorMethod::kMlm}).result.mean;
  const double du = dec.at({1, CorridorMethod::kFmpUniform}).result.mean;
  const bool anchors = within(rm, 0.039, 0.010 * scale) && within(ru, 0.318, 0.040 * scale) &&
                       within(rc, 0.429, 0.080 * scale) && within(dm, 0.444, 0.090 * scale) &&
                       within(du, 0.651, 0.050 * scale);
  report(1, anchors,
         fmt("corridor anchors n=1: reflection MLM %.4f (0.039), FMP-uniform %.4f (0.318), "
             "FMP-conjugate %.4f (0.429); decay MLM %.4f (0.444), FMP-uninformative %.4f (0.651)",
             rm, ru, rc, dm, du));
  info(fmt("decay FMP-conjugate n=1: %.4f", dec.at({1, CorridorMethod::kFmpConjugate}).result.mean));

  // 2. Agreement at n = 200.
  bool agree = true;
  std::string detail;
  for (const auto& [name, rows, target] :
       {std::tuple{"reflection", &refl, 0.764}, std::tuple{"decay", &dec, 0.885}}) {
    std::vector<double> m;
    for (auto method : {CorridorMethod::kMlm, CorridorMethod::kFmpUniform, CorridorMethod::kFmpConjugate}) {
      m.push_back(rows->at({200, method}).result.mean);
    }
    const double spread = *std::max_element(m.begin(), m.end()) - *std::min_element(m.begin(), m.end());
    for (double v : m) agree = agree && within(v, target, 0.01 * scale);
    agree = agree && spread < 0.01 * scale;
    detail += fmt("%s %.4f/%.4f/%.4f (target %.3f, spread %.4f)  ", name, m[0], m[1], m[2], target, spread);
  }
  report(2, agree, "agreement at n=200: " + detail);

  // 3. FMP-conjugate beats MLM, one-tailed paired t-test p < 1e-4.
  bool significant = true;
  double worst_p = 0.0;
  std::string where;
  std::string all_p;
  for (int n : refl_ns) {
    if (n > 100) continue;
    const double p = *refl.at({n, CorridorMethod::kFmpConjugate}).p_vs_mlm;
    all_p += fmt("refl n=%d %.2g  ", n, p);
    if (p > worst_p) {
      worst_p = p;
      where = fmt("reflection n=%d", n);
    }
    significant = significant && p < 1e-4;
  }
  for (int n : dec_ns) {
    if (n > 4) continue;
    const double p = *dec.at({n, CorridorMethod::kFmpConjugate}).p_vs_mlm;
    all_p += fmt("decay n=%d %.2g  ", n, p);
    if (p > worst_p) {
      worst_p = p;
      where = fmt("decay n=%d", n);
    }
    significant = significant && p < 1e-4;
  }
  report(3, significant,
         fmt("FMP-conjugate > MLM for reflection n<=100 and decay n<=4: largest p %.3g (%s)", worst_p,
             where.c_str()));
  info("p-values: " + all_p);
}

void closed_form_criteria() {
  // 4. Closed forms against 4096-point quadrature.
  const double q = checks::closed_form_vs_quadrature(1000, 4);
  report(4, q < 1e-9, fmt("closed-form factors vs quadrature over 1000 inputs: worst relative error %.3g (< 1e-9)", q));

  // 5. Recursive conjugate updates against the brute-force posterior.
  const double b = checks::conjugate_vs_brute_force(100, 5);
  report(5, b <= 1e-6, fmt("conjugate updates vs brute-force posterior over 100 sequences: L-inf %.3g (<= 1e-6)", b));

  // 6. FMP factors converge to MLM factors as evidence is scaled up.
  std::string gaps;
  bool monotone = true;
  double last = INFINITY;
  for (double k : {1.0, 1e2, 1e4, 1e6}) {
    const double g = checks::dirac_gap(k);
    monotone = monotone && g < last;
    last = g;
    gaps += fmt("k=%g: %.3g  ", k, g);
  }
  report(6, monotone && last < 1e-4, "FMP -> MLM under scaled stats, relative gap " + gaps + "(< 1e-4 at 1e6)");

  // 7. Out-of-range mass conservation on 1-3 voxel decay grids.
  double worst = 0.0;
  for (int voxels = 1; voxels <= 3; ++voxels) {
    GridGeometry g(Cell(voxels, 1, 1), 1.0);
    VoxelStatsGrid grid(g);
    for (int i = 0; i < voxels; ++i) grid.set(i, {static_cast<std::uint64_t>(2 * i + 1), 1, 0.7 + 1.3 * i});
    for (const auto& mode : {LikelihoodMode::fmp(PriorParams{MapModel::kDecay, 1.0, 1.0}),
                             LikelihoodMode::fmp(PriorParams{MapModel::kDecay, 0.6, 2.0}),
                             LikelihoodMode::mlm(MapModel::kDecay, 1.0)}) {
      for (double r_min : {0.01, 0.3}) {
        const double total = checks::out_of_range_balance(grid, mode, Vec3(0.1, 0.5, 0.5), r_min, voxels - 0.25);
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
  }
  report(7, worst <= 1e-6, fmt("P(short) + density integral + P(max) = 1 on 1-3 voxel decay grids: worst deviation %.3g", worst));

  // 8. Histogram filter against exhaustive enumeration.
  const double acc = checks::histogram_vs_enumeration(1000, 8, Boundary::kAccumulate);
  const double wrap = checks::histogram_vs_enumeration(1000, 9, Boundary::kWrap);
  report(8, acc <= 1e-12 && wrap <= 1e-12,
         fmt("histogram filter vs enumeration on 10-cell corridors: worst %.3g (accumulate), %.3g (wrap)", acc, wrap));

  // 9. Ray traversal against the slab and sampling oracles.
  Timer t;
  const auto rays = checks::ray_traversal(10000, 9);
  report(9, rays.sum_error <= 1e-9 && rays.length_error <= 1e-3 && rays.sequence_failures == 0,
         fmt("ray traversal over 10000 beams: segment-sum error %.3g (<= 1e-9), per-voxel length error %.3g "
             "(<= 1e-3), sequence mismatches %d",
             rays.sum_error, rays.length_error, rays.sequence_failures));
  info(fmt("ray check %.0f s", t.seconds()));
}

struct WorldRatios {
  double loglik;
  double kl;
  std::size_t excluded;
};

// Sparse mapping of an i.i.d. volume, then both ratios on held-out scans at
// random free poses.
WorldRatios iid_world_ratios(MapModel model, std::uint64_t seed) {
  const GridGeometry g(Cell(16, 16, 6), 0.5);
  const World world = make_iid_world(g, model, seed);
  Rng rng(derive_seed(seed, 1));
  SensorPattern pattern;
  pattern.azimuths = 36;
  pattern.elevations = {-0.5, -0.25, 0.0, 0.25, 0.5};
  std::vector<ScanRecord> mapping, held_out;
  for (const auto& p : random_free_poses(world, 20, rng)) mapping.push_back({0.0, p, sample_scan(world, p, pattern, rng)});
  for (const auto& p : random_free_poses(world, 20, rng)) held_out.push_back({0.0, p, sample_scan(world, p, pattern, rng)});
  const auto grid = build_map(g, mapping);
  const auto prior = fit_prior(grid, model);
  const auto ll = loglik_ratio(grid, held_out, prior);
  const auto kl = kl_ratio(grid, held_out, prior);
  return {ll.ratio, kl.ratio, ll.excluded};
}

void world_criterion() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto r = iid_world_ratios(MapModel::kDecay, seed);
    pass = pass && r.loglik > 1.0 && r.kl > 1.0;
    detail += fmt("seed %llu: %.3f/%.3f  ", static_cast<unsigned long long>(seed), r.loglik, r.kl);
  }
  report(10, pass, "decay i.i.d. 3D world, log-likelihood/KL ratios MLM:FMP > 1 for every seed: " + detail);
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const auto r = iid_world_ratios(MapModel::kReflection, seed);
    info(fmt("reflection i.i.d. world seed %llu (informational): log-likelihood ratio %.3f, KL ratio %.3f, %zu beams excluded",
             static_cast<unsigned long long>(seed), r.loglik, r.kl, r.excluded));
  }
  info(fmt("world evaluation %.0f s", t.seconds()));
}

void mcl_criterion() {
  Timer t;
  DatasetOptions o;
  o.room.model = MapModel::kDecay;
  o.mapping_scans = 40;
  o.steps = 30;
  o.odometry_trans_sigma = 0.02;
  o.odometry_rot_sigma = 0.01;
  const auto ds = make_dataset(o, 11);
  const auto grid = build_map(ds.world.geometry, ds.mapping);
  const auto prior = fit_prior(grid, MapModel::kDecay);
  std::vector<Pose> odometry;
  std::vector<std::vector<SensorBeam>> scans;
  std::vector<double> stamps;
  for (std::size_t k = 0; k < ds.trajectory.size(); ++k) {
    odometry.push_back(ds.odometry[k].pose);
    scans.push_back(ds.trajectory[k].beams);
    stamps.push_back(ds.trajectory[k].timestamp);
  }
  constexpr std::size_t kSettle = 10;
  auto steady_error = [&](const LikelihoodMode& mode) {
    double total = 0.0;
    for (std::uint64_t run = 0; run < 10; ++run) {
      LocalizeOptions lo;
      lo.particles = 3000;
      lo.seed = 100 + run;
      const auto steps = run_localization(grid, mode, odometry, scans, stamps, lo);
      double e = 0.0;
      for (std::size_t k = kSettle; k < steps.size(); ++k) {
        e += (steps[k].estimate.position - ds.trajectory[k].pose.position).norm();
      }
      total += e / static_cast<double>(steps.size() - kSettle);
    }
    return total / 10.0;
  };
  const double fmp = steady_error(fmp_mode_for(grid, prior));
  const double mlm = steady_error(mlm_mode_for(grid, MapModel::kDecay, 1e-6));
  const double edge = ds.world.geometry.edge();
  report(11, fmp < 0.5 * edge && fmp <= mlm,
         fmt("MCL in a 12x12x6 decay room, 3000 particles, 10 runs: FMP steady error %.4f m (< %.3f), "
             "MLM %.4f m (FMP <= MLM)",
             fmp, 0.5 * edge, mlm));
  info(fmt("MLM factors floored at 1e-6; without a floor it loses all particles; %.0f s", t.seconds()));
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "--known-failures") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) known_failures.insert(std::stoi(item));
    }
  }
  Timer total;
  corridor_criteria(quick ? 2000 : 10000, quick ? 2.0 : 1.0);
  closed_form_criteria();
  world_criterion();
  mcl_criterion();
  std::printf("%d of 11 criteria failed (%d known), %.0f s\n", failures, known, total.seconds());
  return failures == known ? 0 : 1;
}
