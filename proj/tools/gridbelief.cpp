#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gridbelief/commands.hpp"
#include "gridbelief/parallel.hpp"

using namespace gridbelief;

namespace {

std::optional<Cell> parse_dims(const std::vector<std::int64_t>& v) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 3) throw CLI::ValidationError("--dims", "expects three integers");
  return Cell(v[0], v[1], v[2]);
}

std::optional<Vec3> parse_vec(const std::vector<double>& v, const char* name) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 3) throw CLI::ValidationError(name, "expects three numbers");
  return Vec3(v[0], v[1], v[2]);
}

/// Writes to the file when a path is given, else to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel map posteriors for lidar localization"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

  std::string model = "decay";
  std::string prior_text;
  double voxel_size = 0.5;
  std::vector<std::int64_t> dims;
  std::vector<double> origin;
  std::string output;
  std::uint64_t seed = 1;

  auto* build = app.add_subcommand("build-map", "Accumulate scan logs into a map file");
  std::vector<std::string> build_logs;
  build->add_option("logs", build_logs, "Scan logs")->required();
  build->add_option("--model", model, "reflection or decay")->check(CLI::IsMember({"reflection", "decay"}));
  build->add_option("--prior", prior_text, "Prior stored in the map: uniform, uninformative, moment-matched, fixed=A,B (default moment-matched)");
  build->add_option("--voxel-size", voxel_size, "Voxel edge in meters");
  build->add_option("--dims", dims, "Grid dimensions nx ny nz")->expected(3);
  build->add_option("--origin", origin, "Grid origin x y z")->expected(3);
  build->add_option("--output,-o", output, "Map file")->required();

  auto* localize = app.add_subcommand("localize", "Monte Carlo localization against a map");
  LocalizeCommandOptions loc;
  std::string map_path, log_path, odo_path, mode = "fmp";
  std::optional<double> floor, motion_trans, motion_rot;
  std::size_t particles = 3000, beam_step = 1;
  double sigma_trans = 0.1, sigma_rot = 0.1;
  bool planar = false;
  localize->add_option("map", map_path, "Map file")->required();
  localize->add_option("log", log_path, "Scan log")->required();
  localize->add_option("--odometry", odo_path, "Odometry log; scan log poses then count as ground truth");
  localize->add_option("--model", model, "Expected map model")->check(CLI::IsMember({"reflection", "decay"}));
  localize->add_option("--mode", mode, "mlm or fmp")->check(CLI::IsMember({"mlm", "fmp"}));
  localize->add_option("--prior", prior_text, "Override the map's prior");
  localize->add_option("--mlm-floor", floor, "Lower bound on MLM per-voxel factors");
  localize->add_option("--particles", particles, "Particle count");
  localize->add_option("--init-sigma-trans", sigma_trans, "Initial translation sigma (m)");
  localize->add_option("--init-sigma-rot", sigma_rot, "Initial rotation sigma (rad)");
  localize->add_option("--motion-sigma-trans", motion_trans, "Motion translation sigma (default: init sigma)");
  localize->add_option("--motion-sigma-rot", motion_rot, "Motion rotation sigma (default: init sigma)");
  localize->add_option("--beam-step", beam_step, "Use every k-th beam");
  localize->add_flag("--planar", planar, "Restrict noise to x, y and yaw");
  localize->add_option("--seed", seed, "Random seed");
  localize->add_option("--output,-o", output, "CSV output (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Corridor localization sweep");
  SimulateOptions sim;
  std::string sim_model, sensor = "single-voxel";
  simulate->add_option("--model", sim_model, "Restrict to one model")->check(CLI::IsMember({"reflection", "decay"}));
  simulate->add_option("--n-list", sim.n_list, "Observations per voxel")->delimiter(',');
  simulate->add_option("--runs", sim.runs, "Runs per point");
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--length", sim.length, "Corridor length in voxels");
  simulate->add_option("--sensor", sensor, "single-voxel or forward-beam")->check(CLI::IsMember({"single-voxel", "forward-beam"}));
  simulate->add_option("--output,-o", output, "CSV output (default stdout)");

  auto* eval = app.add_subcommand("eval", "Log-likelihood and KL ratios at ground-truth poses");
  EvalOptions ev;
  eval->add_option("map", map_path, "Map file")->required();
  eval->add_option("log", log_path, "Scan log with ground-truth poses")->required();
  eval->add_option("--model", model, "Expected map model")->check(CLI::IsMember({"reflection", "decay"}));
  eval->add_option("--prior", prior_text, "Override the map's prior");
  eval->add_option("--sigma", ev.sigma, "Ground-truth pose sigma (m)");
  eval->add_option("--samples", ev.samples, "KL sample poses per scan");
  eval->add_option("--seed", seed, "Sample lattice seed");
  eval->add_option("--output,-o", output, "CSV output");

  auto* synth = app.add_subcommand("synthesize", "Write synthetic scan logs");
  SynthesizeOptions syn;
  std::string world = "room";
  std::string prefix = "synthetic_";
  std::vector<double> elevations;
  synth->add_option("--world", world, "room or iid")->check(CLI::IsMember({"room", "iid"}));
  synth->add_option("--model", model, "reflection or decay")->check(CLI::IsMember({"reflection", "decay"}));
  synth->add_option("--voxel-size", voxel_size, "Voxel edge in meters");
  synth->add_option("--dims", dims, "Grid dimensions nx ny nz")->expected(3);
  synth->add_option("--mapping-scans", syn.dataset.mapping_scans, "Scans from random poses");
  synth->add_option("--steps", syn.dataset.steps, "Scans along the loop");
  synth->add_option("--clutter", syn.dataset.room.clutter, "Interior obstacle voxels (room)");
  synth->add_option("--azimuths", syn.dataset.sensor.azimuths, "Beams per elevation ring");
  synth->add_option("--elevations", elevations, "Ring elevations in radians")->delimiter(',');
  synth->add_option("--odometry-sigma-trans", syn.dataset.odometry_trans_sigma, "Per-step drift (m)");
  synth->add_option("--odometry-sigma-rot", syn.dataset.odometry_rot_sigma, "Per-step drift (rad)");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--prefix", prefix, "Output path prefix");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) parallel_threads() = threads;

  try {
    const MapModel map_model = parse_map_model(model);
    if (*build) {
      BuildMapOptions o;
      for (const auto& l : build_logs) o.scan_logs.emplace_back(l);
      o.output = output;
      o.model = map_model;
      o.geometry = {parse_dims(dims), voxel_size, parse_vec(origin, "--origin")};
      if (!prior_text.empty()) o.prior = PriorChoice::parse(prior_text);
      cmd_build_map(o, std::cout);
    } else if (*localize) {
      loc.map = map_path;
      loc.scan_log = log_path;
      if (!odo_path.empty()) loc.odometry_log = odo_path;
      if (localize->count("--model") > 0) loc.model = map_model;
      loc.mode = parse_mode_kind(mode);
      if (!prior_text.empty()) loc.prior = PriorChoice::parse(prior_text);
      loc.mlm_floor = floor;
      loc.filter.particles = particles;
      loc.filter.init_sigma_trans = sigma_trans;
      loc.filter.init_sigma_rot = sigma_rot;
      loc.filter.seed = seed;
      loc.filter.beam_step = beam_step;
      loc.motion_sigma_trans = motion_trans;
      loc.motion_sigma_rot = motion_rot;
      loc.planar = planar;
      Output out(output);
      cmd_localize(loc, out.stream());
    } else if (*simulate) {
      if (!sim_model.empty()) sim.models = {parse_map_model(sim_model)};
      sim.seed = seed;
      sim.sensor = parse_corridor_sensor(sensor);
      Output out(output);
      cmd_simulate(sim, out.stream());
    } else if (*eval) {
      ev.map = map_path;
      ev.scan_log = log_path;
      if (eval->count("--model") > 0) ev.model = map_model;
      if (!prior_text.empty()) ev.prior = PriorChoice::parse(prior_text);
      ev.seed = seed;
      if (output.empty()) {
        cmd_eval(ev, std::cout);
      } else {
        Output out(output);
        cmd_eval(ev, std::cout, &out.stream());
      }
    } else if (*synth) {
      syn.dataset.kind = parse_world_kind(world);
      syn.dataset.room.model = map_model;
      syn.dataset.room.edge = voxel_size;
      if (auto d = parse_dims(dims)) syn.dataset.room.dims = *d;
      if (!elevations.empty()) syn.dataset.sensor.elevations = elevations;
      syn.seed = seed;
      syn.prefix = prefix;
      cmd_synthesize(syn, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
