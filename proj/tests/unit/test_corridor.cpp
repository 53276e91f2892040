#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "gridbelief/corridor.hpp"

using namespace gridbelief;

namespace {

std::pair<double, double> moments(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, var / v.size()};
}

}  // namespace

TEST_CASE("synthetic corridor maps") {
  const auto refl = synth_corridor_map(100000, MapModel::kReflection, 1);
  auto [m, v] = moments(refl);
  CHECK(std::abs(m - 0.5) < 0.005);
  CHECK(std::abs(v - 1.0 / 12.0) < 0.002);
  for (double x : refl) CHECK((x >= 0.0 && x <= 1.0));
  const auto dec = synth_corridor_map(100000, MapModel::kDecay, 1);
  CHECK(std::abs(moments(dec).first - 1.0) < 0.01);
  CHECK(synth_corridor_map(50, MapModel::kDecay, 9) == synth_corridor_map(50, MapModel::kDecay, 9));
  CHECK(synth_corridor_map(50, MapModel::kDecay, 9) != synth_corridor_map(50, MapModel::kDecay, 10));
}

TEST_CASE("mapping phase statistics") {
  Rng rng(4);
  const std::vector<double> certain = {1.0, 1.0};
  auto g = simulate_mapping(certain, 7, MapModel::kReflection, rng);
  CHECK(g.at(0) == VoxelStats{7, 0, 7.0});

  const std::vector<double> half = {0.5};
  g = simulate_mapping(half, 100000, MapModel::kReflection, rng);
  CHECK(std::abs(g.at(0).hits / 1e5 - 0.5) < 0.005);
  CHECK(g.at(0).hits + g.at(0).misses == 100000);

  const std::vector<double> unit_rate = {1.0};
  for (auto sensor : {CorridorSensor::kSingleVoxel, CorridorSensor::kForwardBeam}) {
    g = simulate_mapping(unit_rate, 100000, MapModel::kDecay, rng, sensor);
    const auto s = g.at(0);
    CHECK(std::abs(s.hits / s.distance - 1.0) < 0.02);
    if (sensor == CorridorSensor::kSingleVoxel) {
      CHECK(s.hits == 100000);
    } else {
      CHECK(s.hits + s.misses == 100000);
      CHECK(s.distance <= 100000.0);
    }
  }
}

TEST_CASE("forward beam outcomes") {
  Rng rng(2);
  const std::vector<double> wall(5, 1.0);
  const std::vector<double> open(5, 0.0);
  for (int k = 0; k < 100; ++k) {
    CHECK(simulate_beam(wall, 2, MapModel::kReflection, rng).hit_voxel == std::int64_t{2});
    CHECK_FALSE(simulate_beam(open, 2, MapModel::kReflection, rng).hit_voxel.has_value());
  }
  const std::vector<double> coin(3, 0.5);
  const double expected[4] = {0.5, 0.25, 0.125, 0.125};
  int counts[4] = {0, 0, 0, 0};
  constexpr int kDraws = 100000;
  for (int k = 0; k < kDraws; ++k) {
    const auto o = simulate_beam(coin, 0, MapModel::kReflection, rng);
    ++counts[o.hit_voxel ? *o.hit_voxel : 3];
  }
  for (int i = 0; i < 4; ++i) {
    const double se = std::sqrt(expected[i] * (1 - expected[i]) / kDraws);
    CHECK(std::abs(counts[i] / double(kDraws) - expected[i]) < 3 * se);
  }
  const std::vector<double> rates = {0.5, 2.0};
  for (int k = 0; k < 1000; ++k) {
    const auto o = simulate_beam(rates, 0, MapModel::kDecay, rng);
    if (o.hit_voxel) CHECK((o.depth >= 0.0 && o.depth < 1.0));
  }
}

TEST_CASE("corridor experiment basics") {
  CorridorConfig c;
  c.length = 30;
  c.runs = 40;
  c.n = 2;
  for (auto model : {MapModel::kReflection, MapModel::kDecay}) {
    c.model = model;
    for (auto method : {CorridorMethod::kMlm, CorridorMethod::kFmpUniform, CorridorMethod::kFmpConjugate}) {
      c.method = method;
      const auto a = run_corridor_experiment(c);
      const auto b = run_corridor_experiment(c);
      CHECK(a.rho == b.rho);
      REQUIRE(a.rho.size() == 40);
      for (double r : a.rho) CHECK((r >= 0.0 && r <= 1.0));
      auto [m, v] = moments(a.rho);
      CHECK(a.mean == doctest::Approx(m).epsilon(1e-12));
      CHECK(a.variance == doctest::Approx(v).epsilon(1e-9));
    }
  }
  c.runs = 1;
  CHECK(run_corridor_experiment(c).variance == 0.0);
  c.length = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.length = 10;
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("mean rho grows with the number of mapping observations") {
  for (auto model : {MapModel::kReflection, MapModel::kDecay}) {
    const std::vector<int> ns = {1, 3, 10, 50};
    const auto rows = run_corridor_sweep(model, ns, 1000, 3, 100);
    for (auto method : {CorridorMethod::kMlm, CorridorMethod::kFmpUniform, CorridorMethod::kFmpConjugate}) {
      std::vector<const SweepRow*> line;
      for (const auto& r : rows) {
        if (r.method == method) line.push_back(&r);
      }
      REQUIRE(line.size() == ns.size());
      for (std::size_t k = 1; k < line.size(); ++k) {
        const double se = std::sqrt(line[k]->result.variance / 1000 + line[k - 1]->result.variance / 1000);
        CHECK(line[k]->result.mean >= line[k - 1]->result.mean - se);
      }
    }
  }
}

TEST_CASE("paired t-test") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> b = {0.5, 1.0, 2.9, 3.0, 4.1};
  const auto t = paired_t_test(a, b);
  // Differences 0.5, 1, 0.1, 1, 0.9: mean 0.7, sample variance 0.155.
  const double t_ref = 0.7 / std::sqrt(0.155 / 5.0);
  CHECK(t.t == doctest::Approx(t_ref).epsilon(1e-12));
  CHECK(t.dof == 4.0);
  // Student's t with 4 degrees of freedom has an elementary upper tail.
  const double x = t_ref / std::sqrt(t_ref * t_ref + 4.0);
  const double p_ref = 0.5 - 0.5 * x * (1.0 + 0.5 * (1.0 - x * x));
  CHECK(t.p_value == doctest::Approx(p_ref).epsilon(1e-10));
  const auto rev = paired_t_test(b, a);
  CHECK(rev.p_value == doctest::Approx(1.0 - t.p_value).epsilon(1e-12));
  CHECK_THROWS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{1.0}));
  CHECK_THROWS(paired_t_test(a, std::vector<double>{1.0, 2.0}));
}

TEST_CASE("sweep rows and CSV") {
  const std::vector<int> ns = {1, 2};
  const auto rows = run_corridor_sweep(MapModel::kReflection, ns, 1, 5, 20);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.result.variance == 0.0);
    CHECK(r.runs == 1);
    CHECK_FALSE(r.p_vs_mlm.has_value());
  }
  const auto paired = run_corridor_sweep(MapModel::kDecay, std::vector<int>{1}, 5, 5, 20);
  for (const auto& r : paired) {
    CHECK(r.p_vs_mlm.has_value() == (r.method != CorridorMethod::kMlm));
    CHECK(r.p_vs_fmp_uniform.has_value() == (r.method == CorridorMethod::kFmpConjugate));
  }
  std::ostringstream out;
  write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,method,model,mean_rho,var_rho,runs,seed,p_vs_mlm,p_vs_fmp_uniform");
  int count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 6);
}

TEST_CASE("method names round trip") {
  for (auto m : {CorridorMethod::kMlm, CorridorMethod::kFmpUniform, CorridorMethod::kFmpConjugate}) {
    CHECK(parse_corridor_method(to_string(m)) == m);
  }
  CHECK_THROWS(parse_corridor_method("bogus"));
}
