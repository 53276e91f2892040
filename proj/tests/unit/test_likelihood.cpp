#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "checks.hpp"
#include "gridbelief/likelihood.hpp"
#include "oracles.hpp"

using namespace gridbelief;

namespace {

const PriorParams kBeta11{MapModel::kReflection, 1.0, 1.0};
const PriorParams kGamma11{MapModel::kDecay, 1.0, 1.0};

}  // namespace

TEST_CASE("l_ref closed form") {
  CHECK(l_ref({0, 0, 0}, kBeta11, true) == 0.5);
  CHECK(l_ref({3, 1, 0}, kBeta11, false) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(oracle::reflection_predictive(4, 2, false) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(l_ref({5, 5, 0}, PriorParams{MapModel::kReflection, 1e-300, 1e-300}, true) == doctest::Approx(0.5));
  CHECK(l_ref({5, 5, 0}, PriorParams{MapModel::kReflection, 1e-300, 1e-300}, true) ==
        doctest::Approx(l_ref_mlm({5, 5, 0}, 0.5, true)));
}

TEST_CASE("l_ref of hit and miss sum to one") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const VoxelStats s{static_cast<std::uint64_t>(u(rng) * 5), static_cast<std::uint64_t>(u(rng) * 5), 0.0};
    const PriorParams p{MapModel::kReflection, u(rng), u(rng)};
    CHECK(l_ref(s, p, true) + l_ref(s, p, false) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("l_ref_mlm") {
  CHECK(l_ref_mlm({3, 1, 0}, 0.5, true) == 0.75);
  CHECK(l_ref_mlm({0, 4, 0}, 0.5, true) == 0.0);
  CHECK(l_ref_mlm({0, 0, 0}, 0.5, false) == 0.5);
}

TEST_CASE("l_dec closed form") {
  CHECK(l_dec({0, 0, 0.0}, kGamma11, 1.0, true) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(oracle::decay_predictive(1, 1, 1, true) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(l_dec({4, 2, 7.0}, kGamma11, 0.0, false) == 1.0);
  CHECK(l_dec({2, 0, 2.0}, PriorParams{MapModel::kDecay, 1.0, 0.0}, 1.0, false) ==
        doctest::Approx(8.0 / 27.0).epsilon(1e-15));
  CHECK(oracle::decay_predictive(3, 2, 1, false) == doctest::Approx(8.0 / 27.0).epsilon(1e-12));
  CHECK_THROWS_AS(l_dec({0, 0, 0.0}, PriorParams{MapModel::kDecay, 1.0, 0.0}, 0.0, true), std::domain_error);
}

TEST_CASE("l_dec_mlm") {
  CHECK(l_dec_mlm({2, 0, 4.0}, 1.0, 1.0, false) == doctest::Approx(std::exp(-0.5)));
  CHECK(l_dec_mlm({2, 0, 4.0}, 1.0, 2.0, true) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(l_dec_mlm({0, 1, 2.0}, 1.0, 5.0, false) == 1.0);
  CHECK(l_dec_mlm({0, 0, 0.0}, 0.3, 2.0, false) == doctest::Approx(std::exp(-0.6)));
}

TEST_CASE("closed forms match quadrature of the sensor model over the posterior") {
  CHECK(checks::closed_form_vs_quadrature(200, 7) < 1e-9);
}

TEST_CASE("FMP factors approach MLM factors as evidence grows") {
  double last = std::numeric_limits<double>::infinity();
  for (double k : {1.0, 1e2, 1e4, 1e6}) {
    const double gap = checks::dirac_gap(k);
    CHECK(gap < last);
    last = gap;
  }
  CHECK(last < 1e-4);
}

TEST_CASE("FMP factors are finite and positive for unvisited voxels under proper priors") {
  for (bool hit : {false, true}) {
    const double a = l_ref({}, PriorParams{MapModel::kReflection, 0.3, 2.0}, hit);
    CHECK(a > 0.0);
    CHECK(std::isfinite(a));
    const double b = l_dec({}, PriorParams{MapModel::kDecay, 0.7, 0.2}, 0.5, hit);
    CHECK(b > 0.0);
    CHECK(std::isfinite(b));
  }
}

TEST_CASE("beam log-likelihood is a sum of per-voxel factors") {
  GridGeometry g(Cell(4, 1, 1), 1.0);
  VoxelStatsGrid grid(g);
  grid.set(0, {1, 3, 2.0});
  grid.set(1, {2, 2, 4.0});
  grid.set(2, {0, 5, 6.0});
  const auto fmp = LikelihoodMode::fmp(kBeta11);
  const BeamTrace single{{{1, 0.3}}, true, BeamStatus::kHit};
  CHECK(beam_log_likelihood(grid, fmp, single) == doctest::Approx(std::log(l_ref(grid.at(1), kBeta11, true))));

  const BeamTrace whole{{{0, 1.0}, {1, 1.0}, {2, 0.5}}, true, BeamStatus::kHit};
  const BeamTrace head{{{0, 1.0}, {1, 1.0}}, false, BeamStatus::kMaxRange};
  const BeamTrace tail{{{2, 0.5}}, true, BeamStatus::kHit};
  const double lhs = beam_log_likelihood(grid, fmp, whole);
  const double rhs = out_of_range_log_prob(grid, fmp, head, OutOfRange::kMaxRange) +
                     beam_log_likelihood(grid, fmp, tail);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));

  const auto dec = LikelihoodMode::fmp(kGamma11);
  const double dlhs = beam_log_likelihood(grid, dec, whole);
  const double drhs = std::log(l_dec(grid.at(0), kGamma11, 1.0, false)) +
                      std::log(l_dec(grid.at(1), kGamma11, 1.0, false)) +
                      std::log(l_dec(grid.at(2), kGamma11, 0.5, true));
  CHECK(dlhs == doctest::Approx(drhs).epsilon(1e-14));

  // MLM: a hit in a never-reflecting voxel is impossible but must not throw.
  const auto mlm = LikelihoodMode::mlm(MapModel::kReflection, 0.5);
  CHECK(beam_log_likelihood(grid, mlm, whole) == -std::numeric_limits<double>::infinity());
  const auto floored = LikelihoodMode::mlm(MapModel::kReflection, 0.5, 1e-6);
  CHECK(std::isfinite(beam_log_likelihood(grid, floored, whole)));
  CHECK_THROWS_AS(beam_log_likelihood(grid, fmp, head), std::invalid_argument);
}

TEST_CASE("out-of-range probabilities on an empty reflection grid") {
  GridGeometry g(Cell(4, 1, 1), 1.0);
  VoxelStatsGrid grid(g);
  const auto mode = LikelihoodMode::fmp(kBeta11);
  const BeamTrace two{{{0, 1.0}, {1, 1.0}}, false, BeamStatus::kMaxRange};
  CHECK(out_of_range_log_prob(grid, mode, two, OutOfRange::kMaxRange) == doctest::Approx(std::log(0.25)));
  CHECK(out_of_range_log_prob(grid, mode, two, OutOfRange::kShortRange) == doctest::Approx(std::log(0.75)));
  CHECK(out_of_range_log_prob(grid, mode, BeamTrace{}, OutOfRange::kShortRange) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("out-of-range mass is conserved on small decay grids") {
  for (int voxels = 1; voxels <= 3; ++voxels) {
    GridGeometry g(Cell(voxels, 1, 1), 1.0);
    VoxelStatsGrid grid(g);
    for (int i = 0; i < voxels; ++i) grid.set(i, {static_cast<std::uint64_t>(i + 1), 1, 1.5 + i});
    const Vec3 origin(0.2, 0.5, 0.5);
    const double r_max = voxels - 0.3;
    for (const auto& mode : {LikelihoodMode::fmp(kGamma11), LikelihoodMode::fmp(PriorParams{MapModel::kDecay, 2.5, 0.4}),
                             LikelihoodMode::mlm(MapModel::kDecay, 1.0)}) {
      CHECK(checks::out_of_range_balance(grid, mode, origin, 0.05, r_max) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("predictive beam likelihood matches sampled outcome frequencies") {
  GridGeometry g(Cell(3, 1, 1), 1.0);
  VoxelStatsGrid grid(g);
  grid.set(0, {1, 3, 4.0});
  grid.set(1, {2, 1, 3.0});
  grid.set(2, {0, 2, 2.0});
  const PriorParams prior{MapModel::kReflection, 1.5, 0.8};
  const auto mode = LikelihoodMode::fmp(prior);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kBeams = 1000000;
  int counts[4] = {0, 0, 0, 0};
  for (int k = 0; k < kBeams; ++k) {
    int outcome = 3;
    for (int i = 0; i < 3; ++i) {
      const auto post = posterior(grid.at(i), prior);
      if (u(rng) < oracle::sample_beta(rng, post.a, post.b)) {
        outcome = i;
        break;
      }
    }
    ++counts[outcome];
  }
  for (int outcome = 0; outcome < 4; ++outcome) {
    const Vec3 origin(0.0, 0.5, 0.5);
    const double p = outcome < 3
                         ? std::exp(measurement_log_likelihood(grid, mode, Beam{origin, Vec3::UnitX(), outcome + 0.5, BeamStatus::kHit}))
                         : std::exp(measurement_log_likelihood(grid, mode, Beam{origin, Vec3::UnitX(), 5.0, BeamStatus::kMaxRange}));
    const double freq = static_cast<double>(counts[outcome]) / kBeams;
    const double se = std::sqrt(p * (1 - p) / kBeams);
    CHECK(std::abs(freq - p) < 3.0 * se);
  }
}

TEST_CASE("mode helpers for built maps") {
  GridGeometry g(Cell(3, 1, 1), 1.0);
  VoxelStatsGrid grid(g);
  grid.set(0, {1, 1, 1.0});
  grid.set(1, {4, 0, 1.0});
  const auto fmp = fmp_mode_for(grid, PriorParams::flat(MapModel::kDecay));
  REQUIRE(fmp.unvisited_prior.has_value());
  CHECK(*fmp.unvisited_prior == fit_prior(grid, MapModel::kDecay));
  CHECK_FALSE(fmp_mode_for(grid, kGamma11).unvisited_prior.has_value());
  CHECK(mlm_mode_for(grid, MapModel::kReflection).ml_default == 0.5);
  CHECK(mlm_mode_for(grid, MapModel::kDecay).ml_default == doctest::Approx(fit_prior(grid, MapModel::kDecay).mean()));
  // The unvisited voxel 2 no longer blocks a beam under the flat decay prior.
  const double ll = measurement_log_likelihood(grid, fmp, Beam{Vec3(0.5, 0.5, 0.5), Vec3::UnitX(), 2.5, BeamStatus::kHit});
  CHECK(std::isfinite(ll));
}
