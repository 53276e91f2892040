#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "gridbelief/map_file.hpp"
#include "gridbelief/scan_log.hpp"

using namespace gridbelief;

namespace {

ScanRecord sample_record() {
  ScanRecord r;
  r.timestamp = 12.345678901234567;
  r.pose = Pose::from_xyz_ypr(1.0 / 3.0, -2.5, 0.1, 0.7, -0.1, 0.05);
  r.beams = {{Vec3(1, 2, 3).normalized(), 4.25, BeamStatus::kHit},
             {Vec3(-1, 0, 0), 0.05, BeamStatus::kShortRange},
             {Vec3(0.3, -0.4, 0.1).normalized(), 30.0, BeamStatus::kMaxRange}};
  return r;
}

void check_same(const ScanRecord& a, const ScanRecord& b) {
  CHECK(a.timestamp == b.timestamp);
  CHECK(a.pose.position == b.pose.position);
  CHECK(a.pose.orientation.coeffs() == b.pose.orientation.coeffs());
  CHECK(a.beams == b.beams);
}

std::string line_with_direction(const std::string& dx) {
  return "0 0 0 0 1 0 0 0 " + dx + " 0 0 1.0 h\n";
}

}  // namespace

TEST_CASE("scan log round trip") {
  std::stringstream s;
  const ScanRecord r = sample_record();
  write_scan_log(s, {r, r});
  const auto back = read_scan_log(s);
  REQUIRE(back.size() == 2);
  check_same(back[0], r);
  check_same(back[1], r);

  std::stringstream once;
  write_scan_record(once, r);
  std::stringstream twice;
  write_scan_log(twice, read_scan_log(once));
  std::stringstream again;
  write_scan_record(again, r);
  CHECK(twice.str() == again.str());
}

TEST_CASE("empty scan log and comments") {
  std::istringstream empty("");
  CHECK(read_scan_log(empty).empty());
  std::istringstream commented("# header\n\n   \n0 0 0 0 1 0 0 0  # no beams\n");
  const auto recs = read_scan_log(commented);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].beams.empty());
}

TEST_CASE("scan log errors name the line") {
  auto error_line = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_scan_log(in);
    } catch (const ScanLogError& e) {
      CHECK(std::string(e.what()).find("line " + std::to_string(e.line())) != std::string::npos);
      return e.line();
    }
    return 0;
  };
  CHECK(error_line("# ok\n" + line_with_direction("1.0") + line_with_direction("0.999")) == 3);
  CHECK(error_line(line_with_direction("1.0000001")) == 0);
  CHECK(error_line("0 0 0 0 1 0 0\n") == 1);
  CHECK(error_line("0 0 0 0 1 0 0 0 1 0 0 1.0\n") == 1);
  CHECK(error_line("0 0 0 0 1 0 0 0 1 0 0 -1.0 m\n") == 1);
  CHECK(error_line("0 0 0 0 1 0 0 0 1 0 0 0.0 h\n") == 1);
  CHECK(error_line("0 0 0 0 1 0 0 0 1 0 0 1.0 x\n") == 1);
  CHECK(error_line("0 0 0 0 1 0 0 0 1 0 0 abc h\n") == 1);
  CHECK(error_line("0 0 0 0 2 0 0 0\n") == 1);
  CHECK(error_line("5 0 0 0 1 0 0 0\n4 0 0 0 1 0 0 0\n") == 2);
  CHECK(error_line("5 0 0 0 1 0 0 0\n5 0 0 0 1 0 0 0\n") == 0);
}

TEST_CASE("streaming reader") {
  std::stringstream s;
  write_scan_log(s, {sample_record()});
  ScanLogReader reader(s);
  CHECK(reader.next().has_value());
  CHECK(reader.line() == 1);
  CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("map file round trip is exact") {
  GridGeometry g(Cell(7, 5, 3), 0.37, Vec3(-1.25, 3.5, 0.125));
  VoxelStatsGrid grid(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (VoxelIndex i = 0; i < g.voxel_count(); i += 3) {
    grid.set(i, {static_cast<std::uint64_t>(u(rng) * 1e6), static_cast<std::uint64_t>(u(rng) * 10), u(rng) * 1e3 / 7.0});
  }
  const MapFile map{grid, PriorParams{MapModel::kDecay, 0.7123456789, 1.0 / 3.0}};
  std::stringstream s;
  write_map(s, map);
  const std::string bytes = s.str();
  CHECK(bytes.substr(0, 8) == std::string("GRDBLF\0\1", 8));
  const MapFile back = read_map(s);
  CHECK(back.grid == grid);
  CHECK(back.prior == map.prior);
  CHECK(back.grid.stored_count() == grid.stored_count());
  std::stringstream again;
  write_map(again, back);
  CHECK(again.str() == bytes);
  std::istringstream in(bytes);
  CHECK_THROWS_AS(read_map(in, MapModel::kReflection), MapFileError);
}

TEST_CASE("map file rejects malformed input") {
  GridGeometry g(Cell(2, 2, 2), 0.5);
  VoxelStatsGrid grid(g);
  grid.set(1, {1, 2, 0.5});
  grid.set(5, {0, 3, 1.5});
  std::stringstream s;
  write_map(s, MapFile{grid, PriorParams::flat(MapModel::kReflection)});
  const std::string good = s.str();
  auto rejects = [](std::string bytes) {
    std::istringstream in(bytes);
    CHECK_THROWS_AS(read_map(in), MapFileError);
  };
  std::string bad = good;
  bad[0] = 'X';
  rejects(bad);
  bad = good;
  bad[8] = 2;  // version
  rejects(bad);
  bad = good;
  bad[12] = 7;  // model code
  rejects(bad);
  rejects(good.substr(0, good.size() - 3));
  rejects(good.substr(0, 40));
  // Swap the two records so indices decrease.
  const std::size_t rec = good.size() - 64;
  bad = good.substr(0, rec) + good.substr(rec + 32, 32) + good.substr(rec, 32);
  rejects(bad);
}
