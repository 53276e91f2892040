#include "gridbelief/scan_log.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace gridbelief {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ScanLogError(line, "invalid number '" + std::string(token) + "'");
  }
  return value;
}

BeamStatus parse_status(std::string_view token, std::size_t line) {
  if (token == "h") return BeamStatus::kHit;
  if (token == "s") return BeamStatus::kShortRange;
  if (token == "m") return BeamStatus::kMaxRange;
  throw ScanLogError(line, "invalid beam status '" + std::string(token) + "'");
}

char status_code(BeamStatus status) {
  switch (status) {
    case BeamStatus::kHit:
      return 'h';
    case BeamStatus::kShortRange:
      return 's';
    case BeamStatus::kMaxRange:
      return 'm';
  }
  return '?';
}

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

ScanLogError::ScanLogError(std::size_t line, const std::string& reason)
    : std::runtime_error("scan log line " + std::to_string(line) + ": " + reason), line_(line) {}

std::optional<ScanRecord> ScanLogReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    std::string_view view(text);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split_tokens(view);
    if (tokens.empty()) continue;
    if (tokens.size() < 8 || (tokens.size() - 8) % 5 != 0) {
      throw ScanLogError(line_, "expected 8 pose fields followed by groups of 5 beam fields, got " +
                                    std::to_string(tokens.size()) + " fields");
    }
    ScanRecord rec;
    rec.timestamp = parse_number(tokens[0], line_);
    if (last_timestamp_ && rec.timestamp < *last_timestamp_) {
      throw ScanLogError(line_, "timestamp decreases");
    }
    const Vec3 p(parse_number(tokens[1], line_), parse_number(tokens[2], line_),
                 parse_number(tokens[3], line_));
    const Eigen::Quaterniond q(parse_number(tokens[4], line_), parse_number(tokens[5], line_),
                               parse_number(tokens[6], line_), parse_number(tokens[7], line_));
    if (std::abs(q.norm() - 1.0) > kLogUnitTolerance) {
      throw ScanLogError(line_, "pose quaternion is not unit length");
    }
    rec.pose = Pose(p, std::abs(q.norm() - 1.0) > kUnitTolerance ? q.normalized() : q);
    for (std::size_t k = 8; k < tokens.size(); k += 5) {
      SensorBeam b;
      b.direction = Vec3(parse_number(tokens[k], line_), parse_number(tokens[k + 1], line_),
                         parse_number(tokens[k + 2], line_));
      b.radius = parse_number(tokens[k + 3], line_);
      b.status = parse_status(tokens[k + 4], line_);
      const std::size_t beam = (k - 8) / 5;
      if (std::abs(b.direction.norm() - 1.0) > kLogUnitTolerance) {
        throw ScanLogError(line_, "beam " + std::to_string(beam) + " direction is not unit length");
      }
      if (b.radius < 0.0) {
        throw ScanLogError(line_, "beam " + std::to_string(beam) + " has negative radius");
      }
      if (b.status == BeamStatus::kHit && !(b.radius > 0.0)) {
        throw ScanLogError(line_, "hit beam " + std::to_string(beam) + " needs a positive radius");
      }
      if (std::abs(b.direction.norm() - 1.0) > kUnitTolerance) b.direction.normalize();
      rec.beams.push_back(b);
    }
    last_timestamp_ = rec.timestamp;
    return rec;
  }
  if (in_.bad()) throw ScanLogError(line_, "read failure");
  return std::nullopt;
}

std::vector<ScanRecord> read_scan_log(std::istream& in) {
  ScanLogReader reader(in);
  std::vector<ScanRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

std::vector<ScanRecord> read_scan_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan log " + path.string());
  return read_scan_log(in);
}

void write_scan_record(std::ostream& out, const ScanRecord& r) {
  put(out, r.timestamp);
  const auto& q = r.pose.orientation;
  for (double v : {r.pose.position.x(), r.pose.position.y(), r.pose.position.z(), q.w(), q.x(),
                   q.y(), q.z()}) {
    out << ' ';
    put(out, v);
  }
  for (const auto& b : r.beams) {
    for (double v : {b.direction.x(), b.direction.y(), b.direction.z(), b.radius}) {
      out << ' ';
      put(out, v);
    }
    out << ' ' << status_code(b.status);
  }
  out << '\n';
}

void write_scan_log(std::ostream& out, const std::vector<ScanRecord>& records) {
  for (const auto& r : records) write_scan_record(out, r);
}

void write_scan_log(const std::filesystem::path& path, const std::vector<ScanRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scan log " + path.string());
  write_scan_log(out, records);
  if (!out) throw std::runtime_error("failed writing scan log " + path.string());
}

}  // namespace gridbelief
