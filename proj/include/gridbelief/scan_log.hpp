#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridbelief/beam.hpp"
#include "gridbelief/geometry.hpp"

namespace gridbelief {

/// One timestamped scan with the sensor pose it was taken from.
struct ScanRecord {
  double timestamp = 0.0;
  Pose pose;
  std::vector<SensorBeam> beams;
};

/// Malformed scan log input. what() names the line.
class ScanLogError : public std::runtime_error {
 public:
  ScanLogError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr double kLogUnitTolerance = 1e-6;

/// Line-delimited text scan log:
///
///   t px py pz qw qx qy qz [dx dy dz r s]...
///
/// with s one of h (hit), s (short range), m (max range). Blank lines and
/// text after '#' are ignored. Timestamps must not decrease.
class ScanLogReader {
 public:
  explicit ScanLogReader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws ScanLogError.
  std::optional<ScanRecord> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::optional<double> last_timestamp_;
};

std::vector<ScanRecord> read_scan_log(std::istream& in);
std::vector<ScanRecord> read_scan_log(const std::filesystem::path& path);

/// Writes records in the format above with round-trip precision.
void write_scan_record(std::ostream& out, const ScanRecord& record);
void write_scan_log(std::ostream& out, const std::vector<ScanRecord>& records);
void write_scan_log(const std::filesystem::path& path, const std::vector<ScanRecord>& records);

}  // namespace gridbelief
