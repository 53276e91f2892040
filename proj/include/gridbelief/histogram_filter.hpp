#pragma once

#include <optional>
#include <span>
#include <vector>

namespace gridbelief {

/// Discrete belief over the cells of a one-dimensional corridor.
class HistogramBelief {
 public:
  /// Throws std::invalid_argument unless probs is non-empty, non-negative
  /// and sums to 1 within 1e-9.
  explicit HistogramBelief(std::vector<double> probs);
  static HistogramBelief uniform(std::size_t cells);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  double mean() const;

 private:
  struct Unchecked {};
  HistogramBelief(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}
  friend class HistogramOps;
  std::vector<double> probs_;
};

/// What happens to mass moved past either end of the corridor.
enum class Boundary {
  kAccumulate,  // piles up in the end cell
  kWrap,        // re-enters at the opposite end
};

/// Deterministic motion by `shift` cells.
HistogramBelief histogram_predict(const HistogramBelief& belief, int shift,
                                  Boundary boundary = Boundary::kAccumulate);

/// Measurement update with per-cell log-likelihoods; nullopt when the
/// posterior has no mass (every cell with prior mass has likelihood 0).
std::optional<HistogramBelief> try_histogram_update(const HistogramBelief& belief,
                                                    std::span<const double> log_liks);

/// As try_histogram_update, but throws std::domain_error on zero total mass
/// and std::invalid_argument on a length mismatch.
HistogramBelief histogram_update(const HistogramBelief& belief,
                                 std::span<const double> log_liks);

}  // namespace gridbelief
