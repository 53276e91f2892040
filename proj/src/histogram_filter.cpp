#include "gridbelief/histogram_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridbelief {

class HistogramOps {
 public:
  static HistogramBelief make(std::vector<double> probs) {
    return HistogramBelief(std::move(probs), HistogramBelief::Unchecked{});
  }
};

HistogramBelief::HistogramBelief(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("belief needs at least one cell");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("belief probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("belief must sum to one");
}

HistogramBelief HistogramBelief::uniform(std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("belief needs at least one cell");
  return HistogramOps::make(std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

double HistogramBelief::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) m += static_cast<double>(i) * probs_[i];
  return m;
}

HistogramBelief histogram_predict(const HistogramBelief& belief, int shift, Boundary boundary) {
  const auto n = static_cast<std::int64_t>(belief.size());
  std::vector<double> out(belief.size(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t j = i + shift;
    if (boundary == Boundary::kWrap) {
      j = ((j % n) + n) % n;
    } else {
      j = std::clamp<std::int64_t>(j, 0, n - 1);
    }
    out[static_cast<std::size_t>(j)] += belief[static_cast<std::size_t>(i)];
  }
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& p : out) p /= sum;
  return HistogramOps::make(std::move(out));
}

std::optional<HistogramBelief> try_histogram_update(const HistogramBelief& belief,
                                                    std::span<const double> log_liks) {
  if (log_liks.size() != belief.size()) {
    throw std::invalid_argument("likelihood vector length differs from belief length");
  }
  const std::size_t n = belief.size();
  std::vector<double> logw(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(log_liks[i])) throw std::invalid_argument("log-likelihood is NaN");
    logw[i] = belief[i] > 0.0 ? std::log(belief[i]) + log_liks[i]
                              : -std::numeric_limits<double>::infinity();
    top = std::max(top, logw[i]);
  }
  if (!std::isfinite(top)) {
    if (top > 0.0) throw std::invalid_argument("log-likelihood is +inf");
    return std::nullopt;
  }
  double sum = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : logw) w /= sum;
  return HistogramOps::make(std::move(logw));
}

HistogramBelief histogram_update(const HistogramBelief& belief,
                                 std::span<const double> log_liks) {
  auto out = try_histogram_update(belief, log_liks);
  if (!out) throw std::domain_error("measurement update left the belief without mass");
  return std::move(*out);
}

}  // namespace gridbelief
