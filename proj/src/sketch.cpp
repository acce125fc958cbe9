#include "rdc/sketch.hpp"

#include <cmath>

#include "rdc/errors.hpp"

namespace rdc {

PercentileSketch::PercentileSketch(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sketch: alpha must be in (0,1)");
  gamma_ = (1.0 + alpha) / (1.0 - alpha);
  log_gamma_ = std::log(gamma_);
}

int PercentileSketch::bucket_index(double mag) const {
  // bucket i covers (gamma^(i-1), gamma^i]
  return static_cast<int>(std::ceil(std::log(mag) / log_gamma_ - 1e-12));
}

double PercentileSketch::bucket_value(int index) const {
  return 2.0 * std::pow(gamma_, index) / (gamma_ + 1.0);
}

void PercentileSketch::insert(double x) {
  if (x == 0.0) {
    ++zeros_;
  } else if (x > 0.0) {
    ++pos_[bucket_index(x)];
  } else {
    ++neg_[bucket_index(-x)];
  }
  ++total_;
}

double PercentileSketch::quantile(double q) const {
  if (total_ == 0) throw EmptyStreamError("sketch: quantile of an empty stream");
  if (q < 0.0 || q > 1.0) throw UsageError("sketch: q must be in [0,1]");
  std::int64_t rank = static_cast<std::int64_t>(std::floor(q * static_cast<double>(total_ - 1)));
  std::int64_t seen = 0;
  // negatives: ascending value means descending magnitude bucket
  for (auto it = neg_.rbegin(); it != neg_.rend(); ++it) {
    seen += it->second;
    if (rank < seen) return -bucket_value(it->first);
  }
  seen += zeros_;
  if (rank < seen) return 0.0;
  for (const auto& [idx, cnt] : pos_) {
    seen += cnt;
    if (rank < seen) return bucket_value(idx);
  }
  return bucket_value(pos_.rbegin()->first);
}

}  // namespace rdc
