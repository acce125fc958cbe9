#pragma once

#include <cstdint>
#include <map>

namespace rdc {

/// Streaming quantile sketch with bounded relative error: a query at q
/// returns v with |v - exact_quantile(q)| <= alpha * |exact_quantile(q)|.
/// Logarithmic buckets over magnitudes, one lane per sign, exact zero lane.
/// Insertion is O(log #buckets); memory grows with the magnitude range only.
class PercentileSketch {
 public:
  explicit PercentileSketch(double alpha = 0.01);

  void insert(double x);
  /// q in [0, 1]; throws EmptyStreamError when nothing was inserted.
  double quantile(double q) const;

  std::int64_t count() const { return total_; }
  double alpha() const { return alpha_; }

 private:
  int bucket_index(double mag) const;
  double bucket_value(int index) const;

  double alpha_;
  double gamma_;
  double log_gamma_;
  std::map<int, std::int64_t> pos_;
  std::map<int, std::int64_t> neg_;  // keyed by magnitude bucket
  std::int64_t zeros_ = 0;
  std::int64_t total_ = 0;
};

}  // namespace rdc
