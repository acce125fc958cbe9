#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rdc/rng.hpp"

namespace rdc {

/// Equal-width split of [r_min, r_max) into n half-open intervals.
/// Labels come from the floor formula; out-of-range rewards clamp to the
/// edge interval and the clamp is reported to the caller.
struct Discretization {
  double r_min = 0.0;
  double r_max = 1.0;
  int n = 1;

  Discretization() = default;
  Discretization(double lo, double hi, int count);

  double width() const { return (r_max - r_min) / n; }
  /// Center of interval k.
  double center(int k) const { return r_min + (k + 0.5) * width(); }
};

struct LabelResult {
  int label = 0;
  bool clamped = false;
};

LabelResult reward_label(const Discretization& disc, double r);

/// Row-stochastic n x n kernel; C(i, j) is the probability that a reward in
/// interval i is observed in interval j.
class ConfusionMatrix {
 public:
  ConfusionMatrix(int n, std::vector<double> entries);

  int n() const { return n_; }
  double at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<const double> row(int i) const {
    return {entries_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  static ConfusionMatrix identity(int n);

 private:
  int n_;
  std::vector<double> entries_;  // row-major
};

/// Symmetric channel: with probability omega the label is redrawn uniformly
/// over all n intervals (the original included), so C(i,i) = 1 - omega + omega/n.
/// omega = 1 is the fully uniform channel.
ConfusionMatrix uniform_gcm(int n, double omega);

/// True iff every row's strict unique argmax sits on the diagonal.
bool is_mode_preserving(const ConfusionMatrix& c);

// --- noise models ------------------------------------------------------

struct CleanNoise {};
struct GcmNoise {
  Discretization disc;
  ConfusionMatrix c;
};
struct GaussianNoise {
  double sigma = 0.0;
};
struct UniformReplaceNoise {
  double omega = 0.0;
  double lo = -1.0;
  double hi = 1.0;
};
struct RangeUniformNoise {
  double omega = 0.0;
  double r_min = 0.0;
  double r_max = 1.0;
};

using NoiseModel =
    std::variant<CleanNoise, GcmNoise, GaussianNoise, UniformReplaceNoise, RangeUniformNoise>;

/// Validates parameter ranges; throws ConfigError.
void validate(const NoiseModel& model);

struct PerturbedSample {
  double r_true = 0.0;
  double r_tilde = 0.0;
  std::optional<int> y;        // present for GCM only
  std::optional<int> y_tilde;  // present for GCM only
};

/// Draw the perturbed label from row C(y, .) and shift by whole intervals:
/// r_tilde = r + (y_tilde - y) * width.
PerturbedSample gcm_perturb(const Discretization& disc, const ConfusionMatrix& c, double r,
                            Rng& rng);

/// Apply a continuous noise variant. Passing GcmNoise is a ConfigError.
double continuous_perturb(const NoiseModel& model, double r, Rng& rng);

/// Apply any variant; labels are filled for GCM, absent otherwise.
PerturbedSample apply_noise(const NoiseModel& model, double r, Rng& rng);

}  // namespace rdc
