#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rdc/perturb.hpp"
#include "rdc/rng.hpp"

namespace rdc {

/// Finite support distribution over perturbed reward values.
struct AtomicDistribution {
  std::vector<std::pair<double, double>> atoms;  // (reward value, probability)
};

/// The exact distribution of the perturbed reward for a fixed true reward:
/// one atom per target interval j at r + (j - y) * width, weight C(y, j).
AtomicDistribution perturbed_atoms(const Discretization& disc_r, const ConfusionMatrix& c,
                                   double r);

struct DiscretizedAtoms {
  std::vector<double> p;  // probability per output label
  int clamped_atoms = 0;  // atoms outside [r_min, r_max) that were clamped
};

/// Bucket-sum of atom probabilities by reward label under disc_o.
DiscretizedAtoms discretize_atoms(const AtomicDistribution& atoms, const Discretization& disc_o);

/// Entropy in nats; zero-probability entries contribute nothing.
double entropy(std::span<const double> p);

struct CurvePoint {
  int n_o = 0;
  double value = 0.0;
  bool tie = false;  // argmax of the discretized distribution was not unique
};

/// Minimum achievable mean cross-entropy per output count: the entropy of
/// the discretized perturbation distribution (the optimum predicts it).
std::vector<CurvePoint> min_cross_entropy_curve(const Discretization& disc_r,
                                                const ConfusionMatrix& c, double r,
                                                const std::vector<int>& candidates);

/// Expected |corrected - true| under the exact perturbation distribution,
/// assuming the critic predicts the discretized distribution and corrections
/// follow the argmax rule; averaged over the given true rewards.
std::vector<CurvePoint> reconstruction_error_curve(const Discretization& disc_r,
                                                   const ConfusionMatrix& c,
                                                   const std::vector<double>& true_rewards,
                                                   const std::vector<int>& candidates);

/// Default true-reward set for curves: draws per interval, uniform inside it.
std::vector<double> default_true_rewards(const Discretization& disc_r, int per_interval, Rng& rng);

/// A divisor chain 1 = c_0 | c_1 | ... | c_k = n built from the prime
/// factorization; along such chains output buckets nest, so the min-CE curve
/// is monotone by the entropy merging inequality.
std::vector<int> divisor_chain(int n);

struct Prop1Result {
  double max_error = 0.0;  // max |snapped - continuous| over the draws
  double bound = 0.0;      // (r_max - r_min) / n_r
};

/// Draw continuous perturbations, snap them through the GCM representation
/// (same within-interval offset as the true reward), report the worst
/// deviation. Must stay within bound.
Prop1Result prop1_max_error(const NoiseModel& model, const Discretization& disc,
                            long n_samples, Rng& rng);

}  // namespace rdc
