#include "rdc/theory.hpp"

#include <algorithm>
#include <cmath>

#include "rdc/errors.hpp"

namespace rdc {

AtomicDistribution perturbed_atoms(const Discretization& disc_r, const ConfusionMatrix& c,
                                   double r) {
  if (c.n() != disc_r.n) throw ConfigError("perturbed_atoms: matrix/discretization mismatch");
  int y = reward_label(disc_r, r).label;
  AtomicDistribution out;
  out.atoms.reserve(static_cast<std::size_t>(disc_r.n));
  for (int j = 0; j < disc_r.n; ++j)
    out.atoms.emplace_back(r + (j - y) * disc_r.width(), c.at(y, j));
  return out;
}

DiscretizedAtoms discretize_atoms(const AtomicDistribution& atoms, const Discretization& disc_o) {
  DiscretizedAtoms out;
  out.p.assign(static_cast<std::size_t>(disc_o.n), 0.0);
  for (const auto& [value, prob] : atoms.atoms) {
    auto lab = reward_label(disc_o, value);
    if (lab.clamped) ++out.clamped_atoms;
    out.p[static_cast<std::size_t>(lab.label)] += prob;
  }
  return out;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::vector<CurvePoint> min_cross_entropy_curve(const Discretization& disc_r,
                                                const ConfusionMatrix& c, double r,
                                                const std::vector<int>& candidates) {
  auto atoms = perturbed_atoms(disc_r, c, r);
  std::vector<CurvePoint> curve;
  curve.reserve(candidates.size());
  for (int n_o : candidates) {
    Discretization disc_o(disc_r.r_min, disc_r.r_max, n_o);
    auto d = discretize_atoms(atoms, disc_o);
    curve.push_back({n_o, entropy(d.p), false});
  }
  return curve;
}

namespace {
bool argmax_is_tied(const std::vector<double>& p, int idx) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (static_cast<int>(j) != idx && p[j] == p[static_cast<std::size_t>(idx)]) return true;
  }
  return false;
}

int argmax_index(const std::vector<double>& p) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(p.size()); ++i)
    if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
  return best;
}
}  // namespace

std::vector<CurvePoint> reconstruction_error_curve(const Discretization& disc_r,
                                                   const ConfusionMatrix& c,
                                                   const std::vector<double>& true_rewards,
                                                   const std::vector<int>& candidates) {
  if (true_rewards.empty()) throw UsageError("reconstruction_error_curve: empty reward set");
  std::vector<CurvePoint> curve;
  curve.reserve(candidates.size());
  for (int n_o : candidates) {
    Discretization disc_o(disc_r.r_min, disc_r.r_max, n_o);
    double total = 0.0;
    bool any_tie = false;
    for (double r : true_rewards) {
      auto atoms = perturbed_atoms(disc_r, c, r);
      auto d = discretize_atoms(atoms, disc_o);
      int y_hat = argmax_index(d.p);
      any_tie = any_tie || argmax_is_tied(d.p, y_hat);
      double err = 0.0;
      for (const auto& [value, prob] : atoms.atoms) {
        int y_obs = reward_label(disc_o, value).label;
        double corrected = value + disc_o.width() * (y_hat - y_obs);
        err += prob * std::abs(corrected - r);
      }
      total += err;
    }
    curve.push_back({n_o, total / static_cast<double>(true_rewards.size()), any_tie});
  }
  return curve;
}

std::vector<double> default_true_rewards(const Discretization& disc_r, int per_interval,
                                         Rng& rng) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(disc_r.n) * per_interval);
  for (int k = 0; k < disc_r.n; ++k) {
    double lo = disc_r.r_min + k * disc_r.width();
    for (int i = 0; i < per_interval; ++i) out.push_back(rng.uniform(lo, lo + disc_r.width()));
  }
  return out;
}

std::vector<int> divisor_chain(int n) {
  if (n < 1) throw UsageError("divisor_chain: n must be >= 1");
  std::vector<int> chain{1};
  int rest = n;
  int current = 1;
  for (int p = 2; p * p <= rest; ++p) {
    while (rest % p == 0) {
      rest /= p;
      current *= p;
      chain.push_back(current);
    }
  }
  if (rest > 1) {
    current *= rest;
    chain.push_back(current);
  }
  if (chain.back() != n) chain.push_back(n);  // n == 1
  chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
  return chain;
}

Prop1Result prop1_max_error(const NoiseModel& model, const Discretization& disc, long n_samples,
                            Rng& rng) {
  if (std::holds_alternative<GcmNoise>(model))
    throw ConfigError("prop1: requires a continuous noise model");
  Prop1Result res;
  res.bound = disc.width();
  double hi = disc.r_max - disc.width() * 1e-12;  // keep draws inside the half-open range
  for (long i = 0; i < n_samples; ++i) {
    double r = rng.uniform(disc.r_min, disc.r_max);
    double rbar = continuous_perturb(model, r, rng);
    rbar = std::clamp(rbar, disc.r_min, hi);
    int y = reward_label(disc, r).label;
    int yt = reward_label(disc, rbar).label;
    double snapped = r + (yt - y) * disc.width();
    res.max_error = std::max(res.max_error, std::abs(snapped - rbar));
  }
  return res;
}

}  // namespace rdc
