#include "rdc/perturb.hpp"

#include <cmath>
#include <string>

#include "rdc/errors.hpp"

namespace rdc {

Discretization::Discretization(double lo, double hi, int count) : r_min(lo), r_max(hi), n(count) {
  if (!(r_min < r_max)) throw ConfigError("discretization: r_min must be < r_max");
  if (n < 1) throw ConfigError("discretization: n must be >= 1");
  if (!(width() > 0.0)) throw ConfigError("discretization: interval width must be positive");
}

LabelResult reward_label(const Discretization& disc, double r) {
  int y = static_cast<int>(std::floor((r - disc.r_min) / disc.width()));
  if (y < 0) return {0, true};
  if (y >= disc.n) return {disc.n - 1, true};
  return {y, false};
}

ConfusionMatrix::ConfusionMatrix(int n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ < 1) throw ConfigError("confusion matrix: dimension must be >= 1");
  if (entries_.size() != static_cast<std::size_t>(n_) * n_)
    throw ConfigError("confusion matrix: expected " + std::to_string(n_ * n_) + " entries");
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n_; ++j) {
      double v = at(i, j);
      if (v < 0.0 || v > 1.0)
        throw ConfigError("confusion matrix: entry out of [0,1] at row " + std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("confusion matrix: row " + std::to_string(i) + " sums to " +
                        std::to_string(sum));
  }
}

ConfusionMatrix ConfusionMatrix::identity(int n) {
  std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i) * n + i] = 1.0;
  return {n, std::move(e)};
}

ConfusionMatrix uniform_gcm(int n, double omega) {
  if (n < 1) throw ConfigError("uniform_gcm: n must be >= 1");
  if (omega < 0.0 || omega > 1.0) throw ConfigError("uniform_gcm: omega must be in [0,1]");
  std::vector<double> e(static_cast<std::size_t>(n) * n, omega / n);
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i) * n + i] = 1.0 - omega + omega / n;
  return {n, std::move(e)};
}

bool is_mode_preserving(const ConfusionMatrix& c) {
  for (int i = 0; i < c.n(); ++i) {
    double diag = c.at(i, i);
    for (int j = 0; j < c.n(); ++j) {
      if (j != i && c.at(i, j) >= diag) return false;
    }
  }
  return true;
}

void validate(const NoiseModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GcmNoise>) {
          if (m.c.n() != m.disc.n) throw ConfigError("gcm noise: matrix/discretization mismatch");
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          if (m.sigma < 0.0) throw ConfigError("gaussian noise: sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, UniformReplaceNoise>) {
          if (m.omega < 0.0 || m.omega > 1.0)
            throw ConfigError("uniform noise: omega must be in [0,1]");
          if (!(m.lo < m.hi)) throw ConfigError("uniform noise: lo must be < hi");
        } else if constexpr (std::is_same_v<T, RangeUniformNoise>) {
          if (m.omega < 0.0 || m.omega > 1.0)
            throw ConfigError("range-uniform noise: omega must be in [0,1]");
          if (!(m.r_min < m.r_max)) throw ConfigError("range-uniform noise: empty range");
        }
      },
      model);
}

PerturbedSample gcm_perturb(const Discretization& disc, const ConfusionMatrix& c, double r,
                            Rng& rng) {
  if (c.n() != disc.n) throw ConfigError("gcm_perturb: matrix/discretization mismatch");
  int y = reward_label(disc, r).label;
  int yt = rng.categorical(c.row(y));
  double rt = r + (yt - y) * disc.width();
  return {r, rt, y, yt};
}

double continuous_perturb(const NoiseModel& model, double r, Rng& rng) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CleanNoise>) {
          return r;
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return r + rng.normal(0.0, m.sigma);
        } else if constexpr (std::is_same_v<T, UniformReplaceNoise>) {
          double u = rng.uniform01();
          double repl = rng.uniform(m.lo, m.hi);
          return u < m.omega ? repl : r;
        } else if constexpr (std::is_same_v<T, RangeUniformNoise>) {
          double u = rng.uniform01();
          double repl = rng.uniform(m.r_min, m.r_max);
          return u < m.omega ? repl : r;
        } else {
          throw ConfigError("continuous_perturb: GCM noise is not a continuous variant");
        }
      },
      model);
}

PerturbedSample apply_noise(const NoiseModel& model, double r, Rng& rng) {
  if (const auto* g = std::get_if<GcmNoise>(&model)) {
    return gcm_perturb(g->disc, g->c, r, rng);
  }
  return {r, continuous_perturb(model, r, rng), std::nullopt, std::nullopt};
}

}  // namespace rdc
