#pragma once

#include <utility>
#include <vector>

#include "rdc/perturb.hpp"
#include "rdc/rng.hpp"

namespace rdc {

// --- hidden-lane audit -----------------------------------------------------
//
// True rewards are evaluation-only. Critic updates and corrections run inside
// a CriticScope; reading a hidden reward there bumps the violation counter,
// which the harness asserts is zero after every run.
namespace audit {

struct CriticScope {
  CriticScope();
  ~CriticScope();
  CriticScope(const CriticScope&) = delete;
  CriticScope& operator=(const CriticScope&) = delete;
};

bool in_critic_scope();
long violations();
void reset();
void record_hidden_read();

}  // namespace audit

// --- gridworld ----------------------------------------------------------------

/// Rectangular grid; the reward for a step is the value of the cell entered.
/// Moves off the edge stay in place (and collect the current cell's value).
struct GridWorldSpec {
  int width = 5;
  int height = 5;
  std::vector<double> values;  // the n_r distinct reward values
  std::vector<int> layout;     // value index per cell, row-major
  std::vector<int> terminals;
  int start = 0;
  int step_limit = 50;
  double slip = 0.0;  // probability the chosen action is replaced by a random one
  double r_min = -1.0;
  double r_max = 1.0;

  /// 5x5 grid over six values evenly spaced in [-1, 1): a descending corridor
  /// on the left wall, a two-cell positive pocket bottom-right, a one-shot
  /// terminal top-right, cliffs in between.
  static GridWorldSpec default_spec();
  void validate() const;
  int cell_count() const { return width * height; }
};

struct GridTransition {
  int state = 0;
  int action = 0;
  int next_state = 0;
  double r_observed = 0.0;
  bool done = false;
  double r_true_hidden = 0.0;  // read through true_reward() only
};

/// Evaluation-only accessor for the hidden lane.
double true_reward(const GridTransition& t);

class GridWorld {
 public:
  GridWorld(GridWorldSpec spec, NoiseModel noise);

  int reset(Rng& rng) const;
  /// Applies slip, moves, perturbs the true reward through the noise model.
  GridTransition step(int state, int action, Rng& env_rng, Rng& noise_rng) const;

  std::pair<double, double> reward_range() const { return {spec_.r_min, spec_.r_max}; }
  const GridWorldSpec& spec() const { return spec_; }
  const NoiseModel& noise() const { return noise_; }
  int n_actions() const { return 4; }  // up, down, left, right
  bool is_terminal(int cell) const;
  double cell_value(int cell) const;
  int next_cell(int cell, int action) const;

 private:
  GridWorldSpec spec_;
  NoiseModel noise_;
};

// --- contextual bandit -----------------------------------------------------------

/// Smooth closed-form reward per arm over a continuous context:
/// r(s, a) = lo + (hi - lo) * (1 + cos(pi * (w_a . s + b_a))) / 2.
struct BanditArm {
  std::vector<double> w;
  double b = 0.0;
};

struct BanditSpec {
  int context_dim = 2;
  std::vector<BanditArm> arms;
  double r_lo = 0.0;
  double r_hi = 1.0;

  /// d=2, K=4, contexts uniform on [0,1)^2, means separated by >= 0.1.
  static BanditSpec default_spec();
  void validate() const;
  int n_arms() const { return static_cast<int>(arms.size()); }
};

struct BanditRound {
  std::vector<double> context;
  int arm = 0;
  double r_observed = 0.0;
  double r_true_hidden = 0.0;  // read through true_reward() only
};

double true_reward(const BanditRound& t);

class ContextBandit {
 public:
  ContextBandit(BanditSpec spec, NoiseModel noise);

  std::vector<double> draw_context(Rng& rng) const;
  BanditRound pull(const std::vector<double>& context, int arm, Rng& noise_rng) const;

  /// Closed-form reward, exposed for oracles and mean computation.
  double reward_fn(const std::vector<double>& context, int arm) const;
  /// E[r(s, a)] over uniform contexts, by composite Simpson quadrature.
  double arm_mean(int arm) const;
  int best_arm() const;

  std::pair<double, double> reward_range() const { return {spec_.r_lo, spec_.r_hi}; }
  const BanditSpec& spec() const { return spec_; }

 private:
  BanditSpec spec_;
  NoiseModel noise_;
};

}  // namespace rdc
