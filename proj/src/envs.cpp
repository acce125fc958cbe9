#include "rdc/envs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "rdc/errors.hpp"

namespace rdc {

// --- audit -------------------------------------------------------------------

namespace audit {
namespace {
thread_local int scope_depth = 0;
std::atomic<long> violation_count{0};
}  // namespace

CriticScope::CriticScope() { ++scope_depth; }
CriticScope::~CriticScope() { --scope_depth; }

bool in_critic_scope() { return scope_depth > 0; }
long violations() { return violation_count.load(); }
void reset() { violation_count.store(0); }
void record_hidden_read() {
  if (in_critic_scope()) violation_count.fetch_add(1);
}

}  // namespace audit

double true_reward(const GridTransition& t) {
  audit::record_hidden_read();
  return t.r_true_hidden;
}

double true_reward(const BanditRound& t) {
  audit::record_hidden_read();
  return t.r_true_hidden;
}

// --- gridworld -----------------------------------------------------------------

GridWorldSpec GridWorldSpec::default_spec() {
  GridWorldSpec spec;
  spec.width = 5;
  spec.height = 5;
  spec.r_min = -1.0;
  spec.r_max = 1.0;
  // interval centers of [-1, 1) split six ways
  spec.values = {-5.0 / 6.0, -0.5, -1.0 / 6.0, 1.0 / 6.0, 0.5, 5.0 / 6.0};
  spec.layout = {
      2, 0, 2, 0, 5,  // start top-left; terminal top-right
      2, 0, 1, 0, 2,  //
      2, 1, 0, 1, 2,  //
      2, 0, 1, 0, 3,  //
      2, 1, 0, 4, 4,  // positive pocket bottom-right
  };
  spec.terminals = {4};
  spec.start = 0;
  spec.step_limit = 50;
  spec.slip = 0.0;
  return spec;
}

void GridWorldSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("gridworld: degenerate size");
  if (static_cast<int>(layout.size()) != cell_count())
    throw ConfigError("gridworld: layout size != width*height");
  if (values.empty()) throw ConfigError("gridworld: no reward values");
  for (int idx : layout) {
    if (idx < 0 || idx >= static_cast<int>(values.size()))
      throw ConfigError("gridworld: layout references unknown value index");
  }
  for (double v : values) {
    if (v < r_min || v >= r_max)
      throw ConfigError("gridworld: reward value outside [r_min, r_max)");
  }
  if (terminals.empty()) throw ConfigError("gridworld: at least one terminal required");
  for (int t : terminals) {
    if (t < 0 || t >= cell_count()) throw ConfigError("gridworld: terminal out of bounds");
  }
  if (start < 0 || start >= cell_count()) throw ConfigError("gridworld: start out of bounds");
  if (step_limit < 1) throw ConfigError("gridworld: step limit must be >= 1");
  if (slip < 0.0 || slip > 1.0) throw ConfigError("gridworld: slip must be in [0,1]");
}

GridWorld::GridWorld(GridWorldSpec spec, NoiseModel noise)
    : spec_(std::move(spec)), noise_(std::move(noise)) {
  spec_.validate();
  validate(noise_);
}

int GridWorld::reset(Rng&) const { return spec_.start; }

bool GridWorld::is_terminal(int cell) const {
  return std::find(spec_.terminals.begin(), spec_.terminals.end(), cell) !=
         spec_.terminals.end();
}

double GridWorld::cell_value(int cell) const {
  return spec_.values[static_cast<std::size_t>(spec_.layout[static_cast<std::size_t>(cell)])];
}

int GridWorld::next_cell(int cell, int action) const {
  static constexpr int dx[4] = {0, 0, -1, 1};
  static constexpr int dy[4] = {-1, 1, 0, 0};
  if (action < 0 || action >= 4) throw UsageError("gridworld: invalid action index");
  int x = cell % spec_.width + dx[action];
  int y = cell / spec_.width + dy[action];
  if (x < 0 || x >= spec_.width || y < 0 || y >= spec_.height) return cell;
  return y * spec_.width + x;
}

GridTransition GridWorld::step(int state, int action, Rng& env_rng, Rng& noise_rng) const {
  if (state < 0 || state >= spec_.cell_count()) throw UsageError("gridworld: invalid state");
  if (action < 0 || action >= 4) throw UsageError("gridworld: invalid action index");
  int chosen = action;
  if (spec_.slip > 0.0) {
    double u = env_rng.uniform01();
    int alt = env_rng.uniform_int(4);
    if (u < spec_.slip) chosen = alt;
  }
  int next = next_cell(state, chosen);
  double r_true = cell_value(next);
  double r_obs = apply_noise(noise_, r_true, noise_rng).r_tilde;
  return {state, action, next, r_obs, is_terminal(next), r_true};
}

// --- bandit ---------------------------------------------------------------------

BanditSpec BanditSpec::default_spec() {
  BanditSpec spec;
  spec.context_dim = 2;
  spec.r_lo = 0.0;
  spec.r_hi = 1.0;
  spec.arms = {
      {{0.3, 0.2}, 0.25},
      {{0.6, 0.8}, 0.10},
      {{1.1, 0.5}, 0.20},
      {{0.2, 0.1}, 1.20},
  };
  return spec;
}

void BanditSpec::validate() const {
  if (context_dim < 0) throw ConfigError("bandit: negative context dimension");
  if (arms.empty()) throw ConfigError("bandit: no arms");
  if (!(r_lo < r_hi)) throw ConfigError("bandit: empty reward range");
  for (const auto& arm : arms) {
    if (static_cast<int>(arm.w.size()) != context_dim)
      throw ConfigError("bandit: arm weight dimension mismatch");
  }
}

ContextBandit::ContextBandit(BanditSpec spec, NoiseModel noise)
    : spec_(std::move(spec)), noise_(std::move(noise)) {
  spec_.validate();
  validate(noise_);
}

std::vector<double> ContextBandit::draw_context(Rng& rng) const {
  std::vector<double> ctx(static_cast<std::size_t>(spec_.context_dim));
  for (auto& v : ctx) v = rng.uniform01();
  return ctx;
}

double ContextBandit::reward_fn(const std::vector<double>& context, int arm) const {
  if (arm < 0 || arm >= spec_.n_arms()) throw UsageError("bandit: invalid arm index");
  const auto& a = spec_.arms[static_cast<std::size_t>(arm)];
  double dot = a.b;
  for (std::size_t i = 0; i < context.size(); ++i) dot += a.w[i] * context[i];
  return spec_.r_lo + (spec_.r_hi - spec_.r_lo) * (1.0 + std::cos(M_PI * dot)) / 2.0;
}

BanditRound ContextBandit::pull(const std::vector<double>& context, int arm,
                                Rng& noise_rng) const {
  double r_true = reward_fn(context, arm);
  double r_obs = apply_noise(noise_, r_true, noise_rng).r_tilde;
  return {context, arm, r_obs, r_true};
}

double ContextBandit::arm_mean(int arm) const {
  // composite Simpson over [0,1]^dim, 64 panels per axis
  constexpr int panels = 64;
  const int d = spec_.context_dim;
  if (d == 0) return reward_fn({}, arm);
  auto weight = [](int i) { return i == 0 || i == panels ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0); };
  if (d == 1) {
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i)
      acc += weight(i) * reward_fn({static_cast<double>(i) / panels}, arm);
    return acc / (3.0 * panels);
  }
  if (d != 2) throw UsageError("bandit: arm_mean implemented for context_dim <= 2");
  double acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    for (int j = 0; j <= panels; ++j) {
      acc += weight(i) * weight(j) *
             reward_fn({static_cast<double>(i) / panels, static_cast<double>(j) / panels}, arm);
    }
  }
  return acc / (9.0 * panels * panels);
}

int ContextBandit::best_arm() const {
  int best = 0;
  double best_mean = arm_mean(0);
  for (int a = 1; a < spec_.n_arms(); ++a) {
    double m = arm_mean(a);
    if (m > best_mean) {
      best = a;
      best_mean = m;
    }
  }
  return best;
}

}  // namespace rdc
