#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdc/critic.hpp"
#include "rdc/envs.hpp"
#include "rdc/gdrc.hpp"

namespace rdc {

/// Pluggable correction stage between observed rewards and the learner.
/// process() trains the critic on the batch first and then corrects it,
/// so even the first batch is critiqued by a trained critic.
class RewardPipeline {
 public:
  enum class Kind { raw, re, sr_w, drc, gdrc };

  static RewardPipeline raw();
  static RewardPipeline re(std::unique_ptr<RegressionCritic> critic);
  static RewardPipeline sr_w(SurrogateTable table);
  static RewardPipeline drc(std::unique_ptr<DistributionalCritic> critic, Discretization disc_o);
  static RewardPipeline gdrc(std::unique_ptr<CriticEnsemble> ensemble);

  /// Corrected reward per sample, in order. Runs inside a CriticScope.
  std::vector<double> process(const std::vector<Sample>& batch);

  Kind kind() const { return kind_; }
  static std::string kind_name(Kind k);
  /// Post-training critic cross-entropy of the last processed batch
  /// (regression loss for RE); NaN where no critic trains.
  double last_loss() const { return last_loss_; }
  /// Observed labels outside the discretization that had to clamp.
  long clamp_count() const { return clamps_; }
  const CriticEnsemble* ensemble() const { return ensemble_.get(); }
  const VoteRecord* last_vote_record() const;

 private:
  RewardPipeline() = default;

  Kind kind_ = Kind::raw;
  std::unique_ptr<RegressionCritic> re_;
  std::optional<SurrogateTable> sr_;
  std::unique_ptr<DistributionalCritic> drc_;
  Discretization drc_disc_;
  std::unique_ptr<CriticEnsemble> ensemble_;
  std::optional<VoteRecord> last_record_;
  double last_loss_ = std::numeric_limits<double>::quiet_NaN();
  long clamps_ = 0;
};

// --- tabular Q-learning -------------------------------------------------------

struct QTable {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> q;  // row-major [state][action]

  QTable() = default;
  QTable(int states, int actions)
      : n_states(states), n_actions(actions),
        q(static_cast<std::size_t>(states) * actions, 0.0) {}

  double& at(int s, int a) { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  double at(int s, int a) const { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  int greedy(int s) const;
  double max_q(int s) const;
};

struct QConfig {
  long steps = 50000;
  double lr = 0.1;
  double gamma = 0.99;
  double eps_hi = 1.0;  // linear decay over the first half of training
  double eps_lo = 0.05;
  int cadence = 500;  // environment steps between pipeline updates
  long eval_every = 2500;
  int eval_episodes = 20;
  bool train_on_history = false;  // critics see all past samples, not just the fresh batch
};

struct CurveRow {
  long step = 0;
  long episode = 0;
  double clean_return = 0.0;   // greedy evaluation with hidden true rewards
  double corrected_mse = 0.0;  // corrected vs true over the last batch (evaluation lane)
  double corrected_mae = 0.0;
  double critic_loss = 0.0;
  int winner_n_o = 0;  // gdrc only; 0 otherwise
  long clamps = 0;
};

/// Batched Q-learning: act epsilon-greedily, buffer transitions, and at each
/// cadence train the pipeline on the batch and TD-update with corrected
/// rewards. Evaluation always scores hidden true rewards.
std::vector<CurveRow> q_learning_train(const GridWorld& env, RewardPipeline& pipe,
                                       const QConfig& cfg, QTable& q, std::uint64_t seed);

struct EvalResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  int episodes = 0;
};

/// Greedy rollouts scored with hidden true rewards.
EvalResult evaluate_policy(const GridWorld& env, const QTable& q, int episodes, Rng& rng);

// --- bandit policy gradient --------------------------------------------------------

struct PgConfig {
  long rounds = 20000;
  double eta = 0.03;           // policy step size
  double baseline_beta = 0.05;  // EMA rate of the reward baseline
  int cadence = 500;
  long eval_every = 1000;
};

struct PgCurveRow {
  long round = 0;
  double mean_clean_regret = 0.0;  // over the last eval window
  double best_arm_prob = 0.0;
  int policy_arm = 0;  // current argmax arm
  double corrected_mse = 0.0;
  double critic_loss = 0.0;
};

struct SoftmaxPolicy {
  std::vector<double> w;
  explicit SoftmaxPolicy(int arms) : w(static_cast<std::size_t>(arms), 0.0) {}
  std::vector<double> probs() const;
  int sample(Rng& rng) const;
  int greedy() const;
};

/// Likelihood-ratio updates on pipeline-corrected rewards, batched at the
/// pipeline cadence; regret is measured against the best arm's true mean.
std::vector<PgCurveRow> bandit_pg_train(const ContextBandit& env, RewardPipeline& pipe,
                                        const PgConfig& cfg, SoftmaxPolicy& policy,
                                        std::uint64_t seed);

}  // namespace rdc
