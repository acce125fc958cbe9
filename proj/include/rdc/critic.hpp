#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "rdc/net.hpp"
#include "rdc/perturb.hpp"
#include "rdc/rng.hpp"

namespace rdc {

/// One critic-visible observation. The hidden true reward lives in the envs
/// module and never appears here.
struct Sample {
  std::vector<double> state;
  int action = 0;
  double r_tilde = 0.0;
};

struct Prediction {
  std::vector<double> probs;
  bool unseen = false;
};

/// Common surface for the tabular and network reward critics; also what the
/// GDRC ensemble trains one of per candidate interval count.
class DistributionalCritic {
 public:
  virtual ~DistributionalCritic() = default;
  /// Train on labeled samples; returns post-training mean cross-entropy.
  virtual double train(const std::vector<Sample>& samples, const std::vector<int>& labels) = 0;
  virtual Prediction predict(const Sample& s) const = 0;
  virtual int n_outputs() const = 0;
};

// --- tabular -------------------------------------------------------------

/// Empirical label distribution per (state, action) key. Continuous state
/// coordinates are snapped to a grid; intended for exactly-repeating keys.
class TabularCritic : public DistributionalCritic {
 public:
  explicit TabularCritic(int n_outputs, double key_grid = 1e-6);

  /// Increment the count of each sample's label under its key.
  void update(const std::vector<Sample>& samples, const std::vector<int>& labels);

  double train(const std::vector<Sample>& samples, const std::vector<int>& labels) override;
  Prediction predict(const Sample& s) const override;
  int n_outputs() const override { return n_; }

  std::size_t key_count() const { return table_.size(); }
  /// Raw counts for a key; zeros if unseen.
  std::vector<std::int64_t> counts(const Sample& s) const;

  void save(std::ostream& out) const;
  static TabularCritic load(std::istream& in);

 private:
  using Key = std::pair<std::vector<std::int64_t>, int>;
  Key key_of(const Sample& s) const;

  int n_;
  double key_grid_;
  std::map<Key, std::vector<std::int64_t>> table_;
};

void tabular_update(TabularCritic& critic, const std::vector<Sample>& samples,
                    const std::vector<int>& labels);

// --- network -------------------------------------------------------------

/// How raw samples become network inputs: discrete states/actions one-hot,
/// continuous coordinates mapped affinely to [-1, 1].
struct InputEncoding {
  int state_onehot = 0;  // > 0: state[0] is an index into this many slots
  std::vector<std::pair<double, double>> state_ranges;  // per-dim (lo, hi) when not one-hot
  int action_onehot = 0;  // > 0: one-hot of this many actions

  int dim() const;
  void encode(const Sample& s, double* out) const;
  Eigen::MatrixXd encode_batch(const std::vector<Sample>& samples) const;
};

struct TrainConfig {
  double lr = 1e-3;
  int iters = 40;
  int batch = 64;
};

/// Classifier from encoded (state, action) to a distribution over n_o
/// reward labels; two tanh hidden layers of 64 units.
class NetworkCritic : public DistributionalCritic {
 public:
  NetworkCritic(InputEncoding enc, int n_outputs, TrainConfig cfg, Rng rng,
                std::vector<int> hidden = {64, 64});

  /// Runs cfg.iters Adam iterations over minibatches drawn from the batch;
  /// returns the full-batch mean cross-entropy afterwards. Throws
  /// TrainingDivergence if the loss goes non-finite.
  double train(const std::vector<Sample>& samples, const std::vector<int>& labels) override;
  Prediction predict(const Sample& s) const override;
  int n_outputs() const override { return n_; }

  Mlp& net() { return net_; }
  const InputEncoding& encoding() const { return enc_; }

  void save(std::ostream& out) const;

 private:
  InputEncoding enc_;
  int n_;
  TrainConfig cfg_;
  Rng rng_;
  Mlp net_;
};

/// The RE baseline: regression to the observed reward, prediction used
/// directly as the corrected reward.
class RegressionCritic {
 public:
  RegressionCritic(InputEncoding enc, TrainConfig cfg, Rng rng,
                   std::vector<int> hidden = {64, 64});

  double train(const std::vector<Sample>& samples);  // returns final MSE
  double predict(const Sample& s) const;

  Mlp& net() { return net_; }

 private:
  InputEncoding enc_;
  TrainConfig cfg_;
  Rng rng_;
  Mlp net_;
};

// --- correction and losses ------------------------------------------------

/// Alg-1 correction: label the observed reward, take the critic's argmax
/// (lowest index wins ties), shift by whole intervals.
double correct_reward(const Discretization& disc_o, double r_tilde,
                      std::span<const double> dist);

int argmax_lowest(std::span<const double> v);

/// Mean of -log p(observed label), probabilities floored at 1e-12.
double mean_cross_entropy(const DistributionalCritic& critic, const std::vector<Sample>& samples,
                          const std::vector<int>& labels);

// --- surrogate reward (SR_W) -----------------------------------------------

/// r_hat solves C * r_hat = reward_values, so replacing each observed label's
/// reward with r_hat[label] is unbiased under the channel.
struct SurrogateTable {
  ConfusionMatrix c;
  Discretization disc;
  std::vector<double> reward_values;  // interval centers by default
  std::vector<double> r_hat;
};

/// Throws InversionError when the solve residual exceeds 1e-6.
SurrogateTable surrogate_rewards(const ConfusionMatrix& c, const Discretization& disc,
                                 const std::vector<double>& reward_values);
SurrogateTable surrogate_rewards(const ConfusionMatrix& c, const Discretization& disc);

double sr_correct(const SurrogateTable& table, double r_tilde);

}  // namespace rdc
