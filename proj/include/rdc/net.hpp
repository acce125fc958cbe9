#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "rdc/rng.hpp"

namespace rdc {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Fully connected net: tanh hidden layers, linear output layer.
/// Weights start at U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases at zero.
/// Carries its own Adam moments so training can resume after save/load.
class Mlp {
 public:
  Mlp(const std::vector<int>& dims, Rng& rng);

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  /// Rows of x are inputs; returns one row of logits per input.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const;
  /// Row-wise stable softmax of the logits.
  Eigen::MatrixXd softmax(const Eigen::MatrixXd& x) const;

  /// Mean cross-entropy of softmax outputs against integer labels.
  /// Probabilities are floored at 1e-12 before the log.
  double ce_loss(const Eigen::MatrixXd& x, const std::vector<int>& y) const;
  /// Mean squared error of the first output against targets.
  double mse_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const;

  /// One Adam step on the mean loss over the given minibatch.
  void ce_step(const Eigen::MatrixXd& x, const std::vector<int>& y, const AdamConfig& cfg);
  void mse_step(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, const AdamConfig& cfg);

  // Flat parameter access (weights then biases, layer by layer).
  int param_count() const;
  double param(int i) const;
  void set_param(int i, double v);
  std::vector<double> ce_grad(const Eigen::MatrixXd& x, const std::vector<int>& y) const;
  std::vector<double> mse_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const;

  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

  struct Grads {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
  };

 private:
  Mlp() = default;

  Grads backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dlogits) const;
  void adam_apply(const Grads& g, const AdamConfig& cfg);
  std::vector<Eigen::MatrixXd> activations(const Eigen::MatrixXd& x) const;

  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> w_;  // [fan_in x fan_out]
  std::vector<Eigen::VectorXd> b_;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
  long long step_ = 0;
};

}  // namespace rdc
