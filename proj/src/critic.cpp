#include "rdc/critic.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rdc/errors.hpp"

namespace rdc {

namespace {
constexpr double kProbFloor = 1e-12;
}

// --- tabular ---------------------------------------------------------------

TabularCritic::TabularCritic(int n_outputs, double key_grid) : n_(n_outputs), key_grid_(key_grid) {
  if (n_ < 1) throw ConfigError("tabular critic: n_outputs must be >= 1");
  if (!(key_grid_ > 0.0)) throw ConfigError("tabular critic: key grid must be positive");
}

TabularCritic::Key TabularCritic::key_of(const Sample& s) const {
  std::vector<std::int64_t> coords;
  coords.reserve(s.state.size());
  for (double v : s.state)
    coords.push_back(static_cast<std::int64_t>(std::llround(v / key_grid_)));
  return {std::move(coords), s.action};
}

void TabularCritic::update(const std::vector<Sample>& samples, const std::vector<int>& labels) {
  if (samples.size() != labels.size()) throw UsageError("tabular update: size mismatch");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_) throw UsageError("tabular update: label out of range");
    auto& row = table_[key_of(samples[i])];
    if (row.empty()) row.assign(static_cast<std::size_t>(n_), 0);
    ++row[static_cast<std::size_t>(labels[i])];
  }
}

double TabularCritic::train(const std::vector<Sample>& samples, const std::vector<int>& labels) {
  update(samples, labels);
  if (samples.empty()) return 0.0;
  return mean_cross_entropy(*this, samples, labels);
}

void tabular_update(TabularCritic& critic, const std::vector<Sample>& samples,
                    const std::vector<int>& labels) {
  critic.update(samples, labels);
}

Prediction TabularCritic::predict(const Sample& s) const {
  auto it = table_.find(key_of(s));
  if (it == table_.end()) {
    return {std::vector<double>(static_cast<std::size_t>(n_), 1.0 / n_), true};
  }
  std::int64_t total = 0;
  for (auto c : it->second) total += c;
  std::vector<double> p(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j)
    p[static_cast<std::size_t>(j)] =
        static_cast<double>(it->second[static_cast<std::size_t>(j)]) / static_cast<double>(total);
  return {std::move(p), false};
}

std::vector<std::int64_t> TabularCritic::counts(const Sample& s) const {
  auto it = table_.find(key_of(s));
  if (it == table_.end()) return std::vector<std::int64_t>(static_cast<std::size_t>(n_), 0);
  return it->second;
}

void TabularCritic::save(std::ostream& out) const {
  out << "rdc-tabular 1\n";
  out.precision(17);
  out << n_ << ' ' << key_grid_ << ' ' << table_.size() << '\n';
  for (const auto& [key, cnts] : table_) {
    out << key.first.size();
    for (auto c : key.first) out << ' ' << c;
    out << ' ' << key.second;
    for (auto c : cnts) out << ' ' << c;
    out << '\n';
  }
}

TabularCritic TabularCritic::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "rdc-tabular" || version != 1) throw ConfigError("tabular load: bad header");
  int n = 0;
  double grid = 0.0;
  std::size_t rows = 0;
  in >> n >> grid >> rows;
  TabularCritic critic(n, grid);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t klen = 0;
    in >> klen;
    Key key;
    key.first.resize(klen);
    for (auto& c : key.first) in >> c;
    in >> key.second;
    std::vector<std::int64_t> cnts(static_cast<std::size_t>(n));
    for (auto& c : cnts) in >> c;
    if (!in) throw ConfigError("tabular load: truncated table");
    critic.table_.emplace(std::move(key), std::move(cnts));
  }
  return critic;
}

// --- encoding ----------------------------------------------------------------

int InputEncoding::dim() const {
  int d = 0;
  d += state_onehot > 0 ? state_onehot : static_cast<int>(state_ranges.size());
  d += action_onehot > 0 ? action_onehot : 1;
  return d;
}

void InputEncoding::encode(const Sample& s, double* out) const {
  int k = 0;
  if (state_onehot > 0) {
    for (int i = 0; i < state_onehot; ++i) out[k + i] = 0.0;
    int idx = static_cast<int>(s.state.at(0));
    if (idx < 0 || idx >= state_onehot) throw UsageError("encode: state index out of range");
    out[k + idx] = 1.0;
    k += state_onehot;
  } else {
    if (s.state.size() != state_ranges.size())
      throw UsageError("encode: state dimension mismatch");
    for (std::size_t i = 0; i < state_ranges.size(); ++i) {
      auto [lo, hi] = state_ranges[i];
      out[k++] = 2.0 * (s.state[i] - lo) / (hi - lo) - 1.0;
    }
  }
  if (action_onehot > 0) {
    for (int i = 0; i < action_onehot; ++i) out[k + i] = 0.0;
    if (s.action < 0 || s.action >= action_onehot)
      throw UsageError("encode: action index out of range");
    out[k + s.action] = 1.0;
  } else {
    out[k] = static_cast<double>(s.action);
  }
}

Eigen::MatrixXd InputEncoding::encode_batch(const std::vector<Sample>& samples) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), dim());
  std::vector<double> row(static_cast<std::size_t>(dim()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    encode(samples[i], row.data());
    for (int j = 0; j < dim(); ++j) x(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
  }
  return x;
}

// --- network critic -----------------------------------------------------------

namespace {
std::vector<int> layer_dims(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  return dims;
}
}  // namespace

NetworkCritic::NetworkCritic(InputEncoding enc, int n_outputs, TrainConfig cfg, Rng rng,
                             std::vector<int> hidden)
    : enc_(std::move(enc)),
      n_(n_outputs),
      cfg_(cfg),
      rng_(rng),
      net_(layer_dims(enc_.dim(), hidden, n_outputs), rng_) {
  if (n_ < 1) throw ConfigError("network critic: n_outputs must be >= 1");
}

double NetworkCritic::train(const std::vector<Sample>& samples, const std::vector<int>& labels) {
  if (samples.empty()) throw UsageError("network critic: empty batch");
  if (samples.size() != labels.size()) throw UsageError("network critic: size mismatch");
  Eigen::MatrixXd x = enc_.encode_batch(samples);
  int bs = std::min<int>(cfg_.batch, static_cast<int>(samples.size()));
  Eigen::MatrixXd xb(bs, x.cols());
  std::vector<int> yb(static_cast<std::size_t>(bs));
  for (int it = 0; it < cfg_.iters; ++it) {
    for (int i = 0; i < bs; ++i) {
      int idx = rng_.uniform_int(static_cast<int>(samples.size()));
      xb.row(i) = x.row(idx);
      yb[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(idx)];
    }
    net_.ce_step(xb, yb, AdamConfig{cfg_.lr});
  }
  double loss = net_.ce_loss(x, labels);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "network critic diverged: loss=" << loss << " batch=" << samples.size()
        << " iters=" << cfg_.iters << " lr=" << cfg_.lr;
    throw TrainingDivergence(msg.str());
  }
  return loss;
}

Prediction NetworkCritic::predict(const Sample& s) const {
  Eigen::MatrixXd x(1, enc_.dim());
  std::vector<double> row(static_cast<std::size_t>(enc_.dim()));
  enc_.encode(s, row.data());
  for (int j = 0; j < enc_.dim(); ++j) x(0, j) = row[static_cast<std::size_t>(j)];
  Eigen::MatrixXd p = net_.softmax(x);
  std::vector<double> probs(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) probs[static_cast<std::size_t>(j)] = p(0, j);
  return {std::move(probs), false};
}

void NetworkCritic::save(std::ostream& out) const { net_.save(out); }

// --- regression critic ----------------------------------------------------------

RegressionCritic::RegressionCritic(InputEncoding enc, TrainConfig cfg, Rng rng,
                                   std::vector<int> hidden)
    : enc_(std::move(enc)), cfg_(cfg), rng_(rng), net_(layer_dims(enc_.dim(), hidden, 1), rng_) {}

double RegressionCritic::train(const std::vector<Sample>& samples) {
  if (samples.empty()) throw UsageError("regression critic: empty batch");
  Eigen::MatrixXd x = enc_.encode_batch(samples);
  Eigen::VectorXd t(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) t(static_cast<Eigen::Index>(i)) = samples[i].r_tilde;
  int bs = std::min<int>(cfg_.batch, static_cast<int>(samples.size()));
  Eigen::MatrixXd xb(bs, x.cols());
  Eigen::VectorXd tb(bs);
  for (int it = 0; it < cfg_.iters; ++it) {
    for (int i = 0; i < bs; ++i) {
      int idx = rng_.uniform_int(static_cast<int>(samples.size()));
      xb.row(i) = x.row(idx);
      tb(i) = t(idx);
    }
    net_.mse_step(xb, tb, AdamConfig{cfg_.lr});
  }
  double loss = net_.mse_loss(x, t);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "regression critic diverged: loss=" << loss << " batch=" << samples.size();
    throw TrainingDivergence(msg.str());
  }
  return loss;
}

double RegressionCritic::predict(const Sample& s) const {
  Eigen::MatrixXd x(1, enc_.dim());
  std::vector<double> row(static_cast<std::size_t>(enc_.dim()));
  enc_.encode(s, row.data());
  for (int j = 0; j < enc_.dim(); ++j) x(0, j) = row[static_cast<std::size_t>(j)];
  return net_.logits(x)(0, 0);
}

// --- correction and losses --------------------------------------------------------

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return best;
}

double correct_reward(const Discretization& disc_o, double r_tilde,
                      std::span<const double> dist) {
  if (static_cast<int>(dist.size()) != disc_o.n)
    throw UsageError("correct_reward: distribution length != n_o");
  int y_tilde = reward_label(disc_o, r_tilde).label;
  int y_hat = argmax_lowest(dist);
  return r_tilde + disc_o.width() * (y_hat - y_tilde);
}

double mean_cross_entropy(const DistributionalCritic& critic, const std::vector<Sample>& samples,
                          const std::vector<int>& labels) {
  if (samples.empty()) throw UsageError("mean_cross_entropy: empty sample set");
  if (samples.size() != labels.size()) throw UsageError("mean_cross_entropy: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto pred = critic.predict(samples[i]);
    total += -std::log(std::max(pred.probs[static_cast<std::size_t>(labels[i])], kProbFloor));
  }
  return total / static_cast<double>(samples.size());
}

// --- surrogate reward ----------------------------------------------------------------

SurrogateTable surrogate_rewards(const ConfusionMatrix& c, const Discretization& disc,
                                 const std::vector<double>& reward_values) {
  if (c.n() != disc.n) throw ConfigError("surrogate: matrix/discretization mismatch");
  if (static_cast<int>(reward_values.size()) != c.n())
    throw ConfigError("surrogate: reward value count mismatch");
  int n = c.n();
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = reward_values[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) m(i, j) = c.at(i, j);
  }
  Eigen::VectorXd x = m.partialPivLu().solve(v);
  double residual = (m * x - v).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-6) {
    std::ostringstream msg;
    msg << "surrogate: confusion matrix is singular or ill-conditioned (residual=" << residual
        << ")";
    throw InversionError(msg.str());
  }
  std::vector<double> r_hat(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r_hat[static_cast<std::size_t>(i)] = x(i);
  return {c, disc, reward_values, std::move(r_hat)};
}

SurrogateTable surrogate_rewards(const ConfusionMatrix& c, const Discretization& disc) {
  std::vector<double> centers(static_cast<std::size_t>(disc.n));
  for (int k = 0; k < disc.n; ++k) centers[static_cast<std::size_t>(k)] = disc.center(k);
  return surrogate_rewards(c, disc, centers);
}

double sr_correct(const SurrogateTable& table, double r_tilde) {
  int y = reward_label(table.disc, r_tilde).label;
  return table.r_hat[static_cast<std::size_t>(y)];
}

}  // namespace rdc
