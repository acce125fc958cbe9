#include "rdc/net.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "rdc/errors.hpp"

namespace rdc {

namespace {
constexpr double kProbFloor = 1e-12;
}

Mlp::Mlp(const std::vector<int>& dims, Rng& rng) : dims_(dims) {
  if (dims_.size() < 2) throw ConfigError("mlp: need at least input and output dims");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    int fan_in = dims_[l];
    int fan_out = dims_[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-scale, scale);
    w_.push_back(w);
    b_.push_back(Eigen::VectorXd::Zero(fan_out));
    mw_.push_back(Eigen::MatrixXd::Zero(fan_in, fan_out));
    vw_.push_back(Eigen::MatrixXd::Zero(fan_in, fan_out));
    mb_.push_back(Eigen::VectorXd::Zero(fan_out));
    vb_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

std::vector<Eigen::MatrixXd> Mlp::activations(const Eigen::MatrixXd& x) const {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(w_.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::MatrixXd z = (acts.back() * w_[l]).rowwise() + b_[l].transpose();
    if (l + 1 < w_.size()) z = z.array().tanh();
    acts.push_back(std::move(z));
  }
  return acts;
}

Eigen::MatrixXd Mlp::logits(const Eigen::MatrixXd& x) const { return activations(x).back(); }

Eigen::MatrixXd Mlp::softmax(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = logits(x);
  Eigen::VectorXd m = z.rowwise().maxCoeff();
  z = (z.colwise() - m).array().exp();
  Eigen::VectorXd s = z.rowwise().sum();
  return z.array().colwise() / s.array();
}

double Mlp::ce_loss(const Eigen::MatrixXd& x, const std::vector<int>& y) const {
  Eigen::MatrixXd p = softmax(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    total += -std::log(std::max(p(i, y[static_cast<std::size_t>(i)]), kProbFloor));
  return total / static_cast<double>(p.rows());
}

double Mlp::mse_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const {
  Eigen::VectorXd pred = logits(x).col(0);
  return (pred - t).squaredNorm() / static_cast<double>(t.size());
}

Mlp::Grads Mlp::backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dlogits) const {
  auto acts = activations(x);
  Grads g;
  g.w.resize(w_.size());
  g.b.resize(w_.size());
  Eigen::MatrixXd d = dlogits;
  for (std::size_t l = w_.size(); l-- > 0;) {
    g.w[l] = acts[l].transpose() * d;
    g.b[l] = d.colwise().sum();
    if (l > 0) {
      d = (d * w_[l].transpose()).cwiseProduct(
          (1.0 - acts[l].array().square()).matrix());
    }
  }
  return g;
}

void Mlp::adam_apply(const Grads& g, const AdamConfig& cfg) {
  ++step_;
  double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (std::size_t l = 0; l < w_.size(); ++l) {
    mw_[l] = cfg.beta1 * mw_[l] + (1.0 - cfg.beta1) * g.w[l];
    vw_[l] = cfg.beta2 * vw_[l] + (1.0 - cfg.beta2) * g.w[l].cwiseProduct(g.w[l]);
    w_[l].array() -= cfg.lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + cfg.eps);
    mb_[l] = cfg.beta1 * mb_[l] + (1.0 - cfg.beta1) * g.b[l];
    vb_[l] = cfg.beta2 * vb_[l] + (1.0 - cfg.beta2) * g.b[l].cwiseProduct(g.b[l]);
    b_[l].array() -= cfg.lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + cfg.eps);
  }
}

void Mlp::ce_step(const Eigen::MatrixXd& x, const std::vector<int>& y, const AdamConfig& cfg) {
  Eigen::MatrixXd d = softmax(x);
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  d /= static_cast<double>(d.rows());
  adam_apply(backward(x, d), cfg);
}

void Mlp::mse_step(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, const AdamConfig& cfg) {
  Eigen::MatrixXd out = logits(x);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(out.rows(), out.cols());
  d.col(0) = 2.0 * (out.col(0) - t) / static_cast<double>(t.size());
  adam_apply(backward(x, d), cfg);
}

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l)
    n += static_cast<int>(w_[l].size() + b_[l].size());
  return n;
}

double Mlp::param(int i) const {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if (i < w_[l].size()) return w_[l].data()[i];
    i -= static_cast<int>(w_[l].size());
    if (i < b_[l].size()) return b_[l](i);
    i -= static_cast<int>(b_[l].size());
  }
  throw UsageError("mlp: parameter index out of range");
}

void Mlp::set_param(int i, double v) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if (i < w_[l].size()) {
      w_[l].data()[i] = v;
      return;
    }
    i -= static_cast<int>(w_[l].size());
    if (i < b_[l].size()) {
      b_[l](i) = v;
      return;
    }
    i -= static_cast<int>(b_[l].size());
  }
  throw UsageError("mlp: parameter index out of range");
}

namespace {
std::vector<double> flatten(const Mlp::Grads& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.w.size(); ++l) {
    out.insert(out.end(), g.w[l].data(), g.w[l].data() + g.w[l].size());
    out.insert(out.end(), g.b[l].data(), g.b[l].data() + g.b[l].size());
  }
  return out;
}
}  // namespace

std::vector<double> Mlp::ce_grad(const Eigen::MatrixXd& x, const std::vector<int>& y) const {
  Eigen::MatrixXd d = softmax(x);
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  d /= static_cast<double>(d.rows());
  return flatten(backward(x, d));
}

std::vector<double> Mlp::mse_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const {
  Eigen::MatrixXd out = logits(x);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(out.rows(), out.cols());
  d.col(0) = 2.0 * (out.col(0) - t) / static_cast<double>(t.size());
  return flatten(backward(x, d));
}

void Mlp::save(std::ostream& out) const {
  out << "rdc-net 1\n";
  out << "dims";
  for (int d : dims_) out << ' ' << d;
  out << '\n' << "step " << step_ << '\n';
  out.precision(17);
  auto dump = [&out](const auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out << m.data()[i] << '\n';
  };
  for (std::size_t l = 0; l < w_.size(); ++l) {
    dump(w_[l]);
    dump(b_[l]);
    dump(mw_[l]);
    dump(vw_[l]);
    dump(mb_[l]);
    dump(vb_[l]);
  }
}

Mlp Mlp::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "rdc-net" || version != 1) throw ConfigError("mlp load: bad header");
  std::string tag;
  in >> tag;
  if (tag != "dims") throw ConfigError("mlp load: missing dims");
  Mlp net;
  std::string line;
  std::getline(in, line);
  {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      std::size_t end = line.find(' ', pos);
      net.dims_.push_back(std::stoi(line.substr(pos, end - pos)));
      pos = (end == std::string::npos) ? line.size() : end;
    }
  }
  if (net.dims_.size() < 2) throw ConfigError("mlp load: bad dims");
  in >> tag >> net.step_;
  if (tag != "step") throw ConfigError("mlp load: missing step");
  auto read = [&in](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!(in >> m.data()[i])) throw ConfigError("mlp load: truncated parameter block");
    }
  };
  for (std::size_t l = 0; l + 1 < net.dims_.size(); ++l) {
    int fi = net.dims_[l], fo = net.dims_[l + 1];
    net.w_.emplace_back(fi, fo);
    net.b_.emplace_back(fo);
    net.mw_.emplace_back(fi, fo);
    net.vw_.emplace_back(fi, fo);
    net.mb_.emplace_back(fo);
    net.vb_.emplace_back(fo);
    read(net.w_[l]);
    read(net.b_[l]);
    read(net.mw_[l]);
    read(net.vw_[l]);
    read(net.mb_[l]);
    read(net.vb_[l]);
  }
  return net;
}

}  // namespace rdc
