#include "rdc/gdrc.hpp"

#include <algorithm>
#include <cmath>

#include "rdc/errors.hpp"

namespace rdc {

std::vector<int> votes_literal(const std::vector<int>& candidates, const std::vector<double>& h) {
  // dH_i = H_i - H_{i-1}; a vote for candidate i-1 fires when dH_i > dH_{i-1}.
  std::vector<int> votes;
  for (std::size_t i = 2; i < candidates.size(); ++i) {
    double dh = h[i] - h[i - 1];
    double dh_prev = h[i - 1] - h[i - 2];
    if (dh > dh_prev) votes.push_back(candidates[i - 1]);
  }
  return votes;
}

std::vector<int> votes_knee(const std::vector<int>& candidates, const std::vector<double>& h,
                            double tau) {
  // One vote per epoch: the candidate right before the first dH that drops
  // below tau * max(dH), i.e. where cross-entropy stops growing.
  if (candidates.size() < 2) return {};
  double max_dh = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < candidates.size(); ++i) max_dh = std::max(max_dh, h[i] - h[i - 1]);
  if (!(max_dh > 0.0)) return {};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (h[i] - h[i - 1] < tau * max_dh) return {candidates[i - 1]};
  }
  return {};
}

CriticEnsemble::CriticEnsemble(EnsembleConfig cfg, const CriticFactory& make)
    : cfg_(std::move(cfg)), sketch_(cfg_.sketch_alpha) {
  if (cfg_.candidates.empty()) throw ConfigError("ensemble: candidate set is empty");
  for (std::size_t i = 0; i + 1 < cfg_.candidates.size(); ++i) {
    if (cfg_.candidates[i] >= cfg_.candidates[i + 1])
      throw ConfigError("ensemble: candidates must be strictly increasing");
  }
  if (cfg_.candidates.front() < 1) throw ConfigError("ensemble: candidates must be positive");
  if (cfg_.known_range && !(cfg_.r_min < cfg_.r_max))
    throw ConfigError("ensemble: known range is empty");
  for (int n : cfg_.candidates) {
    critics_.push_back(make(n));
    tally_[n] = 0.0;
  }
  r_emin_ = cfg_.r_min;
  r_emax_ = cfg_.r_max;
}

VoteRecord CriticEnsemble::train_epoch(const std::vector<Sample>& samples) {
  if (samples.empty()) throw UsageError("ensemble: empty epoch batch");
  if (!cfg_.known_range) {
    for (const auto& s : samples) sketch_.insert(s.r_tilde);
    r_emin_ = sketch_.quantile(cfg_.quantile_lo);
    r_emax_ = sketch_.quantile(cfg_.quantile_hi);
    if (!(r_emin_ < r_emax_)) {
      // degenerate stream; widen so labels stay defined
      double pad = std::max(1e-9, 1e-9 * std::abs(r_emin_));
      r_emax_ = r_emin_ + pad;
    }
  }

  VoteRecord rec;
  rec.epoch = epoch_;
  rec.r_emin = r_emin_;
  rec.r_emax = r_emax_;

  std::vector<double> h(cfg_.candidates.size());
  std::vector<int> labels(samples.size());
  for (std::size_t ci = 0; ci < cfg_.candidates.size(); ++ci) {
    Discretization disc(r_emin_, r_emax_, cfg_.candidates[ci]);
    for (std::size_t i = 0; i < samples.size(); ++i)
      labels[i] = reward_label(disc, samples[i].r_tilde).label;
    h[ci] = critics_[ci]->train(samples, labels);
    rec.h_values.emplace_back(cfg_.candidates[ci], h[ci]);
    if (ci > 0) rec.dh_values.emplace_back(cfg_.candidates[ci], h[ci] - h[ci - 1]);
  }

  for (auto& [cand, t] : tally_) t *= cfg_.vote_discount;
  rec.voted_for = cfg_.rule == VoteRule::literal
                      ? votes_literal(cfg_.candidates, h)
                      : votes_knee(cfg_.candidates, h, cfg_.knee_tau);
  for (int cand : rec.voted_for) tally_[cand] += 1.0;

  ++epoch_;
  if (epoch_ == cfg_.t_vote && frozen_winner_ < 0) {
    frozen_winner_ = select_winner();
  }
  rec.winner = select_winner();
  return rec;
}

int CriticEnsemble::select_winner() const {
  if (frozen_winner_ >= 0 && epoch_ >= cfg_.t_vote) return frozen_winner_;
  int best = cfg_.candidates.front();
  double best_votes = tally_.at(best);
  for (int cand : cfg_.candidates) {
    if (tally_.at(cand) > best_votes) {
      best = cand;
      best_votes = tally_.at(cand);
    }
  }
  return best;
}

Discretization CriticEnsemble::winner_disc() const {
  return {r_emin_, r_emax_, select_winner()};
}

const DistributionalCritic& CriticEnsemble::member(int candidate) const {
  for (std::size_t i = 0; i < cfg_.candidates.size(); ++i) {
    if (cfg_.candidates[i] == candidate) return *critics_[i];
  }
  throw UsageError("ensemble: unknown candidate");
}

double CriticEnsemble::correct(const Sample& s) const {
  Discretization disc = winner_disc();
  auto pred = member(select_winner()).predict(s);
  if (pred.unseen) return s.r_tilde;  // no evidence for this key: leave as observed
  return correct_reward(disc, s.r_tilde, pred.probs);
}

}  // namespace rdc
