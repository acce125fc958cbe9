#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "rdc/critic.hpp"
#include "rdc/sketch.hpp"

namespace rdc {

enum class VoteRule {
  literal,  // cast a vote for n' whenever dH_n > dH_n'
  knee,     // vote for the candidate before the first dH below tau * max(dH)
};

struct EnsembleConfig {
  std::vector<int> candidates = {2, 4, 6, 8, 10, 12, 16, 20, 24, 32};
  double vote_discount = 0.9;
  int t_vote = std::numeric_limits<int>::max();  // voting never frozen by default
  VoteRule rule = VoteRule::literal;
  double knee_tau = 0.2;
  double sketch_alpha = 0.01;
  double quantile_lo = 0.05;
  double quantile_hi = 0.95;
  bool known_range = false;
  double r_min = 0.0;  // used when known_range
  double r_max = 1.0;
};

struct VoteRecord {
  int epoch = 0;
  std::vector<std::pair<int, double>> h_values;   // (candidate, H)
  std::vector<std::pair<int, double>> dh_values;  // (candidate, dH); smallest candidate has none
  std::vector<int> voted_for;
  int winner = 0;  // selected after the tally update
  double r_emin = 0.0;
  double r_emax = 0.0;
};

/// Votes fired by one epoch's cross-entropy profile; h aligns with candidates.
std::vector<int> votes_literal(const std::vector<int>& candidates, const std::vector<double>& h);
std::vector<int> votes_knee(const std::vector<int>& candidates, const std::vector<double>& h,
                            double tau);

/// Ensemble of distributional critics over candidate interval counts, with
/// differential-cross-entropy voting and streaming range estimation.
class CriticEnsemble {
 public:
  using CriticFactory = std::function<std::unique_ptr<DistributionalCritic>(int n_outputs)>;

  CriticEnsemble(EnsembleConfig cfg, const CriticFactory& make);

  /// One epoch: refresh the range estimate, relabel, train every member,
  /// discount the tally, cast votes.
  VoteRecord train_epoch(const std::vector<Sample>& samples);

  /// Candidate with the highest tally; ties and the all-zero tally resolve
  /// to the smaller candidate. Frozen once the epoch count passes t_vote.
  int select_winner() const;

  /// Correct one sample's reward with the winning critic.
  double correct(const Sample& s) const;

  Discretization winner_disc() const;
  std::pair<double, double> range() const { return {r_emin_, r_emax_}; }
  const std::map<int, double>& tally() const { return tally_; }
  int epoch() const { return epoch_; }
  const EnsembleConfig& config() const { return cfg_; }
  const DistributionalCritic& member(int candidate) const;

 private:
  EnsembleConfig cfg_;
  std::vector<std::unique_ptr<DistributionalCritic>> critics_;
  std::map<int, double> tally_;
  PercentileSketch sketch_;
  double r_emin_;
  double r_emax_;
  int epoch_ = 0;
  int frozen_winner_ = -1;
};

}  // namespace rdc
