#include "rdc/agent.hpp"

#include <algorithm>
#include <cmath>

#include "rdc/errors.hpp"

namespace rdc {

// --- pipeline -------------------------------------------------------------

RewardPipeline RewardPipeline::raw() {
  RewardPipeline p;
  p.kind_ = Kind::raw;
  return p;
}

RewardPipeline RewardPipeline::re(std::unique_ptr<RegressionCritic> critic) {
  RewardPipeline p;
  p.kind_ = Kind::re;
  p.re_ = std::move(critic);
  return p;
}

RewardPipeline RewardPipeline::sr_w(SurrogateTable table) {
  RewardPipeline p;
  p.kind_ = Kind::sr_w;
  p.sr_ = std::move(table);
  return p;
}

RewardPipeline RewardPipeline::drc(std::unique_ptr<DistributionalCritic> critic,
                                   Discretization disc_o) {
  RewardPipeline p;
  p.kind_ = Kind::drc;
  p.drc_ = std::move(critic);
  p.drc_disc_ = disc_o;
  return p;
}

RewardPipeline RewardPipeline::gdrc(std::unique_ptr<CriticEnsemble> ensemble) {
  RewardPipeline p;
  p.kind_ = Kind::gdrc;
  p.ensemble_ = std::move(ensemble);
  return p;
}

std::string RewardPipeline::kind_name(Kind k) {
  switch (k) {
    case Kind::raw: return "raw";
    case Kind::re: return "re";
    case Kind::sr_w: return "sr_w";
    case Kind::drc: return "drc";
    case Kind::gdrc: return "gdrc";
  }
  return "?";
}

const VoteRecord* RewardPipeline::last_vote_record() const {
  return last_record_ ? &*last_record_ : nullptr;
}

std::vector<double> RewardPipeline::process(const std::vector<Sample>& batch) {
  audit::CriticScope scope;
  std::vector<double> corrected;
  corrected.reserve(batch.size());
  switch (kind_) {
    case Kind::raw: {
      for (const auto& s : batch) corrected.push_back(s.r_tilde);
      break;
    }
    case Kind::re: {
      last_loss_ = re_->train(batch);
      for (const auto& s : batch) corrected.push_back(re_->predict(s));
      break;
    }
    case Kind::sr_w: {
      for (const auto& s : batch) {
        if (reward_label(sr_->disc, s.r_tilde).clamped) ++clamps_;
        corrected.push_back(sr_correct(*sr_, s.r_tilde));
      }
      break;
    }
    case Kind::drc: {
      std::vector<int> labels(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        auto lab = reward_label(drc_disc_, batch[i].r_tilde);
        if (lab.clamped) ++clamps_;
        labels[i] = lab.label;
      }
      last_loss_ = drc_->train(batch, labels);
      for (const auto& s : batch) {
        auto pred = drc_->predict(s);
        corrected.push_back(pred.unseen ? s.r_tilde
                                        : correct_reward(drc_disc_, s.r_tilde, pred.probs));
      }
      break;
    }
    case Kind::gdrc: {
      last_record_ = ensemble_->train_epoch(batch);
      double h_win = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [cand, h] : last_record_->h_values)
        if (cand == last_record_->winner) h_win = h;
      last_loss_ = h_win;
      Discretization disc = ensemble_->winner_disc();
      for (const auto& s : batch) {
        if (reward_label(disc, s.r_tilde).clamped) ++clamps_;
        corrected.push_back(ensemble_->correct(s));
      }
      break;
    }
  }
  return corrected;
}

// --- Q-learning -----------------------------------------------------------

int QTable::greedy(int s) const {
  int best = 0;
  for (int a = 1; a < n_actions; ++a)
    if (at(s, a) > at(s, best)) best = a;
  return best;
}

double QTable::max_q(int s) const {
  double m = at(s, 0);
  for (int a = 1; a < n_actions; ++a) m = std::max(m, at(s, a));
  return m;
}

EvalResult evaluate_policy(const GridWorld& env, const QTable& q, int episodes, Rng& rng) {
  double sum = 0.0, sum_sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    int state = env.reset(rng);
    double ret = 0.0;
    Rng clean_noise(0);  // unused by the hidden lane; keeps step() signature uniform
    for (int t = 0; t < env.spec().step_limit; ++t) {
      auto tr = env.step(state, q.greedy(state), rng, clean_noise);
      ret += true_reward(tr);
      state = tr.next_state;
      if (tr.done) break;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  EvalResult res;
  res.episodes = episodes;
  res.mean = sum / episodes;
  if (episodes > 1) {
    double var = (sum_sq - sum * sum / episodes) / (episodes - 1);
    res.stderr_ = std::sqrt(std::max(0.0, var) / episodes);
  }
  return res;
}

std::vector<CurveRow> q_learning_train(const GridWorld& env, RewardPipeline& pipe,
                                       const QConfig& cfg, QTable& q, std::uint64_t seed) {
  Rng explore = Rng::stream(seed, "explore");
  Rng env_rng = Rng::stream(seed, "env");
  Rng noise_rng = Rng::stream(seed, "noise");
  Rng eval_rng = Rng::stream(seed, "eval");

  q = QTable(env.spec().cell_count(), env.n_actions());
  std::vector<Sample> batch, history;
  std::vector<GridTransition> transitions, history_tr;
  std::vector<CurveRow> curve;

  int state = env.reset(env_rng);
  int ep_steps = 0;
  long episode = 0;
  double last_mse = 0.0, last_mae = 0.0;

  for (long t = 0; t < cfg.steps; ++t) {
    double frac = std::min(1.0, static_cast<double>(t) / (0.5 * static_cast<double>(cfg.steps)));
    double eps = cfg.eps_hi + (cfg.eps_lo - cfg.eps_hi) * frac;
    int action = explore.uniform01() < eps ? explore.uniform_int(env.n_actions())
                                           : q.greedy(state);
    auto tr = env.step(state, action, env_rng, noise_rng);
    batch.push_back({{static_cast<double>(tr.state)}, tr.action, tr.r_observed});
    transitions.push_back(tr);

    ++ep_steps;
    if (tr.done || ep_steps >= env.spec().step_limit) {
      state = env.reset(env_rng);
      ep_steps = 0;
      ++episode;
    } else {
      state = tr.next_state;
    }

    if (static_cast<int>(batch.size()) >= cfg.cadence) {
      std::vector<double> corrected;
      const std::vector<GridTransition>* tds = &transitions;
      if (cfg.train_on_history) {
        history.insert(history.end(), batch.begin(), batch.end());
        history_tr.insert(history_tr.end(), transitions.begin(), transitions.end());
        corrected = pipe.process(history);
        corrected.erase(corrected.begin(),
                        corrected.begin() + static_cast<long>(history.size() - batch.size()));
        tds = &transitions;
      } else {
        corrected = pipe.process(batch);
      }
      double mse = 0.0, mae = 0.0;
      for (std::size_t i = 0; i < tds->size(); ++i) {
        const auto& x = (*tds)[i];
        q.at(x.state, x.action) +=
            cfg.lr * (corrected[i] + (x.done ? 0.0 : cfg.gamma * q.max_q(x.next_state)) -
                      q.at(x.state, x.action));
        double d = corrected[i] - true_reward(x);  // evaluation lane
        mse += d * d;
        mae += std::abs(d);
      }
      last_mse = mse / static_cast<double>(tds->size());
      last_mae = mae / static_cast<double>(tds->size());
      batch.clear();
      transitions.clear();
    }

    if ((t + 1) % cfg.eval_every == 0) {
      auto eval = evaluate_policy(env, q, cfg.eval_episodes, eval_rng);
      curve.push_back({t + 1, episode, eval.mean, last_mse, last_mae, pipe.last_loss(),
                       pipe.kind() == RewardPipeline::Kind::gdrc && pipe.last_vote_record()
                           ? pipe.last_vote_record()->winner
                           : 0,
                       pipe.clamp_count()});
    }
  }
  return curve;
}

// --- bandit policy gradient ---------------------------------------------------

std::vector<double> SoftmaxPolicy::probs() const {
  double m = *std::max_element(w.begin(), w.end());
  std::vector<double> p(w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    p[i] = std::exp(w[i] - m);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

int SoftmaxPolicy::sample(Rng& rng) const {
  auto p = probs();
  return rng.categorical(p);
}

int SoftmaxPolicy::greedy() const {
  return static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
}

std::vector<PgCurveRow> bandit_pg_train(const ContextBandit& env, RewardPipeline& pipe,
                                        const PgConfig& cfg, SoftmaxPolicy& policy,
                                        std::uint64_t seed) {
  Rng ctx_rng = Rng::stream(seed, "env");
  Rng arm_rng = Rng::stream(seed, "explore");
  Rng noise_rng = Rng::stream(seed, "noise");

  const int K = env.spec().n_arms();
  policy = SoftmaxPolicy(K);
  double best_mean = env.arm_mean(env.best_arm());
  int best = env.best_arm();

  std::vector<Sample> batch;
  std::vector<BanditRound> rounds;
  std::vector<PgCurveRow> curve;
  double baseline = 0.0;
  bool baseline_init = false;
  double regret_acc = 0.0;
  long regret_n = 0;
  double last_mse = 0.0;

  for (long t = 0; t < cfg.rounds; ++t) {
    auto ctx = env.draw_context(ctx_rng);
    int arm = policy.sample(arm_rng);
    auto round = env.pull(ctx, arm, noise_rng);
    batch.push_back({ctx, arm, round.r_observed});
    rounds.push_back(round);
    regret_acc += best_mean - true_reward(round);  // evaluation lane
    ++regret_n;

    if (static_cast<int>(batch.size()) >= cfg.cadence) {
      auto corrected = pipe.process(batch);
      double mse = 0.0;
      for (std::size_t i = 0; i < rounds.size(); ++i) {
        double rh = corrected[i];
        if (!baseline_init) {
          baseline = rh;
          baseline_init = true;
        }
        auto p = policy.probs();
        int a = rounds[i].arm;
        for (int j = 0; j < K; ++j) {
          double indicator = j == a ? 1.0 : 0.0;
          policy.w[static_cast<std::size_t>(j)] += cfg.eta * (rh - baseline) * (indicator - p[static_cast<std::size_t>(j)]);
        }
        baseline += cfg.baseline_beta * (rh - baseline);
        double d = rh - true_reward(rounds[i]);
        mse += d * d;
      }
      last_mse = mse / static_cast<double>(rounds.size());
      batch.clear();
      rounds.clear();
    }

    if ((t + 1) % cfg.eval_every == 0) {
      auto p = policy.probs();
      curve.push_back({t + 1, regret_acc / static_cast<double>(regret_n),
                       p[static_cast<std::size_t>(best)], policy.greedy(), last_mse,
                       pipe.last_loss()});
      regret_acc = 0.0;
      regret_n = 0;
    }
  }
  return curve;
}

}  // namespace rdc
