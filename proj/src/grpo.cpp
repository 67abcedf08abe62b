#include "budgetrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace budgetrl::grpo {

void GrpoConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("grpo: group_size must be >= 2");
  if (clip_eps <= 0) throw std::invalid_argument("grpo: clip_eps must be > 0");
  if (kl_beta < 0) throw std::invalid_argument("grpo: kl_beta must be >= 0");
  if (eps_stab <= 0) throw std::invalid_argument("grpo: eps_stab must be > 0");
  if (learning_rate <= 0) {
    throw std::invalid_argument("grpo: learning_rate must be > 0");
  }
  if (old_policy_refresh < 1) {
    throw std::invalid_argument("grpo: old_policy_refresh must be >= 1");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards,
                                     double eps_stab) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("advantages need a group of >= 2");
  // An exactly constant group has zero advantages by definition; computing
  // it through the formula would amplify mean-rounding noise once the
  // stabilizer is small.
  bool constant = true;
  for (double r : rewards) constant = constant && r == rewards[0];
  if (constant) return std::vector<double>(g, 0.0);
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double sigma = std::sqrt(var + eps_stab);
  std::vector<double> adv(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double centered = rewards[i] - mean;
    adv[i] = centered == 0.0 ? 0.0 : centered / sigma;
  }
  return adv;
}

double clipped_surrogate(std::span<const double> ratios,
                         std::span<const double> advantages, double clip_eps) {
  if (ratios.size() != advantages.size() || ratios.empty()) {
    throw std::invalid_argument("ratio/advantage size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double clipped =
        std::clamp(ratios[i], 1.0 - clip_eps, 1.0 + clip_eps);
    sum += std::min(ratios[i] * advantages[i], clipped * advantages[i]);
  }
  return sum / static_cast<double>(ratios.size());
}

std::vector<GroupRollout> sample_rollouts(
    const policy::PolicyModel& model, const policy::PolicyParams& theta_old,
    std::span<const env::ArithmeticTask> tasks, const GrpoConfig& cfg,
    const rewards::RewardConfig& reward_cfg, int budget, Rng& rng) {
  if (budget < 1) throw std::invalid_argument("rollout budget must be >= 1");
  std::vector<GroupRollout> groups;
  groups.reserve(tasks.size());
  for (const auto& task : tasks) {
    GroupRollout group;
    group.task = task;
    group.ctx = env::make_context(task, budget);
    group.budget_at_sampling = budget;
    group.trajectories.reserve(cfg.group_size);
    for (int i = 0; i < cfg.group_size; ++i) {
      policy::Trajectory traj = policy::sample(model, theta_old, group.ctx, rng);
      const std::string text = model.vocab().detokenize(traj.tokens);
      const auto pc = tagparse::parse_completion(text);
      const int c = env::evaluate_parsed(pc, task);
      const auto breakdown = rewards::total_reward(
          c, traj.length(), budget, pc, reward_cfg);
      group.rewards.push_back(breakdown.total);
      group.correct.push_back(c);
      group.breakdowns.push_back(breakdown);
      group.trajectories.push_back(std::move(traj));
    }
    group.advantages = group_advantages(group.rewards, cfg.eps_stab);
    groups.push_back(std::move(group));
  }
  return groups;
}

std::vector<policy::StateRef> collect_states(
    std::span<const GroupRollout> groups) {
  std::vector<policy::StateRef> states;
  for (const auto& group : groups) {
    for (const auto& traj : group.trajectories) {
      const std::span<const int> tokens(traj.tokens);
      for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
        states.push_back(policy::StateRef{&traj.ctx, tokens.subspan(0, t)});
      }
    }
  }
  return states;
}

ObjectiveParts surrogate_objective(const policy::PolicyModel& model,
                                   const policy::PolicyParams& theta,
                                   const policy::PolicyParams& theta_ref,
                                   std::span<const GroupRollout> groups,
                                   const GrpoConfig& cfg) {
  if (groups.empty()) throw std::invalid_argument("objective needs >= 1 group");
  ObjectiveParts parts;
  std::vector<double> ratios;
  for (const auto& group : groups) {
    ratios.clear();
    for (const auto& traj : group.trajectories) {
      const double lp = policy::logprob(model, theta, traj.ctx, traj.tokens);
      ratios.push_back(std::exp(lp - traj.logprob_old));
    }
    parts.surrogate +=
        clipped_surrogate(ratios, group.advantages, cfg.clip_eps);
  }
  parts.surrogate /= static_cast<double>(groups.size());

  const auto states = collect_states(groups);
  parts.kl = states.empty()
                 ? 0.0
                 : policy::kl_reference(model, theta, theta_ref, states);
  parts.total = parts.surrogate - cfg.kl_beta * parts.kl;
  return parts;
}

std::vector<double> surrogate_gradient(const policy::PolicyModel& model,
                                       const policy::PolicyParams& theta,
                                       const policy::PolicyParams& theta_ref,
                                       std::span<const GroupRollout> groups,
                                       const GrpoConfig& cfg) {
  if (groups.empty()) throw std::invalid_argument("gradient needs >= 1 group");
  std::vector<double> grad(model.param_count(), 0.0);
  const double group_norm = 1.0 / static_cast<double>(groups.size());
  for (const auto& group : groups) {
    const double norm =
        group_norm / static_cast<double>(group.trajectories.size());
    for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
      const auto& traj = group.trajectories[i];
      const double advantage = group.advantages[i];
      if (advantage == 0.0) continue;
      const double lp = policy::logprob(model, theta, traj.ctx, traj.tokens);
      const double ratio = std::exp(lp - traj.logprob_old);
      const double clipped =
          std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
      // min picks the unclipped branch (or both agree): derivative is
      // advantage * ratio * grad log pi. Otherwise the clip is saturated and
      // the term is constant in theta.
      if (ratio * advantage <= clipped * advantage) {
        policy::add_grad_logprob(model, theta, traj.ctx, traj.tokens,
                                 norm * advantage * ratio, grad);
      }
    }
  }
  if (cfg.kl_beta != 0.0) {
    const auto states = collect_states(groups);
    if (!states.empty()) {
      policy::add_kl_gradient(model, theta, theta_ref, states, -cfg.kl_beta,
                              grad);
    }
  }
  return grad;
}

StepStats grpo_step(const policy::PolicyModel& model,
                    policy::PolicyParams& theta,
                    const policy::PolicyParams& theta_old,
                    const policy::PolicyParams& theta_ref,
                    std::span<const env::ArithmeticTask> tasks,
                    const GrpoConfig& cfg,
                    const rewards::RewardConfig& reward_cfg, int budget,
                    Rng& rng) {
  cfg.validate();
  reward_cfg.validate();
  if (tasks.empty()) throw std::invalid_argument("grpo_step needs >= 1 task");

  const auto groups =
      sample_rollouts(model, theta_old, tasks, cfg, reward_cfg, budget, rng);

  StepStats stats;
  long long n = 0;
  for (const auto& group : groups) {
    bool degenerate = true;
    for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
      stats.mean_reward += group.rewards[i];
      stats.accuracy += group.correct[i];
      stats.mean_length += static_cast<double>(group.trajectories[i].length());
      if (group.advantages[i] != 0.0) degenerate = false;
      ++n;
    }
    if (degenerate) ++stats.degenerate_groups;
  }
  stats.mean_reward /= static_cast<double>(n);
  stats.accuracy /= static_cast<double>(n);
  stats.mean_length /= static_cast<double>(n);

  const auto parts = surrogate_objective(model, theta, theta_ref, groups, cfg);
  stats.kl = parts.kl;
  stats.objective = parts.total;

  const auto grad = surrogate_gradient(model, theta, theta_ref, groups, cfg);
  for (std::size_t i = 0; i < theta.weights.size(); ++i) {
    theta.weights[i] += cfg.learning_rate * grad[i];
  }
  return stats;
}

}  // namespace budgetrl::grpo
