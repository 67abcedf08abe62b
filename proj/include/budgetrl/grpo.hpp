#pragma once

#include <span>
#include <vector>

#include "budgetrl/env.hpp"
#include "budgetrl/policy.hpp"
#include "budgetrl/rewards.hpp"
#include "budgetrl/rng.hpp"

namespace budgetrl::grpo {

struct GrpoConfig {
  int group_size = 8;          // G
  double clip_eps = 0.2;       // clipping window epsilon
  double kl_beta = 0.02;       // reference-KL weight beta
  double eps_stab = 1e-8;      // variance stabilizer inside the sqrt
  double learning_rate = 5e-3; // ascent step size eta
  int old_policy_refresh = 1;  // steps between sampling-policy snapshots

  void validate() const;  // throws std::invalid_argument
};

// One prompt's sampled group: G trajectories with their rewards and
// group-normalized advantages, plus the budget in force when they were drawn.
struct GroupRollout {
  env::ArithmeticTask task;
  policy::GenContext ctx;
  std::vector<policy::Trajectory> trajectories;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<int> correct;
  std::vector<rewards::RewardBreakdown> breakdowns;
  int budget_at_sampling = 1;
};

// A_i = (r_i - mean) / sqrt(population variance + eps_stab).
std::vector<double> group_advantages(std::span<const double> rewards,
                                     double eps_stab);

// (1/G) sum_i min(ratio_i * A_i, clip(ratio_i, 1-eps, 1+eps) * A_i).
double clipped_surrogate(std::span<const double> ratios,
                         std::span<const double> advantages, double clip_eps);

// Samples a group of cfg.group_size completions per task under theta_old
// (max_len = 2 * budget), scores them with the three-part reward at the
// given budget, and normalizes advantages within each group.
std::vector<GroupRollout> sample_rollouts(
    const policy::PolicyModel& model, const policy::PolicyParams& theta_old,
    std::span<const env::ArithmeticTask> tasks, const GrpoConfig& cfg,
    const rewards::RewardConfig& reward_cfg, int budget, Rng& rng);

struct ObjectiveParts {
  double surrogate = 0.0;  // mean over groups of the clipped term
  double kl = 0.0;         // mean token-level KL(theta || ref) over states
  double total = 0.0;      // surrogate - beta * kl
};

// Re-evaluates the objective at theta on fixed rollouts; ratios use each
// trajectory's recorded logprob_old. States for the KL term are every
// next-token decision point of every trajectory.
ObjectiveParts surrogate_objective(const policy::PolicyModel& model,
                                   const policy::PolicyParams& theta,
                                   const policy::PolicyParams& theta_ref,
                                   std::span<const GroupRollout> groups,
                                   const GrpoConfig& cfg);

// Exact ascent gradient of surrogate_objective at theta. Clipped-out terms
// contribute zero, matching the min's active branch.
std::vector<double> surrogate_gradient(const policy::PolicyModel& model,
                                       const policy::PolicyParams& theta,
                                       const policy::PolicyParams& theta_ref,
                                       std::span<const GroupRollout> groups,
                                       const GrpoConfig& cfg);

struct StepStats {
  double mean_reward = 0.0;
  double accuracy = 0.0;
  double mean_length = 0.0;
  double kl = 0.0;
  double objective = 0.0;
  int degenerate_groups = 0;  // groups whose advantages were all zero
};

// One GRPO update: sample under theta_old, score, normalize, take a single
// gradient-ascent step on theta. Stats are measured at the pre-update theta.
// Groups with all-zero advantages contribute only the KL term.
StepStats grpo_step(const policy::PolicyModel& model,
                    policy::PolicyParams& theta,
                    const policy::PolicyParams& theta_old,
                    const policy::PolicyParams& theta_ref,
                    std::span<const env::ArithmeticTask> tasks,
                    const GrpoConfig& cfg,
                    const rewards::RewardConfig& reward_cfg, int budget,
                    Rng& rng);

// Flattens every next-token decision point of every trajectory in the
// rollouts into KL states.
std::vector<policy::StateRef> collect_states(
    std::span<const GroupRollout> groups);

}  // namespace budgetrl::grpo
