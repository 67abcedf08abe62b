#pragma once

#include "budgetrl/tagparse.hpp"

namespace budgetrl::rewards {

enum class LengthShape { kTriangular, kBand };

// Weights and shape parameters of the three-part completion reward.
struct RewardConfig {
  double lambda_c = 0.6;   // weight on correctness
  double lambda_l = 0.3;   // weight on length adherence
  double lambda_f = 0.1;   // weight on formatting
  double r_cor = 1.0;      // base correctness reward
  double r_max = 1.0;      // peak length reward
  double alpha_think = 0.5;
  double alpha_answer = 0.5;
  LengthShape length_shape = LengthShape::kTriangular;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

// Raw (unweighted) components plus the weighted total for one completion.
struct RewardBreakdown {
  double correct_component = 0.0;  // r_cor * c
  double length_component = 0.0;   // R_len(len)
  double format_component = 0.0;   // alpha-weighted indicators
  double total = 0.0;
};

// Real-valued length reward core, shared by both shapes; exposed so boundary
// behaviour can be probed at non-integer lengths.
double length_reward_shape(double len, double budget, double r_max,
                           LengthShape shape);

// Ramp up to r_max at len == budget, ramp down to zero at 2*budget, zero
// beyond. budget < 1 is a contract violation (throws).
double length_reward_triangular(long long len, long long budget, double r_max);

// Flat at r_max for len <= budget, then the same down-ramp and cutoff.
double length_reward_band(long long len, long long budget, double r_max);

double format_reward(const tagparse::ParsedCompletion& pc,
                     const RewardConfig& cfg);

RewardBreakdown total_reward(int correct, long long len, long long budget,
                             const tagparse::ParsedCompletion& pc,
                             const RewardConfig& cfg);

}  // namespace budgetrl::rewards
