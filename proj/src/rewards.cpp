#include "budgetrl/rewards.hpp"

#include <stdexcept>

namespace budgetrl::rewards {

void RewardConfig::validate() const {
  if (lambda_c < 0 || lambda_l < 0 || lambda_f < 0) {
    throw std::invalid_argument("reward weights must be nonnegative");
  }
  if (r_cor <= 0 || r_max <= 0) {
    throw std::invalid_argument("r_cor and r_max must be positive");
  }
  if (alpha_think <= 0 || alpha_answer <= 0) {
    throw std::invalid_argument("alpha_think and alpha_answer must be positive");
  }
}

double length_reward_shape(double len, double budget, double r_max,
                           LengthShape shape) {
  if (budget < 1.0) {
    throw std::invalid_argument("length reward needs budget >= 1");
  }
  if (len < 0.0) {
    throw std::invalid_argument("length reward needs len >= 0");
  }
  if (len <= budget) {
    return shape == LengthShape::kBand ? r_max : r_max * (len / budget);
  }
  if (len <= 2.0 * budget) {
    return r_max * (1.0 - (len - budget) / budget);
  }
  return 0.0;
}

double length_reward_triangular(long long len, long long budget, double r_max) {
  return length_reward_shape(static_cast<double>(len),
                             static_cast<double>(budget), r_max,
                             LengthShape::kTriangular);
}

double length_reward_band(long long len, long long budget, double r_max) {
  return length_reward_shape(static_cast<double>(len),
                             static_cast<double>(budget), r_max,
                             LengthShape::kBand);
}

double format_reward(const tagparse::ParsedCompletion& pc,
                     const RewardConfig& cfg) {
  return cfg.alpha_think * (pc.has_think ? 1.0 : 0.0) +
         cfg.alpha_answer * (pc.has_answer ? 1.0 : 0.0);
}

RewardBreakdown total_reward(int correct, long long len, long long budget,
                             const tagparse::ParsedCompletion& pc,
                             const RewardConfig& cfg) {
  RewardBreakdown out;
  out.correct_component = cfg.r_cor * static_cast<double>(correct);
  out.length_component = length_reward_shape(static_cast<double>(len),
                                             static_cast<double>(budget),
                                             cfg.r_max, cfg.length_shape);
  out.format_component = format_reward(pc, cfg);
  out.total = cfg.lambda_c * out.correct_component +
              cfg.lambda_l * out.length_component +
              cfg.lambda_f * out.format_component;
  return out;
}

}  // namespace budgetrl::rewards
