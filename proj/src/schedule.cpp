#include "budgetrl/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace budgetrl::schedule {

namespace {

// Nearest integer, ties away from zero is never hit here (budgets are
// positive); ties round up.
int round_half_up(double x) {
  return static_cast<int>(std::floor(x + 0.5));
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_step(long long t) {
  require(t >= 0, "schedule step must be >= 0");
}

}  // namespace

void validate(const BudgetSchedule& sched) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          require(s.b0 >= 1, "exponential: b0 must be >= 1");
          require(s.gamma > 0.0 && s.gamma < 1.0,
                  "exponential: gamma must be in (0,1)");
          require(s.interval >= 1, "exponential: interval must be >= 1");
        } else if constexpr (std::is_same_v<T, StepwiseExponential>) {
          require(s.sf >= 1 && s.sf <= s.s0, "stepwise: need 1 <= sf <= s0");
          require(s.n >= 1, "stepwise: n must be >= 1");
          require(s.total_steps >= 1, "stepwise: total_steps must be >= 1");
        } else if constexpr (std::is_same_v<T, Linear>) {
          require(s.sf >= 1 && s.sf <= s.s0, "linear: need 1 <= sf <= s0");
          require(s.n_drops >= 1, "linear: n_drops must be >= 1");
          require(s.total_steps >= 1, "linear: total_steps must be >= 1");
        } else {
          require(s.budget >= 1, "fixed: budget must be >= 1");
        }
      },
      sched);
}

double stepwise_decay_factor(int s0, int sf, int n) {
  require(sf >= 1 && sf <= s0, "decay factor: need 1 <= sf <= s0");
  require(n >= 1, "decay factor: n must be >= 1");
  return std::pow(static_cast<double>(sf) / static_cast<double>(s0), 1.0 / n);
}

int budget_exponential(long long t, int b0, double gamma, int interval) {
  check_step(t);
  const long long k = t / interval;
  const double value =
      static_cast<double>(b0) * std::pow(gamma, static_cast<double>(k));
  return std::max(1, round_half_up(value));
}

int budget_stepwise(long long t, int s0, int sf, int n, int total_steps) {
  check_step(t);
  // k = floor(t / I) with I = total_steps/(n+1); the integer form is exact
  // where the floating-point division can land on the wrong side of a step
  // boundary.
  const long long k =
      std::min<long long>(n, t * (n + 1) / total_steps);
  if (k == n) return sf;  // pinned: d^n can miss sf by +-1 after rounding
  const double d = stepwise_decay_factor(s0, sf, n);
  const double value =
      static_cast<double>(s0) * std::pow(d, static_cast<double>(k));
  return std::max(1, round_half_up(value));
}

int budget_linear(long long t, int s0, int sf, int n_drops, int total_steps) {
  check_step(t);
  const long long k =
      std::min<long long>(n_drops, t * (n_drops + 1) / total_steps);
  if (k == n_drops) return sf;
  const double value = static_cast<double>(s0) -
                       static_cast<double>(k) *
                           (static_cast<double>(s0) - static_cast<double>(sf)) /
                           static_cast<double>(n_drops);
  return std::max(1, round_half_up(value));
}

int budget_at(const BudgetSchedule& sched, long long t) {
  return std::visit(
      [t](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return budget_exponential(t, s.b0, s.gamma, s.interval);
        } else if constexpr (std::is_same_v<T, StepwiseExponential>) {
          return budget_stepwise(t, s.s0, s.sf, s.n, s.total_steps);
        } else if constexpr (std::is_same_v<T, Linear>) {
          return budget_linear(t, s.s0, s.sf, s.n_drops, s.total_steps);
        } else {
          check_step(t);
          return s.budget;
        }
      },
      sched);
}

int final_budget(const BudgetSchedule& sched, int total_steps) {
  return budget_at(sched, std::max(0, total_steps - 1));
}

}  // namespace budgetrl::schedule
