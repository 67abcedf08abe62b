#pragma once

#include <variant>

namespace budgetrl::schedule {

// Token-budget schedules mapping a training step t to the current budget.
// All variants produce integer budgets >= 1 and are monotone non-increasing
// in t.

// budget(t) = max(1, round(b0 * gamma^floor(t / interval)))
struct Exponential {
  int b0 = 256;
  double gamma = 0.7;
  int interval = 100;

  friend bool operator==(const Exponential&, const Exponential&) = default;
};

// n discrete decays by the constant factor d = (sf/s0)^(1/n), applied every
// total_steps/(n+1) steps; the final plateau is pinned to sf exactly.
struct StepwiseExponential {
  int s0 = 256;
  int sf = 87;
  int n = 3;
  int total_steps = 600;

  friend bool operator==(const StepwiseExponential&, const StepwiseExponential&) = default;
};

// n_drops equal-size budget drops from s0 to sf over total_steps; the final
// plateau is pinned to sf exactly.
struct Linear {
  int s0 = 256;
  int sf = 87;
  int n_drops = 3;
  int total_steps = 600;

  friend bool operator==(const Linear&, const Linear&) = default;
};

struct Fixed {
  int budget = 87;

  friend bool operator==(const Fixed&, const Fixed&) = default;
};

using BudgetSchedule = std::variant<Exponential, StepwiseExponential, Linear, Fixed>;

// Throws std::invalid_argument when parameters violate their ranges
// (gamma in (0,1), 1 <= sf <= s0, interval/total_steps/n >= 1, budget >= 1).
void validate(const BudgetSchedule& sched);

double stepwise_decay_factor(int s0, int sf, int n);

int budget_exponential(long long t, int b0, double gamma, int interval);
int budget_stepwise(long long t, int s0, int sf, int n, int total_steps);
int budget_linear(long long t, int s0, int sf, int n_drops, int total_steps);

// Dispatches to the variant's formula; t >= 0 (throws otherwise). Steps past
// the schedule horizon stay on the final plateau.
int budget_at(const BudgetSchedule& sched, long long t);

// Budget on the last training step of a total_steps-long run.
int final_budget(const BudgetSchedule& sched, int total_steps);

}  // namespace budgetrl::schedule
