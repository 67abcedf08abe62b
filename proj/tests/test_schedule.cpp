#include "budgetrl/schedule.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>
#include <vector>

#include "budgetrl/rng.hpp"

using namespace budgetrl;
using namespace budgetrl::schedule;

TEST_CASE("exponential budget formula") {
  CHECK(budget_exponential(0, 256, 0.7, 100) == 256);
  CHECK(budget_exponential(600, 256, 0.7, 100) == 30);  // 256 * 0.7^6 = 30.118
  CHECK(budget_exponential(99, 256, 0.7, 100) == 256);
  CHECK(budget_exponential(100, 256, 0.7, 100) == 179);  // 256 * 0.7 = 179.2
  CHECK(budget_exponential(1000000, 1, 0.5, 1) == 1);    // floor at 1
}

TEST_CASE("stepwise decay factor matches a high-precision evaluation") {
  // oracle: exp(log(sf/s0)/n) in long double
  const auto oracle = [](int s0, int sf, int n) {
    return static_cast<double>(
        std::exp(std::log(static_cast<long double>(sf) / s0) / n));
  };
  CHECK(stepwise_decay_factor(256, 87, 1) ==
        doctest::Approx(oracle(256, 87, 1)).epsilon(1e-12));
  CHECK(stepwise_decay_factor(256, 87, 3) ==
        doctest::Approx(oracle(256, 87, 3)).epsilon(1e-12));
  CHECK(stepwise_decay_factor(256, 87, 7) ==
        doctest::Approx(oracle(256, 87, 7)).epsilon(1e-12));
  // frozen oracle values
  CHECK(stepwise_decay_factor(256, 87, 1) == doctest::Approx(0.33984375));
  CHECK(stepwise_decay_factor(256, 87, 3) ==
        doctest::Approx(0.6978462714573030).epsilon(1e-12));
  CHECK(stepwise_decay_factor(256, 87, 7) ==
        doctest::Approx(0.8571165840311384).epsilon(1e-12));
  CHECK(stepwise_decay_factor(100, 100, 4) == doctest::Approx(1.0));
}

TEST_CASE("stepwise budget levels") {
  CHECK(budget_stepwise(0, 256, 87, 3, 600) == 256);
  // S_1 = 256 * d = 178.6486... -> 179 (frozen from the long-double oracle)
  CHECK(budget_stepwise(150, 256, 87, 3, 600) == 179);
  CHECK(budget_stepwise(149, 256, 87, 3, 600) == 256);
  CHECK(budget_stepwise(600, 256, 87, 3, 600) == 87);
  CHECK(budget_stepwise(599, 256, 87, 3, 600) == 87);  // k = 3 plateau
  for (int n : {1, 3, 7}) {
    CAPTURE(n);
    CHECK(budget_stepwise(0, 256, 87, n, 600) == 256);
    CHECK(budget_stepwise(600, 256, 87, n, 600) == 87);
  }
}

TEST_CASE("stepwise has exactly n downward transitions on separated configs") {
  struct Case {
    int s0, sf, n, total;
  };
  for (const Case c : {Case{256, 87, 1, 600}, Case{256, 87, 3, 600},
                       Case{256, 87, 7, 600}, Case{24, 8, 3, 600},
                       Case{256, 87, 3, 601}}) {  // non-divisible horizon
    CAPTURE(c.s0);
    CAPTURE(c.n);
    CAPTURE(c.total);
    int transitions = 0;
    int prev = budget_stepwise(0, c.s0, c.sf, c.n, c.total);
    CHECK(prev == c.s0);
    for (int t = 1; t <= c.total; ++t) {
      const int b = budget_stepwise(t, c.s0, c.sf, c.n, c.total);
      CHECK(b <= prev);
      if (b < prev) ++transitions;
      prev = b;
    }
    CHECK(transitions == c.n);
    CHECK(prev == c.sf);
  }
}

TEST_CASE("linear budget levels") {
  CHECK(budget_linear(0, 256, 87, 3, 600) == 256);
  // after the first drop: 256 - 169/3 = 199.67 -> 200 (exact rational check)
  CHECK(budget_linear(150, 256, 87, 3, 600) == 200);
  CHECK(budget_linear(300, 256, 87, 3, 600) == 143);  // 256 - 2*169/3 = 143.33
  CHECK(budget_linear(600, 256, 87, 3, 600) == 87);
  CHECK(budget_linear(599, 256, 87, 3, 600) == 87);
}

TEST_CASE("schedules are monotone, integral, and pinned at the endpoints") {
  Rng rng(424242);
  for (int trial = 0; trial < 400; ++trial) {
    const int total = static_cast<int>(rng.uniform_int(1, 900));
    const int sf = static_cast<int>(rng.uniform_int(1, 128));
    const int s0 = sf + static_cast<int>(rng.uniform_int(0, 512));
    const int n = static_cast<int>(rng.uniform_int(1, 12));

    const BudgetSchedule schedules[] = {
        Exponential{s0, 0.05 + 0.9 * rng.uniform_double(),
                    static_cast<int>(rng.uniform_int(1, 200))},
        StepwiseExponential{s0, sf, n, total},
        Linear{s0, sf, n, total},
        Fixed{sf},
    };
    for (const auto& sched : schedules) {
      validate(sched);
      int prev = budget_at(sched, 0);
      for (int t = 0; t <= total; ++t) {
        const int b = budget_at(sched, t);
        CHECK(b >= 1);
        CHECK(b <= prev);
        prev = b;
      }
      if (std::holds_alternative<StepwiseExponential>(sched) ||
          std::holds_alternative<Linear>(sched)) {
        CHECK(budget_at(sched, 0) == s0);
        CHECK(budget_at(sched, total) == sf);
      }
      if (std::holds_alternative<Fixed>(sched)) {
        CHECK(budget_at(sched, 0) == sf);
        CHECK(budget_at(sched, total) == sf);
      }
    }
  }
}

TEST_CASE("schedule validation rejects bad parameters") {
  CHECK_THROWS_AS(validate(Exponential{256, 1.0, 100}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Exponential{256, 0.0, 100}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Exponential{256, 0.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(StepwiseExponential{87, 256, 3, 600}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(StepwiseExponential{256, 0, 3, 600}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(Linear{256, 87, 0, 600}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Fixed{0}), std::invalid_argument);
  CHECK_NOTHROW(validate(Fixed{8}));
  CHECK_THROWS_AS(budget_at(Fixed{8}, -1), std::invalid_argument);
  CHECK_THROWS_AS(stepwise_decay_factor(10, 20, 1), std::invalid_argument);
}

TEST_CASE("final budget helper") {
  CHECK(final_budget(StepwiseExponential{24, 8, 3, 600}, 600) == 8);
  CHECK(final_budget(Linear{256, 87, 3, 600}, 600) == 87);
  CHECK(final_budget(Fixed{8}, 600) == 8);
  CHECK(final_budget(Exponential{256, 0.7, 100}, 601) == 30);
}
