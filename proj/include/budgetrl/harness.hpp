#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "budgetrl/env.hpp"
#include "budgetrl/grpo.hpp"
#include "budgetrl/policy.hpp"
#include "budgetrl/rewards.hpp"
#include "budgetrl/schedule.hpp"

namespace budgetrl::harness {

// Experiment-level knobs. The schedule's own total_steps (stepwise/linear)
// must match total_steps here; the config file derives it automatically.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int total_steps = 600;
  int prompts_per_step = 4;
  env::Difficulty difficulty = env::Difficulty::kEasy;
  schedule::BudgetSchedule budget_schedule =
      schedule::StepwiseExponential{24, 8, 3, 600};
  grpo::GrpoConfig grpo;
  rewards::RewardConfig rewards;
  int eval_every = 100;
  int eval_set_size = 400;
  bool eval_greedy = false;

  void validate() const;  // throws std::invalid_argument
};

// Flat key-value config file with dotted sections (schedule.*, grpo.*,
// rewards.*). '#' starts a comment; unknown keys are errors; omitted keys
// keep their defaults. serialize_config() emits every key in a canonical
// order and round-trips losslessly through parse_config().
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// One training step's metrics. Eval fields are present only on steps where
// the held-out evaluation ran.
struct MetricsRecord {
  int step = 0;
  int budget = 1;
  double train_mean_reward = 0.0;
  double train_accuracy = 0.0;
  double train_mean_length = 0.0;
  double kl = 0.0;
  double objective = 0.0;
  std::optional<double> eval_accuracy;
  std::optional<double> eval_mean_length;
};

// JSON object with keys in the documented order: step, budget,
// train_mean_reward, train_accuracy, train_mean_length, kl, objective, then
// eval_accuracy and eval_mean_length when present.
std::string metrics_to_jsonl(const MetricsRecord& record);

struct EvalResult {
  double accuracy = 0.0;
  double mean_length = 0.0;
};

struct TrainResult {
  std::vector<MetricsRecord> metrics;
  policy::PolicyParams final_params;
  EvalResult untrained;
  EvalResult final_eval;
  int final_budget = 1;
};

// Deterministic training loop: budget from the schedule, one grpo_step per
// step, held-out evaluation every eval_every steps and on the last step.
// When out_dir is given, writes metrics.jsonl, checkpoint.txt, summary.csv,
// and curves.tsv there. Config validation failures throw before anything is
// written.
TrainResult run_training(const ExperimentConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir);

// Seeded sampling (or greedy) over a fixed task set at the given budget;
// deterministic for a given eval_seed.
EvalResult run_eval(const policy::PolicyModel& model,
                    const policy::PolicyParams& params,
                    std::span<const env::ArithmeticTask> tasks, int budget,
                    std::uint64_t eval_seed, bool greedy);

std::vector<env::ArithmeticTask> generate_tasks(Rng& rng,
                                                env::Difficulty difficulty,
                                                int count);

struct CompareRow {
  std::string arm;  // "untrained" | "fixed" | "curriculum"
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mean_length = 0.0;
};

struct CompareArmSummary {
  std::string arm;
  double accuracy_mean = 0.0;
  double mean_length_mean = 0.0;
};

struct CompareReport {
  int final_budget = 1;
  std::vector<CompareRow> rows;  // 3 arms x |seeds|
  std::vector<CompareArmSummary> summary;

  const CompareArmSummary& arm_summary(const std::string& arm) const;
};

// Trains the configured curriculum schedule and a Fixed{final budget}
// baseline for every seed (>= 5 required), and evaluates the untrained
// policy, reporting per-seed and per-arm mean accuracy and length.
CompareReport compare_curriculum_vs_fixed(const ExperimentConfig& base_cfg,
                                          std::span<const std::uint64_t> seeds);

std::string format_compare_report(const CompareReport& report);
std::string compare_report_csv(const CompareReport& report);

}  // namespace budgetrl::harness
