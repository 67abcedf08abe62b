// Command-line driver: train / eval / compare / schedule subcommands over the
// budgetrl library.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "budgetrl/harness.hpp"

namespace {

using budgetrl::harness::ExperimentConfig;

ExperimentConfig load_config_or_die(const std::string& path) {
  return budgetrl::harness::load_config(path);
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config_or_die(config_path);
  if (seed) cfg.seed = *seed;
  const auto result =
      budgetrl::harness::run_training(cfg, std::filesystem::path(out_dir));
  std::cout << "trained " << cfg.total_steps << " steps (seed " << cfg.seed
            << ", final budget " << result.final_budget << ")\n";
  std::cout << "untrained: accuracy " << result.untrained.accuracy
            << ", mean length " << result.untrained.mean_length << "\n";
  std::cout << "final:     accuracy " << result.final_eval.accuracy
            << ", mean length " << result.final_eval.mean_length << "\n";
  std::cout << "outputs in " << out_dir
            << ": metrics.jsonl checkpoint.txt summary.csv curves.tsv\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, int budget, int n,
             std::uint64_t seed, const std::string& difficulty, bool greedy) {
  const auto model = budgetrl::policy::PolicyModel::standard();
  std::ifstream is(checkpoint_path);
  if (!is) {
    std::cerr << "cannot open checkpoint: " << checkpoint_path << "\n";
    return 1;
  }
  const auto params = budgetrl::policy::load_checkpoint(is, model);
  const auto diff = difficulty == "hard" ? budgetrl::env::Difficulty::kHard
                                         : budgetrl::env::Difficulty::kEasy;
  budgetrl::Rng task_rng(budgetrl::derive_seed(seed, 0xe7a1));
  const auto tasks = budgetrl::harness::generate_tasks(task_rng, diff, n);
  const auto result = budgetrl::harness::run_eval(
      model, params, tasks, budget, budgetrl::derive_seed(seed, 0xe7a2),
      greedy);
  std::cout << "tasks " << n << " budget " << budget << " accuracy "
            << result.accuracy << " mean_length " << result.mean_length
            << "\n";
  return 0;
}

int cmd_compare(const std::string& config_path,
                const std::vector<std::uint64_t>& seeds,
                const std::string& out_dir) {
  const ExperimentConfig cfg = load_config_or_die(config_path);
  const auto report =
      budgetrl::harness::compare_curriculum_vs_fixed(cfg, seeds);
  std::cout << budgetrl::harness::format_compare_report(report);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(std::filesystem::path(out_dir) / "compare.csv");
    os << budgetrl::harness::compare_report_csv(report);
    std::cout << "wrote " << out_dir << "/compare.csv\n";
  }
  return 0;
}

int cmd_schedule(const std::string& config_path) {
  const ExperimentConfig cfg = load_config_or_die(config_path);
  for (int t = 0; t < cfg.total_steps; ++t) {
    std::cout << t << '\t'
              << budgetrl::schedule::budget_at(cfg.budget_schedule, t) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRPO trainer with curriculum token budgets on a toy "
               "arithmetic environment"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_out;
  std::optional<std::uint64_t> train_seed;
  auto* train = app.add_subcommand("train", "run a training experiment");
  train->add_option("--config", train_config, "config file")->required();
  train->add_option("--out", train_out, "output directory")->required();
  train->add_option("--seed", train_seed, "override the config seed");

  // eval
  std::string eval_checkpoint, eval_difficulty = "easy";
  int eval_budget = 8, eval_n = 200;
  std::uint64_t eval_seed = 1;
  bool eval_greedy = false;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")
      ->required();
  eval->add_option("--budget", eval_budget, "token budget")->required();
  eval->add_option("--n", eval_n, "number of tasks")->required();
  eval->add_option("--seed", eval_seed, "task/sampling seed");
  eval->add_option("--difficulty", eval_difficulty, "easy or hard")
      ->check(CLI::IsMember({"easy", "hard"}));
  eval->add_flag("--greedy", eval_greedy, "argmax decoding");

  // compare
  std::string compare_config, compare_out;
  std::vector<std::uint64_t> compare_seeds;
  auto* compare =
      app.add_subcommand("compare", "curriculum vs fixed-budget report");
  compare->add_option("--config", compare_config, "config file")->required();
  compare->add_option("--seeds", compare_seeds, "comma-separated seeds (>= 5)")
      ->required()
      ->delimiter(',');
  compare->add_option("--out", compare_out, "directory for compare.csv");

  // schedule
  std::string schedule_config;
  bool schedule_print = false;
  auto* sched = app.add_subcommand("schedule", "inspect the budget schedule");
  sched->add_option("--config", schedule_config, "config file")->required();
  sched->add_flag("--print", schedule_print, "dump step<TAB>budget trace");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_config, train_out, train_seed);
    if (eval->parsed()) {
      return cmd_eval(eval_checkpoint, eval_budget, eval_n, eval_seed,
                      eval_difficulty, eval_greedy);
    }
    if (compare->parsed()) {
      return cmd_compare(compare_config, compare_seeds, compare_out);
    }
    if (sched->parsed()) return cmd_schedule(schedule_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
