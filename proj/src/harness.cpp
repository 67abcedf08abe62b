#include "budgetrl/harness.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace budgetrl::harness {

namespace {

// Stream ids for deriving independent RNG streams from the master seed.
// Evaluation streams are keyed by step so eval cadence cannot perturb
// training randomness.
constexpr std::uint64_t kStreamTrainTasks = 1;
constexpr std::uint64_t kStreamRollouts = 2;
constexpr std::uint64_t kStreamEvalTasks = 3;
constexpr std::uint64_t kStreamEvalUntrained = 4;
constexpr std::uint64_t kStreamEvalBase = 0x100000000ull;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double_strict(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto res =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
  return out;
}

long long parse_int_strict(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto res =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
  return out;
}

std::uint64_t parse_u64_strict(const std::string& key,
                               const std::string& value) {
  std::uint64_t out = 0;
  const auto res =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: bad unsigned for " + key + ": " +
                                value);
  }
  return out;
}

bool parse_bool_strict(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": " + value);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (prompts_per_step < 1) {
    throw std::invalid_argument("prompts_per_step must be >= 1");
  }
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (eval_set_size < 1) {
    throw std::invalid_argument("eval_set_size must be >= 1");
  }
  schedule::validate(budget_schedule);
  if (const auto* s =
          std::get_if<schedule::StepwiseExponential>(&budget_schedule)) {
    if (s->total_steps != total_steps) {
      throw std::invalid_argument(
          "stepwise schedule total_steps must equal experiment total_steps");
    }
  }
  if (const auto* s = std::get_if<schedule::Linear>(&budget_schedule)) {
    if (s->total_steps != total_steps) {
      throw std::invalid_argument(
          "linear schedule total_steps must equal experiment total_steps");
    }
  }
  grpo.validate();
  rewards.validate();
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument("config: duplicate key " + key);
    }
  }

  ExperimentConfig cfg;
  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (const auto v = take("seed")) cfg.seed = parse_u64_strict("seed", *v);
  if (const auto v = take("total_steps")) {
    cfg.total_steps = static_cast<int>(parse_int_strict("total_steps", *v));
  }
  if (const auto v = take("prompts_per_step")) {
    cfg.prompts_per_step =
        static_cast<int>(parse_int_strict("prompts_per_step", *v));
  }
  if (const auto v = take("difficulty")) {
    if (*v == "easy") {
      cfg.difficulty = env::Difficulty::kEasy;
    } else if (*v == "hard") {
      cfg.difficulty = env::Difficulty::kHard;
    } else {
      throw std::invalid_argument("config: difficulty must be easy or hard");
    }
  }
  if (const auto v = take("eval_every")) {
    cfg.eval_every = static_cast<int>(parse_int_strict("eval_every", *v));
  }
  if (const auto v = take("eval_set_size")) {
    cfg.eval_set_size = static_cast<int>(parse_int_strict("eval_set_size", *v));
  }
  if (const auto v = take("eval_greedy")) {
    cfg.eval_greedy = parse_bool_strict("eval_greedy", *v);
  }

  const std::string kind = take("schedule.kind").value_or("stepwise");
  auto take_sched_int = [&](const char* key, int fallback) {
    const auto v = take(key);
    return v ? static_cast<int>(parse_int_strict(key, *v)) : fallback;
  };
  if (kind == "fixed") {
    schedule::Fixed s;
    s.budget = take_sched_int("schedule.budget", s.budget);
    cfg.budget_schedule = s;
  } else if (kind == "exponential") {
    schedule::Exponential s;
    s.b0 = take_sched_int("schedule.b0", s.b0);
    if (const auto v = take("schedule.gamma")) {
      s.gamma = parse_double_strict("schedule.gamma", *v);
    }
    s.interval = take_sched_int("schedule.interval", s.interval);
    cfg.budget_schedule = s;
  } else if (kind == "stepwise") {
    schedule::StepwiseExponential s;
    s.s0 = take_sched_int("schedule.s0", s.s0);
    s.sf = take_sched_int("schedule.sf", s.sf);
    s.n = take_sched_int("schedule.n", s.n);
    s.total_steps = cfg.total_steps;
    cfg.budget_schedule = s;
  } else if (kind == "linear") {
    schedule::Linear s;
    s.s0 = take_sched_int("schedule.s0", s.s0);
    s.sf = take_sched_int("schedule.sf", s.sf);
    s.n_drops = take_sched_int("schedule.n_drops", s.n_drops);
    s.total_steps = cfg.total_steps;
    cfg.budget_schedule = s;
  } else {
    throw std::invalid_argument(
        "config: schedule.kind must be fixed, exponential, stepwise, or linear");
  }

  if (const auto v = take("grpo.group_size")) {
    cfg.grpo.group_size =
        static_cast<int>(parse_int_strict("grpo.group_size", *v));
  }
  if (const auto v = take("grpo.clip_eps")) {
    cfg.grpo.clip_eps = parse_double_strict("grpo.clip_eps", *v);
  }
  if (const auto v = take("grpo.kl_beta")) {
    cfg.grpo.kl_beta = parse_double_strict("grpo.kl_beta", *v);
  }
  if (const auto v = take("grpo.eps_stab")) {
    cfg.grpo.eps_stab = parse_double_strict("grpo.eps_stab", *v);
  }
  if (const auto v = take("grpo.learning_rate")) {
    cfg.grpo.learning_rate = parse_double_strict("grpo.learning_rate", *v);
  }
  if (const auto v = take("grpo.old_policy_refresh")) {
    cfg.grpo.old_policy_refresh =
        static_cast<int>(parse_int_strict("grpo.old_policy_refresh", *v));
  }

  if (const auto v = take("rewards.lambda_c")) {
    cfg.rewards.lambda_c = parse_double_strict("rewards.lambda_c", *v);
  }
  if (const auto v = take("rewards.lambda_l")) {
    cfg.rewards.lambda_l = parse_double_strict("rewards.lambda_l", *v);
  }
  if (const auto v = take("rewards.lambda_f")) {
    cfg.rewards.lambda_f = parse_double_strict("rewards.lambda_f", *v);
  }
  if (const auto v = take("rewards.r_cor")) {
    cfg.rewards.r_cor = parse_double_strict("rewards.r_cor", *v);
  }
  if (const auto v = take("rewards.r_max")) {
    cfg.rewards.r_max = parse_double_strict("rewards.r_max", *v);
  }
  if (const auto v = take("rewards.alpha_think")) {
    cfg.rewards.alpha_think = parse_double_strict("rewards.alpha_think", *v);
  }
  if (const auto v = take("rewards.alpha_answer")) {
    cfg.rewards.alpha_answer = parse_double_strict("rewards.alpha_answer", *v);
  }
  if (const auto v = take("rewards.length_shape")) {
    if (*v == "triangular") {
      cfg.rewards.length_shape = rewards::LengthShape::kTriangular;
    } else if (*v == "band") {
      cfg.rewards.length_shape = rewards::LengthShape::kBand;
    } else {
      throw std::invalid_argument(
          "config: rewards.length_shape must be triangular or band");
    }
  }

  if (!kv.empty()) {
    throw std::invalid_argument("config: unknown key " + kv.begin()->first);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open config file: " + path.string());
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "seed = " << cfg.seed << "\n";
  os << "total_steps = " << cfg.total_steps << "\n";
  os << "prompts_per_step = " << cfg.prompts_per_step << "\n";
  os << "difficulty = "
     << (cfg.difficulty == env::Difficulty::kEasy ? "easy" : "hard") << "\n";
  os << "eval_every = " << cfg.eval_every << "\n";
  os << "eval_set_size = " << cfg.eval_set_size << "\n";
  os << "eval_greedy = " << (cfg.eval_greedy ? "true" : "false") << "\n";
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, schedule::Fixed>) {
          os << "schedule.kind = fixed\n";
          os << "schedule.budget = " << s.budget << "\n";
        } else if constexpr (std::is_same_v<T, schedule::Exponential>) {
          os << "schedule.kind = exponential\n";
          os << "schedule.b0 = " << s.b0 << "\n";
          os << "schedule.gamma = " << format_double(s.gamma) << "\n";
          os << "schedule.interval = " << s.interval << "\n";
        } else if constexpr (std::is_same_v<T, schedule::StepwiseExponential>) {
          os << "schedule.kind = stepwise\n";
          os << "schedule.s0 = " << s.s0 << "\n";
          os << "schedule.sf = " << s.sf << "\n";
          os << "schedule.n = " << s.n << "\n";
        } else {
          os << "schedule.kind = linear\n";
          os << "schedule.s0 = " << s.s0 << "\n";
          os << "schedule.sf = " << s.sf << "\n";
          os << "schedule.n_drops = " << s.n_drops << "\n";
        }
      },
      cfg.budget_schedule);
  os << "grpo.group_size = " << cfg.grpo.group_size << "\n";
  os << "grpo.clip_eps = " << format_double(cfg.grpo.clip_eps) << "\n";
  os << "grpo.kl_beta = " << format_double(cfg.grpo.kl_beta) << "\n";
  os << "grpo.eps_stab = " << format_double(cfg.grpo.eps_stab) << "\n";
  os << "grpo.learning_rate = " << format_double(cfg.grpo.learning_rate)
     << "\n";
  os << "grpo.old_policy_refresh = " << cfg.grpo.old_policy_refresh << "\n";
  os << "rewards.lambda_c = " << format_double(cfg.rewards.lambda_c) << "\n";
  os << "rewards.lambda_l = " << format_double(cfg.rewards.lambda_l) << "\n";
  os << "rewards.lambda_f = " << format_double(cfg.rewards.lambda_f) << "\n";
  os << "rewards.r_cor = " << format_double(cfg.rewards.r_cor) << "\n";
  os << "rewards.r_max = " << format_double(cfg.rewards.r_max) << "\n";
  os << "rewards.alpha_think = " << format_double(cfg.rewards.alpha_think)
     << "\n";
  os << "rewards.alpha_answer = " << format_double(cfg.rewards.alpha_answer)
     << "\n";
  os << "rewards.length_shape = "
     << (cfg.rewards.length_shape == rewards::LengthShape::kTriangular
             ? "triangular"
             : "band")
     << "\n";
  return os.str();
}

std::string metrics_to_jsonl(const MetricsRecord& r) {
  std::ostringstream os;
  os << "{\"step\":" << r.step << ",\"budget\":" << r.budget
     << ",\"train_mean_reward\":" << format_double(r.train_mean_reward)
     << ",\"train_accuracy\":" << format_double(r.train_accuracy)
     << ",\"train_mean_length\":" << format_double(r.train_mean_length)
     << ",\"kl\":" << format_double(r.kl)
     << ",\"objective\":" << format_double(r.objective);
  if (r.eval_accuracy) {
    os << ",\"eval_accuracy\":" << format_double(*r.eval_accuracy)
       << ",\"eval_mean_length\":" << format_double(*r.eval_mean_length);
  }
  os << "}";
  return os.str();
}

std::vector<env::ArithmeticTask> generate_tasks(Rng& rng,
                                                env::Difficulty difficulty,
                                                int count) {
  std::vector<env::ArithmeticTask> tasks;
  tasks.reserve(count);
  for (int i = 0; i < count; ++i) tasks.push_back(env::gen_task(rng, difficulty));
  return tasks;
}

EvalResult run_eval(const policy::PolicyModel& model,
                    const policy::PolicyParams& params,
                    std::span<const env::ArithmeticTask> tasks, int budget,
                    std::uint64_t eval_seed, bool greedy) {
  if (tasks.empty()) throw std::invalid_argument("run_eval needs >= 1 task");
  EvalResult out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto ctx = env::make_context(tasks[i], budget);
    policy::Trajectory traj;
    if (greedy) {
      traj = policy::sample_greedy(model, params, ctx);
    } else {
      Rng rng(derive_seed(eval_seed, i));
      traj = policy::sample(model, params, ctx, rng);
    }
    out.accuracy += env::evaluate(model.vocab(), traj.tokens, tasks[i]);
    out.mean_length += static_cast<double>(traj.length());
  }
  out.accuracy /= static_cast<double>(tasks.size());
  out.mean_length /= static_cast<double>(tasks.size());
  return out;
}

TrainResult run_training(const ExperimentConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();

  const policy::PolicyModel model = policy::PolicyModel::standard();
  policy::PolicyParams theta = policy::PolicyParams::zeros(model);
  policy::PolicyParams theta_ref = theta;  // frozen reference: initial policy
  policy::PolicyParams theta_old = theta;

  Rng task_rng(derive_seed(cfg.seed, kStreamTrainTasks));
  Rng rollout_rng(derive_seed(cfg.seed, kStreamRollouts));
  Rng eval_task_rng(derive_seed(cfg.seed, kStreamEvalTasks));
  const auto eval_set =
      generate_tasks(eval_task_rng, cfg.difficulty, cfg.eval_set_size);

  TrainResult result;
  result.final_budget =
      schedule::final_budget(cfg.budget_schedule, cfg.total_steps);
  result.untrained =
      run_eval(model, theta, eval_set, result.final_budget,
               derive_seed(cfg.seed, kStreamEvalUntrained), cfg.eval_greedy);

  for (int t = 0; t < cfg.total_steps; ++t) {
    const int budget = schedule::budget_at(cfg.budget_schedule, t);
    if (t % cfg.grpo.old_policy_refresh == 0) theta_old = theta;
    const auto tasks =
        generate_tasks(task_rng, cfg.difficulty, cfg.prompts_per_step);
    const auto stats =
        grpo::grpo_step(model, theta, theta_old, theta_ref, tasks, cfg.grpo,
                        cfg.rewards, budget, rollout_rng);

    MetricsRecord record;
    record.step = t;
    record.budget = budget;
    record.train_mean_reward = stats.mean_reward;
    record.train_accuracy = stats.accuracy;
    record.train_mean_length = stats.mean_length;
    record.kl = stats.kl;
    record.objective = stats.objective;
    const bool do_eval =
        (t + 1) % cfg.eval_every == 0 || t + 1 == cfg.total_steps;
    if (do_eval) {
      const auto eval = run_eval(model, theta, eval_set, budget,
                                 derive_seed(cfg.seed, kStreamEvalBase + t),
                                 cfg.eval_greedy);
      record.eval_accuracy = eval.accuracy;
      record.eval_mean_length = eval.mean_length;
      if (t + 1 == cfg.total_steps) result.final_eval = eval;
    }
    result.metrics.push_back(record);
  }

  theta.step = cfg.total_steps;
  result.final_params = theta;

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    {
      std::ofstream os(*out_dir / "metrics.jsonl");
      for (const auto& record : result.metrics) {
        os << metrics_to_jsonl(record) << "\n";
      }
    }
    {
      std::ofstream os(*out_dir / "checkpoint.txt");
      policy::save_checkpoint(os, model, result.final_params);
    }
    {
      std::ofstream os(*out_dir / "summary.csv");
      os << "arm,seed,budget,accuracy,mean_length\n";
      os << "untrained," << cfg.seed << "," << result.final_budget << ","
         << format_double(result.untrained.accuracy) << ","
         << format_double(result.untrained.mean_length) << "\n";
      os << "trained," << cfg.seed << "," << result.final_budget << ","
         << format_double(result.final_eval.accuracy) << ","
         << format_double(result.final_eval.mean_length) << "\n";
    }
    {
      std::ofstream os(*out_dir / "curves.tsv");
      os << "step\tbudget\ttrain_mean_reward\ttrain_accuracy\t"
            "train_mean_length\tkl\tobjective\teval_accuracy\t"
            "eval_mean_length\n";
      for (const auto& r : result.metrics) {
        os << r.step << '\t' << r.budget << '\t'
           << format_double(r.train_mean_reward) << '\t'
           << format_double(r.train_accuracy) << '\t'
           << format_double(r.train_mean_length) << '\t'
           << format_double(r.kl) << '\t' << format_double(r.objective) << '\t'
           << (r.eval_accuracy ? format_double(*r.eval_accuracy) : "nan")
           << '\t'
           << (r.eval_mean_length ? format_double(*r.eval_mean_length) : "nan")
           << "\n";
      }
    }
  }
  return result;
}

const CompareArmSummary& CompareReport::arm_summary(
    const std::string& arm) const {
  for (const auto& s : summary) {
    if (s.arm == arm) return s;
  }
  throw std::invalid_argument("no such arm: " + arm);
}

CompareReport compare_curriculum_vs_fixed(
    const ExperimentConfig& base_cfg, std::span<const std::uint64_t> seeds) {
  base_cfg.validate();
  if (seeds.size() < 5) {
    throw std::invalid_argument("compare requires at least 5 seeds");
  }

  CompareReport report;
  report.final_budget =
      schedule::final_budget(base_cfg.budget_schedule, base_cfg.total_steps);

  ExperimentConfig fixed_cfg = base_cfg;
  fixed_cfg.budget_schedule = schedule::Fixed{report.final_budget};
  fixed_cfg.validate();

  struct Acc {
    double acc = 0.0;
    double len = 0.0;
  };
  std::map<std::string, Acc> totals;

  for (std::uint64_t seed : seeds) {
    ExperimentConfig cur = base_cfg;
    cur.seed = seed;
    ExperimentConfig fix = fixed_cfg;
    fix.seed = seed;

    const TrainResult cur_result = run_training(cur, std::nullopt);
    const TrainResult fix_result = run_training(fix, std::nullopt);

    const auto push = [&](const std::string& arm, const EvalResult& eval) {
      report.rows.push_back(CompareRow{arm, seed, eval.accuracy,
                                       eval.mean_length});
      totals[arm].acc += eval.accuracy;
      totals[arm].len += eval.mean_length;
    };
    push("untrained", cur_result.untrained);
    push("fixed", fix_result.final_eval);
    push("curriculum", cur_result.final_eval);
  }

  for (const std::string arm : {"untrained", "fixed", "curriculum"}) {
    CompareArmSummary s;
    s.arm = arm;
    s.accuracy_mean = totals[arm].acc / static_cast<double>(seeds.size());
    s.mean_length_mean = totals[arm].len / static_cast<double>(seeds.size());
    report.summary.push_back(s);
  }
  return report;
}

std::string format_compare_report(const CompareReport& report) {
  std::ostringstream os;
  os << "curriculum vs fixed budget (final budget " << report.final_budget
     << ")\n";
  os << "  arm         seed        accuracy  mean_length\n";
  for (const auto& row : report.rows) {
    os << "  " << row.arm;
    for (std::size_t i = row.arm.size(); i < 12; ++i) os << ' ';
    std::string seed_str = std::to_string(row.seed);
    os << seed_str;
    for (std::size_t i = seed_str.size(); i < 12; ++i) os << ' ';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%8.4f  %11.3f", row.accuracy,
                  row.mean_length);
    os << buf << "\n";
  }
  os << "  means:\n";
  for (const auto& s : report.summary) {
    os << "  " << s.arm;
    for (std::size_t i = s.arm.size(); i < 12; ++i) os << ' ';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "            %8.4f  %11.3f",
                  s.accuracy_mean, s.mean_length_mean);
    os << buf << "\n";
  }
  return os.str();
}

std::string compare_report_csv(const CompareReport& report) {
  std::ostringstream os;
  os << "arm,seed,accuracy,mean_length\n";
  for (const auto& row : report.rows) {
    os << row.arm << "," << row.seed << "," << format_double(row.accuracy)
       << "," << format_double(row.mean_length) << "\n";
  }
  for (const auto& s : report.summary) {
    os << s.arm << ",mean," << format_double(s.accuracy_mean) << ","
       << format_double(s.mean_length_mean) << "\n";
  }
  return os.str();
}

}  // namespace budgetrl::harness
