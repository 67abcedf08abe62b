#include "budgetrl/env.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace budgetrl::env {

namespace {

constexpr std::string_view kPromptTemplate =
    "A conversation between User and Assistant. The user asks a question, "
    "and the Assistant solves it. The assistant first thinks about the "
    "reasoning process in the mind and then provides the user with the "
    "answer. The reasoning process and answer are enclosed within "
    "<think></think> and <answer></answer> tags, respectively, i.e., "
    "<think>reasoning process here</think> <answer>answer here</answer>. "
    "IMPORTANT: You should use exactly {token_budget} tokens in your "
    "response. User: {question} Assistant:";

long long apply_op(long long a, long long b, Op op) {
  switch (op) {
    case Op::kAdd:
      return a + b;
    case Op::kSub:
      return a - b;
    case Op::kMul:
      return a * b;
  }
  throw std::logic_error("unreachable operator");
}

void replace_once(std::string& text, std::string_view needle,
                  std::string_view replacement) {
  const std::size_t pos = text.find(needle);
  if (pos == std::string::npos) {
    throw std::logic_error("prompt template placeholder missing");
  }
  text.replace(pos, needle.size(), replacement);
}

Op op_from_char(char c) {
  switch (c) {
    case '+':
      return Op::kAdd;
    case '-':
      return Op::kSub;
    case '*':
      return Op::kMul;
    default:
      throw std::invalid_argument("unknown operator character");
  }
}

}  // namespace

char op_char(Op op) {
  switch (op) {
    case Op::kAdd:
      return '+';
    case Op::kSub:
      return '-';
    case Op::kMul:
      return '*';
  }
  throw std::logic_error("unreachable operator");
}

ArithmeticTask make_task(long long a, long long b, Op op,
                         Difficulty difficulty) {
  ArithmeticTask task;
  task.operand_a = a;
  task.operand_b = b;
  task.op = op;
  task.gold_answer = apply_op(a, b, op);
  task.difficulty = difficulty;
  return task;
}

ArithmeticTask gen_task(Rng& rng, Difficulty difficulty) {
  const long long lo = difficulty == Difficulty::kEasy ? 0 : 10;
  const long long hi = difficulty == Difficulty::kEasy ? 9 : 99;
  const long long a = rng.uniform_int(lo, hi);
  const long long b = rng.uniform_int(lo, hi);
  const Op op = static_cast<Op>(rng.uniform_int(0, 2));
  return make_task(a, b, op, difficulty);
}

std::string question_text(const ArithmeticTask& task) {
  std::string q = std::to_string(task.operand_a);
  q += ' ';
  q += op_char(task.op);
  q += ' ';
  q += std::to_string(task.operand_b);
  q += " = ?";
  return q;
}

std::string gold_text(const ArithmeticTask& task) {
  return std::to_string(task.gold_answer);
}

RenderedPrompt render_prompt(const ArithmeticTask& task, int budget) {
  if (budget < 1) throw std::invalid_argument("prompt budget must be >= 1");
  RenderedPrompt out;
  out.budget = budget;
  out.text = std::string(kPromptTemplate);
  replace_once(out.text, "{token_budget}", std::to_string(budget));
  replace_once(out.text, "{question}", question_text(task));
  return out;
}

int evaluate_parsed(const tagparse::ParsedCompletion& pc,
                    const ArithmeticTask& task) {
  const auto answer = tagparse::extract_answer(pc);
  if (!answer) return 0;
  return tagparse::verify_answer(*answer, gold_text(task));
}

int evaluate(const Vocabulary& vocab, std::span<const int> tokens,
             const ArithmeticTask& task) {
  const std::string text = vocab.detokenize(tokens);
  return evaluate_parsed(tagparse::parse_completion(text), task);
}

std::vector<double> task_features(const ArithmeticTask& task) {
  std::vector<double> f(kTaskFeatureDim, 0.0);
  unsigned long long mag = task.gold_answer < 0
                               ? static_cast<unsigned long long>(-task.gold_answer)
                               : static_cast<unsigned long long>(task.gold_answer);
  f[static_cast<int>(mag % 10)] = 1.0;
  f[10 + static_cast<int>((mag / 10) % 10)] = 1.0;
  int digits = 1;
  for (unsigned long long m = mag / 10; m > 0; m /= 10) ++digits;
  f[20 + std::min(digits, 4) - 1] = 1.0;
  if (task.gold_answer < 0) f[24] = 1.0;
  return f;
}

policy::GenContext make_context(const ArithmeticTask& task, int budget) {
  if (budget < 1) throw std::invalid_argument("context budget must be >= 1");
  policy::GenContext ctx;
  ctx.task_features = task_features(task);
  ctx.budget = budget;
  ctx.max_len = 2 * budget;
  return ctx;
}

void write_tasks(std::ostream& os, std::span<const ArithmeticTask> tasks) {
  for (const auto& task : tasks) {
    os << task.operand_a << '\t' << op_char(task.op) << '\t' << task.operand_b
       << '\t' << task.gold_answer << '\n';
  }
}

std::vector<ArithmeticTask> read_tasks(std::istream& is) {
  std::vector<ArithmeticTask> tasks;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a_str, op_str, b_str, gold_str;
    if (!std::getline(ls, a_str, '\t') || !std::getline(ls, op_str, '\t') ||
        !std::getline(ls, b_str, '\t') || !std::getline(ls, gold_str)) {
      throw std::runtime_error("task set line " + std::to_string(line_no) +
                               ": expected a<TAB>op<TAB>b<TAB>gold");
    }
    if (op_str.size() != 1 ||
        (op_str[0] != '+' && op_str[0] != '-' && op_str[0] != '*')) {
      throw std::runtime_error("task set line " + std::to_string(line_no) +
                               ": bad operator field");
    }
    long long a = 0, b = 0, gold = 0;
    try {
      a = std::stoll(a_str);
      b = std::stoll(b_str);
      gold = std::stoll(gold_str);
    } catch (const std::exception&) {
      throw std::runtime_error("task set line " + std::to_string(line_no) +
                               ": bad integer field");
    }
    const Op op = op_from_char(op_str[0]);
    if (apply_op(a, b, op) != gold) {
      throw std::runtime_error("task set line " + std::to_string(line_no) +
                               ": gold does not match recomputed result");
    }
    const bool easy = a >= 0 && a <= 9 && b >= 0 && b <= 9;
    ArithmeticTask task =
        make_task(a, b, op, easy ? Difficulty::kEasy : Difficulty::kHard);
    tasks.push_back(task);
  }
  return tasks;
}

}  // namespace budgetrl::env
