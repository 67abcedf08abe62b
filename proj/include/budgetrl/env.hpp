#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "budgetrl/policy.hpp"
#include "budgetrl/rng.hpp"
#include "budgetrl/tagparse.hpp"
#include "budgetrl/vocab.hpp"

namespace budgetrl::env {

enum class Difficulty { kEasy, kHard };
enum class Op { kAdd, kSub, kMul };

char op_char(Op op);  // '+', '-', '*'

// One synthetic arithmetic question; gold_answer always equals the exact
// integer result.
struct ArithmeticTask {
  long long operand_a = 0;
  long long operand_b = 0;
  Op op = Op::kAdd;
  long long gold_answer = 0;
  Difficulty difficulty = Difficulty::kEasy;
};

ArithmeticTask make_task(long long a, long long b, Op op, Difficulty difficulty);

// Operands uniform in [0,9] (easy) or [10,99] (hard); operator uniform.
ArithmeticTask gen_task(Rng& rng, Difficulty difficulty);

struct RenderedPrompt {
  std::string text;
  int budget = 1;
};

// Instruction template with the token budget and the question "a op b = ?"
// substituted; byte-exact for a given (task, budget).
RenderedPrompt render_prompt(const ArithmeticTask& task, int budget);

std::string question_text(const ArithmeticTask& task);
std::string gold_text(const ArithmeticTask& task);

// Correctness of an already-parsed completion against the task's gold answer.
int evaluate_parsed(const tagparse::ParsedCompletion& pc,
                    const ArithmeticTask& task);

// Detokenize, parse, extract, verify; 0 whenever the answer span is missing
// or wrong.
int evaluate(const Vocabulary& vocab, std::span<const int> tokens,
             const ArithmeticTask& task);

// Dense task encoding consumed by the policy's feature map: one-hots of the
// gold answer's ones and tens digits, a digit-count one-hot (1..4+), and a
// negative-sign flag.
inline constexpr int kTaskFeatureDim = 25;
std::vector<double> task_features(const ArithmeticTask& task);

// Generation context for one (task, budget) pair: task features, budget L,
// and the sampling cap max_len = 2L.
policy::GenContext make_context(const ArithmeticTask& task, int budget);

// Line-delimited task-set format: a<TAB>op<TAB>b<TAB>gold. Import validates
// field syntax and that gold matches the recomputed result.
void write_tasks(std::ostream& os, std::span<const ArithmeticTask> tasks);
std::vector<ArithmeticTask> read_tasks(std::istream& is);

}  // namespace budgetrl::env
