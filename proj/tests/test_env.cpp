#include "budgetrl/env.hpp"

#include <doctest.h>

#include <stdexcept>

#include <sstream>
#include <string>
#include <vector>

#include "budgetrl/rng.hpp"

using namespace budgetrl;
using namespace budgetrl::env;

TEST_CASE("gen_task is reproducible for a fixed seed") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) {
    const auto ta = gen_task(a, Difficulty::kEasy);
    const auto tb = gen_task(b, Difficulty::kEasy);
    CHECK(ta.operand_a == tb.operand_a);
    CHECK(ta.operand_b == tb.operand_b);
    CHECK(ta.op == tb.op);
    CHECK(ta.gold_answer == tb.gold_answer);
  }
}

TEST_CASE("easy tasks draw one-digit operands, hard tasks two-digit") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto easy = gen_task(rng, Difficulty::kEasy);
    CHECK(easy.operand_a >= 0);
    CHECK(easy.operand_a <= 9);
    CHECK(easy.operand_b >= 0);
    CHECK(easy.operand_b <= 9);
    const auto hard = gen_task(rng, Difficulty::kHard);
    CHECK(hard.operand_a >= 10);
    CHECK(hard.operand_a <= 99);
    CHECK(hard.operand_b >= 10);
    CHECK(hard.operand_b <= 99);
  }
}

TEST_CASE("gold answers match an independent recomputation") {
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const auto task = gen_task(rng, Difficulty::kHard);
    long long want = 0;
    switch (op_char(task.op)) {
      case '+': want = task.operand_a + task.operand_b; break;
      case '-': want = task.operand_a - task.operand_b; break;
      case '*': want = task.operand_a * task.operand_b; break;
    }
    CHECK(task.gold_answer == want);
  }
}

TEST_CASE("render_prompt substitutes the budget and question") {
  const auto task = make_task(3, 4, Op::kMul, Difficulty::kEasy);
  const auto p87 = render_prompt(task, 87);
  CHECK(p87.text.find("You should use exactly 87 tokens") != std::string::npos);
  CHECK(p87.text.find("User: 3 * 4 = ? Assistant:") != std::string::npos);
  const auto p256 = render_prompt(task, 256);
  CHECK(p256.text.find("exactly 256 tokens") != std::string::npos);
  const auto p1 = render_prompt(task, 1);
  CHECK(p1.text.find("exactly 1 tokens") != std::string::npos);
  CHECK(p1.text.find("{token_budget}") == std::string::npos);
  CHECK(p1.text.find("{question}") == std::string::npos);
  CHECK_THROWS_AS(render_prompt(task, 0), std::invalid_argument);
}

TEST_CASE("render_prompt is byte-stable") {
  const auto task = make_task(7, 2, Op::kSub, Difficulty::kEasy);
  const auto a = render_prompt(task, 8);
  const auto b = render_prompt(task, 8);
  CHECK(a.text == b.text);
  CHECK(a.text ==
        "A conversation between User and Assistant. The user asks a question, "
        "and the Assistant solves it. The assistant first thinks about the "
        "reasoning process in the mind and then provides the user with the "
        "answer. The reasoning process and answer are enclosed within "
        "<think></think> and <answer></answer> tags, respectively, i.e., "
        "<think>reasoning process here</think> <answer>answer here</answer>. "
        "IMPORTANT: You should use exactly 8 tokens in your response. "
        "User: 7 - 2 = ? Assistant:");
}

TEST_CASE("evaluate scores token sequences against the gold answer") {
  const auto vocab = Vocabulary::arithmetic();
  const auto task = make_task(3, 4, Op::kMul, Difficulty::kEasy);
  CHECK(evaluate(vocab,
                 vocab.tokenize("<think>3*4=12</think><answer>12</answer>"),
                 task) == 1);
  CHECK(evaluate(vocab, vocab.tokenize("12"), task) == 0);  // no tags
  CHECK(evaluate(vocab, vocab.tokenize("<answer>012</answer>"), task) == 1);
  CHECK(evaluate(vocab, vocab.tokenize("<answer>13</answer>"), task) == 0);
  CHECK(evaluate(vocab, std::vector<int>{vocab.eos_id()}, task) == 0);
}

TEST_CASE("evaluate ignores think-span contents") {
  const auto vocab = Vocabulary::arithmetic();
  Rng rng(31415);
  const auto task = make_task(5, 6, Op::kAdd, Difficulty::kEasy);
  // tag-free junk drawn from digits, operators, '=', and space
  const std::string fillers = "0123456789+-*= ";
  for (int i = 0; i < 200; ++i) {
    std::string junk;
    const int len = static_cast<int>(rng.uniform_int(0, 12));
    for (int j = 0; j < len; ++j) {
      junk += fillers[rng.uniform_int(0, static_cast<int>(fillers.size()) - 1)];
    }
    const std::string text =
        "<think>" + junk + "</think><answer>11</answer>";
    CHECK(evaluate(vocab, vocab.tokenize(text), task) == 1);
  }
}

TEST_CASE("task features encode the gold answer digits") {
  const auto f12 = task_features(make_task(3, 4, Op::kMul, Difficulty::kEasy));
  REQUIRE(static_cast<int>(f12.size()) == kTaskFeatureDim);
  CHECK(f12[2] == 1.0);       // ones digit 2
  CHECK(f12[10 + 1] == 1.0);  // tens digit 1
  CHECK(f12[20 + 1] == 1.0);  // two digits
  CHECK(f12[24] == 0.0);      // nonnegative

  const auto fneg = task_features(make_task(2, 7, Op::kSub, Difficulty::kEasy));
  CHECK(fneg[5] == 1.0);      // |-5| ones digit
  CHECK(fneg[10 + 0] == 1.0); // tens digit 0
  CHECK(fneg[20 + 0] == 1.0); // one digit
  CHECK(fneg[24] == 1.0);     // negative

  const auto fbig =
      task_features(make_task(99, 99, Op::kMul, Difficulty::kHard));
  CHECK(fbig[1] == 1.0);      // 9801: ones 1
  CHECK(fbig[10 + 0] == 1.0); // tens 0
  CHECK(fbig[20 + 3] == 1.0); // four digits
}

TEST_CASE("make_context wires budget and cap") {
  const auto task = make_task(1, 2, Op::kAdd, Difficulty::kEasy);
  const auto ctx = make_context(task, 8);
  CHECK(ctx.budget == 8);
  CHECK(ctx.max_len == 16);
  CHECK(static_cast<int>(ctx.task_features.size()) == kTaskFeatureDim);
  CHECK_THROWS_AS(make_context(task, 0), std::invalid_argument);
}

TEST_CASE("task sets round-trip through the tab-separated format") {
  Rng rng(2024);
  std::vector<ArithmeticTask> tasks;
  for (int i = 0; i < 50; ++i) {
    tasks.push_back(gen_task(rng, i % 2 == 0 ? Difficulty::kEasy
                                             : Difficulty::kHard));
  }
  std::ostringstream os;
  write_tasks(os, tasks);
  std::istringstream is(os.str());
  const auto loaded = read_tasks(is);
  REQUIRE(loaded.size() == tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    CHECK(loaded[i].operand_a == tasks[i].operand_a);
    CHECK(loaded[i].operand_b == tasks[i].operand_b);
    CHECK(loaded[i].op == tasks[i].op);
    CHECK(loaded[i].gold_answer == tasks[i].gold_answer);
  }
}

TEST_CASE("task import rejects bad lines") {
  std::istringstream missing_field("3\t+\t4\n");
  CHECK_THROWS_AS(read_tasks(missing_field), std::runtime_error);
  std::istringstream bad_gold("3\t+\t4\t8\n");
  CHECK_THROWS_AS(read_tasks(bad_gold), std::runtime_error);
  std::istringstream bad_op("3\t%\t4\t7\n");
  CHECK_THROWS_AS(read_tasks(bad_op), std::runtime_error);
  std::istringstream bad_int("x\t+\t4\t4\n");
  CHECK_THROWS_AS(read_tasks(bad_int), std::runtime_error);
  std::istringstream ok("3\t+\t4\t7\n\n2\t*\t5\t10\n");
  CHECK(read_tasks(ok).size() == 2);
}
