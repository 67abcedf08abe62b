#include "budgetrl/tagparse.hpp"

#include <doctest.h>

#include <string>
#include <vector>

#include "budgetrl/rng.hpp"
#include "test_support.hpp"

using namespace budgetrl;
using namespace budgetrl::tagparse;

TEST_CASE("parse_completion well-formed completion") {
  const auto pc = parse_completion("<think>2+2=4</think> <answer>4</answer>");
  CHECK(pc.has_think);
  CHECK(pc.has_answer);
  CHECK(pc.think_text() == "2+2=4");
  CHECK(pc.answer_text() == "4");
}

TEST_CASE("parse_completion empty string") {
  const auto pc = parse_completion("");
  CHECK_FALSE(pc.has_think);
  CHECK_FALSE(pc.has_answer);
  CHECK_FALSE(pc.think_span.has_value());
  CHECK_FALSE(pc.answer_span.has_value());
}

TEST_CASE("parse_completion nested think pair is malformed") {
  // frozen from the event-scan oracle: two think opens break well-formedness
  const std::string text = "<think>a<think>b</think></think><answer>4</answer>";
  const auto oracle = testsupport::scan_tags(text);
  CHECK_FALSE(oracle.has_think);
  CHECK(oracle.has_answer);

  const auto pc = parse_completion(text);
  CHECK(pc.has_think == oracle.has_think);
  CHECK(pc.has_answer == oracle.has_answer);
  CHECK(pc.answer_text() == "4");
}

TEST_CASE("parse_completion agrees with the event-scan oracle on crafted text") {
  const std::vector<std::string> cases = {
      "<think>x</think><answer>1</answer>",
      "<think>x</think>junk<answer>1</answer>trailing",
      "leading<think>x</think> <answer>1</answer>",
      "<think>unclosed <answer>1</answer>",
      "no tags at all",
      "<answer>1</answer>",              // answer only
      "<think>x</think>",                // think only
      "</think>x<think>",                // reversed close/open
      "<think>a</think><think>b</think><answer>1</answer>",  // duplicate think
      "<answer>1</answer><answer>2</answer>",                // duplicate answer
      "<answer>1</answer><think>x</think>",    // answer before think
      "<think>a<answer>1</answer>b</think>",   // answer inside think
      "<answer>a<think>x</think>b</answer>",   // think inside answer
      "<think><answer></think></answer>",      // interleaved
      "<think></think><answer></answer>",      // empty spans
      "<<think>>x</think><answer>1</answer>",  // extra angle brackets
  };
  for (const auto& text : cases) {
    CAPTURE(text);
    const auto oracle = testsupport::scan_tags(text);
    const auto pc = parse_completion(text);
    CHECK(pc.has_think == oracle.has_think);
    CHECK(pc.has_answer == oracle.has_answer);
    CHECK(pc.has_think == pc.think_span.has_value());
    CHECK(pc.has_answer == pc.answer_span.has_value());
    if (pc.has_think && pc.has_answer) {
      CHECK(pc.think_span->end <= pc.answer_span->begin);
    }
  }
}

TEST_CASE("parse_completion spans re-parse without producing new pairs") {
  const auto pc = parse_completion("<think>12*3</think><answer> 36 </answer>");
  REQUIRE(pc.has_think);
  REQUIRE(pc.has_answer);
  const auto inner_think = parse_completion(std::string(pc.think_text()));
  const auto inner_answer = parse_completion(std::string(pc.answer_text()));
  CHECK_FALSE(inner_think.has_think);
  CHECK_FALSE(inner_think.has_answer);
  CHECK_FALSE(inner_answer.has_think);
  CHECK_FALSE(inner_answer.has_answer);
}

TEST_CASE("extract_answer") {
  CHECK(extract_answer(parse_completion("<answer> 42 </answer>")) == "42");
  CHECK_FALSE(extract_answer(parse_completion("no tags here")).has_value());
  CHECK(extract_answer(parse_completion("<answer>3/4</answer>")) == "3/4");
  CHECK(extract_answer(parse_completion("<answer>\t-7 \n</answer>")) == "-7");
}

TEST_CASE("verify_answer examples") {
  CHECK(verify_answer("42", "42") == 1);
  CHECK(verify_answer("3.50", "3.5") == 1);   // 350/100 == 35/10
  CHECK(verify_answer("1/2", "0.5") == 1);    // 1/2 == 5/10
  CHECK(verify_answer("forty-two", "42") == 0);
}

TEST_CASE("verify_answer normalization rules") {
  CHECK(verify_answer("+42", "42") == 1);     // one leading plus
  CHECK(verify_answer("1,234", "1234") == 1); // thousands separators
  CHECK(verify_answer(" 12 ", "12") == 1);    // whitespace trim
  CHECK(verify_answer("012", "12") == 1);     // leading zeros
  CHECK(verify_answer("-0", "0") == 1);
  CHECK(verify_answer("-3/6", "-0.5") == 1);
  CHECK(verify_answer("3/-6", "-1/2") == 1);
  CHECK(verify_answer("1e3", "1000") == 0);   // scientific notation rejected
  CHECK(verify_answer("1/0", "1") == 0);      // zero denominator
  CHECK(verify_answer("", "0") == 0);
  CHECK(verify_answer("1/2/3", "1") == 0);
  CHECK(verify_answer("1.2.3", "1.2") == 0);
  CHECK(verify_answer("++5", "5") == 0);      // only one plus is stripped
  CHECK(verify_answer(".5", "1/2") == 1);
  CHECK(verify_answer("5.", "5") == 1);
  CHECK(verify_answer("42.000000000000000000000000", "42") == 1);
  CHECK(verify_answer("43", "42") == 0);
}

TEST_CASE("parse_number reduces and normalizes") {
  const auto r = parse_number("6/4");
  REQUIRE(r.has_value());
  CHECK(r->num == 3);
  CHECK(r->den == 2);
  const auto z = parse_number("-0.0");
  REQUIRE(z.has_value());
  CHECK(z->num == 0);
  CHECK(z->den == 1);
}

TEST_CASE("verify_answer matches construction-known truth on random pairs") {
  Rng rng(20240817);
  int equal_checked = 0, unequal_checked = 0;
  for (int i = 0; i < 10000; ++i) {
    testsupport::KnownRational value;
    value.num = rng.uniform_int(-999, 999);
    value.den = rng.uniform_int(1, 99);
    const std::string a = testsupport::render_rational(value, rng);
    const std::string b = testsupport::render_rational(value, rng);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(verify_answer(a, b) == 1);
    ++equal_checked;

    testsupport::KnownRational other;
    other.num = rng.uniform_int(-999, 999);
    other.den = rng.uniform_int(1, 99);
    if (!testsupport::same_value(value, other)) {
      const std::string c = testsupport::render_rational(other, rng);
      CAPTURE(c);
      CHECK(verify_answer(a, c) == 0);
      ++unequal_checked;
    }
  }
  CHECK(equal_checked == 10000);
  CHECK(unequal_checked > 9000);
}

TEST_CASE("verify_answer is symmetric in value") {
  Rng rng(77001);
  for (int i = 0; i < 2000; ++i) {
    testsupport::KnownRational v1{rng.uniform_int(-50, 50),
                                  rng.uniform_int(1, 20)};
    testsupport::KnownRational v2{rng.uniform_int(-50, 50),
                                  rng.uniform_int(1, 20)};
    const std::string a = testsupport::render_rational(v1, rng);
    const std::string b = testsupport::render_rational(v2, rng);
    CHECK(verify_answer(a, b) == verify_answer(b, a));
  }
  // also with unparsable operands
  CHECK(verify_answer("xyz", "1") == verify_answer("1", "xyz"));
}
