#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace budgetrl::tagparse {

// Half-open character range [begin, end) into the raw completion text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Structural decomposition of one generated completion. The indicator for a
// tag kind is 1 only when the text contains exactly one well-formed pair of
// that kind: absent, unclosed, nested, or duplicated pairs all clear it. If
// both kinds are individually well-formed but their extents overlap or the
// answer pair precedes the think pair, the combined structure is malformed
// and both indicators are cleared. Span fields hold the contents between the
// tags and are present iff the matching indicator is set.
struct ParsedCompletion {
  std::string raw_text;
  std::optional<Span> think_span;
  std::optional<Span> answer_span;
  bool has_think = false;
  bool has_answer = false;

  std::string_view think_text() const {
    return has_think ? std::string_view(raw_text).substr(
                           think_span->begin, think_span->end - think_span->begin)
                     : std::string_view();
  }
  std::string_view answer_text() const {
    return has_answer
               ? std::string_view(raw_text).substr(
                     answer_span->begin, answer_span->end - answer_span->begin)
               : std::string_view();
  }
};

// Total over arbitrary text; malformed structure yields cleared indicators,
// never an error. Tag matching is literal and case-sensitive.
ParsedCompletion parse_completion(std::string_view text);

// Answer span contents with surrounding ASCII whitespace trimmed, or absent
// when the completion has no well-formed answer pair.
std::optional<std::string> extract_answer(const ParsedCompletion& pc);

// Exact rational value num/den with den > 0, gcd(|num|, den) = 1.
struct Rational {
  long long num = 0;
  long long den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Parses an integer, decimal, or fraction `p/q` (q != 0) into an exact
// rational. Normalization: trim whitespace, strip thousands separators ',',
// strip one leading '+'. Scientific notation is rejected, as is anything
// whose reduced numerator or denominator exceeds 64 bits (trailing zeros in
// a fractional part are dropped before expansion, so e.g. "42.000" stays in
// range). Returns nullopt for every unparsable input.
std::optional<Rational> parse_number(std::string_view text);

// c = 1 iff candidate parses and equals gold in exact rational value.
// Unparsable candidates (or gold) give 0.
int verify_answer(std::string_view candidate, std::string_view gold);

}  // namespace budgetrl::tagparse
