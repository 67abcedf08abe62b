#include "budgetrl/tagparse.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <vector>

namespace budgetrl::tagparse {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

std::vector<std::size_t> find_all(std::string_view text, std::string_view tag) {
  std::vector<std::size_t> out;
  std::size_t pos = text.find(tag);
  while (pos != std::string_view::npos) {
    out.push_back(pos);
    pos = text.find(tag, pos + 1);
  }
  return out;
}

// Candidate pair for one tag kind: exactly one open and one close event over
// the whole text, open before close.
struct Candidate {
  bool ok = false;
  std::size_t extent_begin = 0;  // start of the open tag
  std::size_t extent_end = 0;    // one past the close tag
  Span contents;
};

Candidate scan_pair(std::string_view text, std::string_view open,
                    std::string_view close) {
  const auto opens = find_all(text, open);
  const auto closes = find_all(text, close);
  Candidate c;
  if (opens.size() != 1 || closes.size() != 1 || opens[0] >= closes[0]) {
    return c;
  }
  c.ok = true;
  c.extent_begin = opens[0];
  c.extent_end = closes[0] + close.size();
  c.contents = Span{opens[0] + open.size(), closes[0]};
  return c;
}

}  // namespace

ParsedCompletion parse_completion(std::string_view text) {
  // "<think>" occurrences also match inside "</think>"? They cannot: the
  // close tag differs at its second character, so the two literals never
  // overlap and counting is unambiguous.
  Candidate think = scan_pair(text, kThinkOpen, kThinkClose);
  Candidate answer = scan_pair(text, kAnswerOpen, kAnswerClose);

  if (think.ok && answer.ok) {
    // Structural separation requires the think pair to fully precede the
    // answer pair; overlapping or reversed pairs are malformed as a whole.
    if (think.extent_end > answer.extent_begin) {
      think.ok = false;
      answer.ok = false;
    }
  }

  ParsedCompletion pc;
  pc.raw_text = std::string(text);
  pc.has_think = think.ok;
  pc.has_answer = answer.ok;
  if (think.ok) pc.think_span = think.contents;
  if (answer.ok) pc.answer_span = answer.contents;
  return pc;
}

std::optional<std::string> extract_answer(const ParsedCompletion& pc) {
  if (!pc.has_answer) return std::nullopt;
  std::string_view s = pc.answer_text();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

namespace {

// All digit accumulation happens in unsigned __int128 with an explicit cap so
// equality stays exact; anything wider than 64 bits after reduction is
// treated as unparsable.
constexpr unsigned __int128 kMagnitudeCap =
    static_cast<unsigned __int128>(0x7fffffffffffffffull);

bool accumulate_digits(std::string_view digits, unsigned __int128& value) {
  for (char ch : digits) {
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + static_cast<unsigned>(ch - '0');
    if (value > kMagnitudeCap * 10) return false;
  }
  return true;
}

struct SignedMag {
  bool negative = false;
  unsigned __int128 mag = 0;
};

// [sign] digits — plain integer, used for fraction parts.
std::optional<SignedMag> parse_integer(std::string_view s) {
  SignedMag out;
  if (!s.empty() && s.front() == '-') {
    out.negative = true;
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  if (!accumulate_digits(s, out.mag)) return std::nullopt;
  return out;
}

std::optional<Rational> make_rational(bool negative, unsigned __int128 num,
                                      unsigned __int128 den) {
  if (den == 0) return std::nullopt;
  // Reduce before the 64-bit range check so long renderings of small values
  // ("3.500000") survive.
  unsigned __int128 a = num, b = den;
  while (b != 0) {
    const unsigned __int128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  if (num > kMagnitudeCap || den > kMagnitudeCap) return std::nullopt;
  Rational out;
  out.num = negative ? -static_cast<long long>(num) : static_cast<long long>(num);
  out.den = static_cast<long long>(den);
  if (out.num == 0) out.den = 1;
  return out;
}

// [sign] digits [. digits] with at least one digit somewhere; no exponent.
std::optional<Rational> parse_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const std::size_t dot = s.find('.');
  std::string_view int_part = s.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view() : s.substr(dot + 1);
  if (frac_part.find('.') != std::string_view::npos) return std::nullopt;
  if (int_part.empty() && frac_part.empty()) return std::nullopt;

  // Trailing fractional zeros do not change the value; dropping them keeps
  // the positional expansion inside 64 bits.
  while (!frac_part.empty() && frac_part.back() == '0') {
    frac_part.remove_suffix(1);
  }
  if (frac_part.size() > 18) return std::nullopt;

  unsigned __int128 value = 0;
  if (!accumulate_digits(int_part, value)) return std::nullopt;
  unsigned __int128 den = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
  unsigned __int128 frac = 0;
  if (!accumulate_digits(frac_part, frac)) return std::nullopt;
  value = value * den + frac;
  if (value > kMagnitudeCap * 10) return std::nullopt;
  return make_rational(negative, value, den);
}

}  // namespace

std::optional<Rational> parse_number(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  // Trim, then drop thousands separators everywhere.
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  for (std::size_t i = b; i < e; ++i) {
    if (text[i] != ',') s.push_back(text[i]);
  }
  std::string_view v = s;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return std::nullopt;

  const std::size_t slash = v.find('/');
  if (slash != std::string_view::npos) {
    if (v.find('/', slash + 1) != std::string_view::npos) return std::nullopt;
    const auto p = parse_integer(v.substr(0, slash));
    const auto q = parse_integer(v.substr(slash + 1));
    if (!p || !q || q->mag == 0) return std::nullopt;
    return make_rational(p->negative != q->negative, p->mag, q->mag);
  }
  return parse_decimal(v);
}

int verify_answer(std::string_view candidate, std::string_view gold) {
  const auto c = parse_number(candidate);
  const auto g = parse_number(gold);
  if (!c || !g) return 0;
  // Exact cross-multiplication; both sides fit in 64 bits, the products in
  // 128.
  const __int128 lhs = static_cast<__int128>(c->num) * g->den;
  const __int128 rhs = static_cast<__int128>(g->num) * c->den;
  return lhs == rhs ? 1 : 0;
}

}  // namespace budgetrl::tagparse
