#include "budgetrl/vocab.hpp"

#include <stdexcept>

namespace budgetrl {

Vocabulary Vocabulary::arithmetic() {
  std::vector<std::string> tokens = {
      "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
      "+", "-", "*", "=", " ",
      "<think>", "</think>", "<answer>", "</answer>",
      ""  // end-of-sequence; renders as nothing
  };
  const int eos = static_cast<int>(tokens.size()) - 1;
  return Vocabulary("arith-v1", std::move(tokens), eos);
}

Vocabulary::Vocabulary(std::string name, std::vector<std::string> tokens,
                       int eos_id)
    : name_(std::move(name)), tokens_(std::move(tokens)), eos_id_(eos_id) {
  if (tokens_.empty() || tokens_.size() > 32) {
    throw std::invalid_argument("vocabulary size must be in [1, 32]");
  }
  if (eos_id_ < 0 || eos_id_ >= size()) {
    throw std::invalid_argument("eos id out of range");
  }
}

std::optional<int> Vocabulary::id_of(std::string_view token) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens_[i] == token) return i;
  }
  return std::nullopt;
}

int Vocabulary::digit_id(int digit) const {
  if (digit < 0 || digit > 9) throw std::invalid_argument("digit out of range");
  const auto id = id_of(std::string(1, static_cast<char>('0' + digit)));
  if (!id) throw std::invalid_argument("vocabulary has no digit tokens");
  return *id;
}

std::string Vocabulary::detokenize(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id < 0 || id >= size()) {
      throw std::invalid_argument("token id out of range");
    }
    out += tokens_[id];
  }
  return out;
}

std::vector<int> Vocabulary::tokenize(std::string_view text) const {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (int i = 0; i < size(); ++i) {
      const std::string& tok = tokens_[i];
      if (tok.empty() || tok.size() < best_len) continue;
      if (text.compare(pos, tok.size(), tok) == 0 && tok.size() > best_len) {
        best = i;
        best_len = tok.size();
      }
    }
    if (best < 0) throw std::invalid_argument("text not representable");
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

}  // namespace budgetrl
