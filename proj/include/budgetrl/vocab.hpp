#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace budgetrl {

// Small atomic-symbol vocabulary. Each tag is a single token; detokenization
// is plain concatenation (the vocabulary carries an explicit space token, and
// the end-of-sequence token renders as the empty string).
class Vocabulary {
 public:
  // Digits 0-9, operators + - *, '=', space, the four structural tags, and
  // end-of-sequence. 20 tokens.
  static Vocabulary arithmetic();

  Vocabulary(std::string name, std::vector<std::string> tokens, int eos_id);

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(tokens_.size()); }
  int eos_id() const { return eos_id_; }
  const std::string& token(int id) const { return tokens_[id]; }
  std::optional<int> id_of(std::string_view token) const;

  int digit_id(int digit) const;  // arithmetic vocabulary helper

  std::string detokenize(std::span<const int> ids) const;

  // Token ids for a piece of text composed of vocabulary symbols (greedy
  // longest match); throws if the text is not representable. Test helper.
  std::vector<int> tokenize(std::string_view text) const;

 private:
  std::string name_;
  std::vector<std::string> tokens_;
  int eos_id_;
};

}  // namespace budgetrl
