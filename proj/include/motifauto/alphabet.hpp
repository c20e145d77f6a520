#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "motifauto/errors.hpp"
#include "motifauto/rational.hpp"

namespace motifauto {

/// Characters with meaning in pattern text or in class labels; never alphabet symbols.
inline constexpr std::string_view kReservedCharacters = "{}|#'_.,*:+()0123456789";

/// Ordered character set with an exact probability per character (a memoryless source).
class Alphabet {
 public:
  Alphabet(std::string symbols, std::vector<Rational> probs)
      : symbols_(std::move(symbols)), probs_(std::move(probs)) {
    index_.fill(-1);
    if (symbols_.size() < 2) throw InvalidArgumentError("alphabet needs at least 2 symbols");
    if (probs_.size() != symbols_.size())
      throw InvalidArgumentError("alphabet: one probability per symbol is required");
    Rational total = 0;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const char c = symbols_[i];
      const auto u = static_cast<unsigned char>(c);
      if (u <= 32 || u >= 127 || kReservedCharacters.find(c) != std::string_view::npos)
        throw InvalidArgumentError(std::string("alphabet: symbol '") + c + "' is reserved");
      if (index_[u] >= 0) throw InvalidArgumentError(std::string("alphabet: duplicate symbol '") + c + "'");
      index_[u] = static_cast<int>(i);
      if (probs_[i] <= 0)
        throw InvalidArgumentError(std::string("alphabet: probability of '") + c + "' must be positive");
      total += probs_[i];
    }
    if (total != 1) throw InvalidArgumentError("alphabet: probabilities sum to " + to_string(total) + ", not 1");
  }

  static Alphabet uniform(std::string symbols) {
    std::vector<Rational> probs(symbols.size(), Rational(1, static_cast<unsigned long>(symbols.size())));
    return Alphabet(std::move(symbols), std::move(probs));
  }

  /// Binary alphabet {a, b} with Prob(a) = p.
  static Alphabet binary(const Rational& p) { return Alphabet("ab", {p, 1 - p}); }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbols() const noexcept { return symbols_; }
  char symbol(std::size_t i) const { return symbols_.at(i); }
  const Rational& prob(std::size_t i) const { return probs_.at(i); }
  const std::vector<Rational>& probs() const noexcept { return probs_; }

  bool contains(char c) const noexcept { return index_[static_cast<unsigned char>(c)] >= 0; }

  std::size_t index(char c) const {
    const int i = index_[static_cast<unsigned char>(c)];
    if (i < 0) throw UnknownCharacterError(c);
    return static_cast<std::size_t>(i);
  }

  /// Probability of a whole word under the memoryless source.
  Rational word_prob(std::string_view word) const {
    Rational out = 1;
    for (char c : word) out *= probs_[index(c)];
    return out;
  }

 private:
  std::string symbols_;
  std::vector<Rational> probs_;
  std::array<int, 256> index_{};
};

}  // namespace motifauto
