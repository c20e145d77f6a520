#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace motifauto {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed pattern text. `position()` is the 0-based offset of the problem.
class PatternSyntaxError : public Error {
 public:
  PatternSyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownCharacterError : public Error {
 public:
  explicit UnknownCharacterError(char c)
      : Error(std::string("character '") + c + "' is not in the alphabet"), character_(c) {}
  char character() const noexcept { return character_; }

 private:
  char character_;
};

class UnboundedPatternError : public Error {
 public:
  UnboundedPatternError() : Error("pattern contains an unbounded gap and has no finite expansion") {}
};

/// A configured size limit was hit. `cap()` names the limit.
class CapExceededError : public Error {
 public:
  CapExceededError(std::string cap, const std::string& detail)
      : Error(cap + " exceeded: " + detail), cap_(std::move(cap)) {}
  const std::string& cap() const noexcept { return cap_; }

 private:
  std::string cap_;
};

class ExpansionTooLargeError : public CapExceededError {
 public:
  explicit ExpansionTooLargeError(const std::string& detail)
      : CapExceededError("expansion-cap", detail) {}
};

class AlphabetMismatchError : public Error {
 public:
  using Error::Error;
};

class UnknownClassError : public Error {
 public:
  explicit UnknownClassError(const std::string& label)
      : Error("unknown terminal class '" + label + "'") {}
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an argument.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace motifauto
