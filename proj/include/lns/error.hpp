#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lns {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A symbol occurs in two signatures with different arities, so their union
/// is undefined.
class ArityClash : public Error {
public:
  ArityClash(std::string symbol, std::size_t left, std::size_t right)
      : Error("arity clash on '" + symbol + "': " + std::to_string(left) +
              " vs " + std::to_string(right)),
        symbol_(std::move(symbol)), left_(left), right_(right) {}

  const std::string& symbol() const noexcept { return symbol_; }
  std::size_t left_arity() const noexcept { return left_; }
  std::size_t right_arity() const noexcept { return right_; }

private:
  std::string symbol_;
  std::size_t left_;
  std::size_t right_;
};

/// The label dependency graph of a TSS has a cycle through a negative premise.
class NotStratifiable : public Error {
public:
  explicit NotStratifiable(std::vector<std::string> cycle)
      : Error("TSS is not stratifiable: " + render(cycle)), cycle_(std::move(cycle)) {}

  /// Labels along the offending cycle; the first label is repeated at the end.
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
  static std::string render(const std::vector<std::string>& cycle) {
    std::string out;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i != 0) out += " -> ";
      out += cycle[i];
    }
    return out;
  }
  std::vector<std::string> cycle_;
};

class DerivationError : public Error {
public:
  enum class Kind { NonGroundConclusion, NonGroundPremise, DepthExceeded };

  DerivationError(Kind kind, std::string message)
      : Error(std::move(message)), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// Subset construction exceeded the configured state cap.
class AutomatonTooLarge : public Error {
public:
  explicit AutomatonTooLarge(std::size_t cap)
      : Error("automaton exceeds " + std::to_string(cap) + " states"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t cap_;
};

/// An argument of exec / verify / labels has the wrong sort at activation
/// (a regex where a language is expected, a name where a term is expected...).
class StuckTypeError : public Error {
public:
  using Error::Error;
};

/// Location-carrying error from the system-file reader.
class SourceError : public Error {
public:
  SourceError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ParseError : public SourceError {
public:
  using SourceError::SourceError;
};

class ValidationError : public SourceError {
public:
  using SourceError::SourceError;
};

} // namespace lns
