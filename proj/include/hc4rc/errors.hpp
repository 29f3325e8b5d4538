#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hc4rc {

// Input could not be loaded or parsed. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem with a row/line of an input file. `where` names the unit ("row",
// "line") and `position` is 1-based (0 = unknown).
class ParseError : public DataError {
 public:
  ParseError(std::string kind, const char* where, std::size_t position, const std::string& what)
      : DataError(kind + (position ? std::string{" at "} + where + " " + std::to_string(position) : std::string{}) +
                  ": " + what),
        kind_(std::move(kind)),
        line_(position) {}

  const std::string& kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string kind_;
  std::size_t line_;
};

// A run that cannot produce a model (e.g. a fold with an empty vocabulary).
// CLI maps this to exit code 4.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user configuration. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition (mismatched lengths/dimensions,
// non-finite input, out-of-range indices).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hc4rc
