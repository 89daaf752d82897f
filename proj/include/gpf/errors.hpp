#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpf {

/// Invalid numeric domain: non-finite entries, exponent out of range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shapes of operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A family of vectors that was required to be independent is not.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON input. `position` is the byte offset reported by the parser.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed input that violates a frame invariant. `field` is a JSON path
/// such as `triples[2].weight`.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gpf
