#pragma once

#include <stdexcept>
#include <string>

namespace spnjd {

/// Malformed or out-of-theory model description. `field()` carries the
/// document path of the offending entry (e.g. "transitions[2].rate").
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Unparseable model document text.
class SyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a numerical engine (cap exceeded, blow-up, internal fault).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spnjd
