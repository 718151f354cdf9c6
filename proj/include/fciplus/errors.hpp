#pragma once

#include <stdexcept>
#include <string>

namespace fciplus {

// Caller supplied something invalid: unknown ids, malformed files, bad flags.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The oracle's answers are inconsistent with any ancestral model
// (e.g. a tail and an arrowhead derived for the same endpoint).
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A reconstructed example failed one of its self-checks, or the generator ran
// out of attempts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fciplus
