#pragma once

#include <stdexcept>
#include <string>

namespace aptlab {

/// Bad input: parameters outside the model's domain, malformed configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model definition produced an inconsistent kernel at run time
/// (probabilities outside [0,1], sums away from one).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite states, exhausted caches, failed quadrature.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace aptlab
