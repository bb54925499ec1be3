#pragma once

#include <stdexcept>
#include <string>

namespace comindex {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, unknown names, out-of-range options.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The input was well formed but the computation could not proceed
// (singular matrix, no convergence, nothing retained).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::string stage = {})
      : Error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Runs `fn`, labelling any unlabelled NumericalError with `stage`.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    if (!e.stage().empty()) throw;
    throw NumericalError(e.what(), stage);
  }
}

}  // namespace comindex
