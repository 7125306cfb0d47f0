#pragma once

#include <stdexcept>
#include <string>

namespace evt {

// Base of all library errors. `code()` is a stable machine-readable tag; the
// CLI prints it on its own line before the human-readable message.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// A distribution or model parameter violates its validity constraints.
class invalid_parameter : public error {
 public:
  explicit invalid_parameter(const std::string& msg)
      : error("invalid-parameter", msg) {}
};

// An argument (probability, tuning parameter, ...) is outside its contract.
class invalid_argument : public error {
 public:
  explicit invalid_argument(const std::string& msg)
      : error("invalid-argument", msg) {}
};

// Blocking produced no usable sample (e.g. block size exceeds the series).
class empty_sample : public error {
 public:
  explicit empty_sample(const std::string& msg) : error("empty-sample", msg) {}
};

// The sample cannot identify the model (too few distinct values, all zero...).
class degenerate_sample : public error {
 public:
  explicit degenerate_sample(const std::string& msg)
      : error("degenerate-sample", msg) {}
};

// Sample moments hit a removable singularity of the moment equations.
class degenerate_moments : public error {
 public:
  explicit degenerate_moments(const std::string& msg)
      : error("degenerate-moments", msg) {}
};

// An order statistic that must be positive is not.
class positivity_error : public error {
 public:
  explicit positivity_error(const std::string& msg)
      : error("positivity", msg) {}
};

class insufficient_exceedances : public error {
 public:
  explicit insufficient_exceedances(const std::string& msg)
      : error("insufficient-exceedances", msg) {}
};

class threshold_too_low : public error {
 public:
  explicit threshold_too_low(const std::string& msg)
      : error("threshold-too-low", msg) {}
};

class invalid_threshold : public error {
 public:
  explicit invalid_threshold(const std::string& msg)
      : error("invalid-threshold", msg) {}
};

// The ground-truth catalog has no entry for this spec.
class unsupported_truth : public error {
 public:
  explicit unsupported_truth(const std::string& msg)
      : error("unsupported-truth", msg) {}
};

// A tail target was requested inside the observed range (p >= k/n).
class extrapolation_error : public error {
 public:
  explicit extrapolation_error(const std::string& msg)
      : error("extrapolation-direction", msg) {}
};

}  // namespace evt
