#pragma once

#include <stdexcept>
#include <string>

namespace rmdirac {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class domain_error : public error {
 public:
  using error::error;
};

class parameter_error : public error {
 public:
  using error::error;
};

class numerical_error : public error {
 public:
  using error::error;
};

class convergence_error : public numerical_error {
 public:
  convergence_error(const std::string& what, int terms_used)
      : numerical_error(what + " (terms used: " + std::to_string(terms_used) + ")"),
        terms_used_(terms_used) {}
  int terms_used() const noexcept { return terms_used_; }

 private:
  int terms_used_;
};

// Radicand of the delta exponent is negative: the ansatz exponent is complex.
class complex_exponent_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

class bracketing_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

class integration_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

class config_error : public error {
 public:
  config_error(const std::string& what, int line = 0, std::string field = {})
      : error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace rmdirac
