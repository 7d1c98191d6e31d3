#pragma once

#include <stdexcept>
#include <string>

namespace procspec {

// Invalid user-supplied scenario or argument (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical kernel could not deliver the requested accuracy (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double worst_lo, double worst_hi,
                  double worst_error)
      : NumericalError(what),
        worst_lo_(worst_lo),
        worst_hi_(worst_hi),
        worst_error_(worst_error) {}

  double worst_lo() const { return worst_lo_; }
  double worst_hi() const { return worst_hi_; }
  double worst_error() const { return worst_error_; }

 private:
  double worst_lo_;
  double worst_hi_;
  double worst_error_;
};

// f(lo) and f(hi) have the same strict sign: the caller should apply the
// boundary case of whatever equation it was solving.
class NoSignChange : public NumericalError {
 public:
  NoSignChange(const std::string& what, double f_lo, double f_hi)
      : NumericalError(what), f_lo_(f_lo), f_hi_(f_hi) {}

  double f_lo() const { return f_lo_; }
  double f_hi() const { return f_hi_; }

 private:
  double f_lo_;
  double f_hi_;
};

}  // namespace procspec
