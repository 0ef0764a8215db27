#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition or type invariant was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The implicit stage solve did not converge even at the step-size floor.
class StiffnessFailure : public Error {
 public:
  using Error::Error;
};

/// The integrator exceeded its step budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// No section crossing was found before the time limit.
class NoCrossing : public Error {
 public:
  using Error::Error;
};

/// A fixed-step integration produced a non-finite state.
class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

/// Every point of a sweep failed.
class SweepFailure : public Error {
 public:
  using Error::Error;
};

/// A regression could not be carried out (too few points, degenerate regressor).
class FitFailure : public Error {
 public:
  using Error::Error;
};

/// The image of a Poincare map left the cross-section.
class DomainEscape : public Error {
 public:
  using Error::Error;
};

/// A map was evaluated at its singular point x = 0.
class SingularInput : public Error {
 public:
  using Error::Error;
};

/// Too few samples landed in the tail window of a survival function.
class TailUndersampled : public Error {
 public:
  TailUndersampled(const std::string& what, std::size_t achieved_count)
      : Error(what), achieved_count_(achieved_count) {}

  std::size_t achieved_count() const noexcept { return achieved_count_; }

 private:
  std::size_t achieved_count_;
};

/// Monte-Carlo averages became non-finite.
class SimulationFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text; carries the 1-based line number (0 if not line specific).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace nlab
