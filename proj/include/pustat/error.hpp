#ifndef PUSTAT_ERROR_HPP_
#define PUSTAT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pustat {

// Precondition violations on library calls are reported as
// std::invalid_argument. The two classes below carry meaning for the CLI
// exit status.

/// A malformed or inconsistent experiment configuration. `field()` names the
/// offending key (dotted path) when one can be identified.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A Monte Carlo estimate failed its stability check and the caller asked
/// for that to be fatal.
class NumericalInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pustat

#endif  // PUSTAT_ERROR_HPP_
