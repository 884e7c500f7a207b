#ifndef LEVYCB_ERRORS_HPP
#define LEVYCB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace levycb {

// Parameter or contract violation (bad spec, rejected input).
class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Evaluation outside the declared complex strip.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Quadrature / solver / branch-tracking failure.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file / schema problems (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace levycb

#endif
