#pragma once

#include <stdexcept>
#include <string>

namespace biaslab {

/// A numerical routine failed to deliver its contract (non-convergence,
/// non-finite values, singular system, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An argument left the domain a routine requires (entropic positivity,
/// depth-potential interval, non-commuting measurements, ...).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Experiment configuration failed validation.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / serialization failure in the experiment harness.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace biaslab
