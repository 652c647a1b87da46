#pragma once

#include <stdexcept>
#include <string>

namespace sparsenav {

// Bad or inconsistent configuration (encoder parameters, arena, route, run config).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The route script drove the robot into a wall while training.
class TrainingCollision : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// An operation was called on an object in the wrong state (empty store, frozen store, ...).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument errors use std::invalid_argument directly.

}  // namespace sparsenav
