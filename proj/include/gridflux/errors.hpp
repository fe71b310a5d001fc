#pragma once

#include <stdexcept>
#include <string>

namespace gridflux {

// Invalid configuration or violated precondition on user-supplied input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file did not match the documented schema (CSV header, checkpoint shape).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridflux
