#pragma once

#include <stdexcept>
#include <string>

namespace longterm {

// Error taxonomy mirrored by the CLI exit codes: config -> 2, data -> 3,
// estimation/inference -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DesignViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagnosticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace longterm
