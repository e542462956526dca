#pragma once

#include <stdexcept>

namespace drwps {

// Invalid argument passed to a library operation.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input document (edge lists, position lists, serialized filters).
// Messages carry a line number or byte offset where that makes sense.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation applied to an object whose state does not admit it, e.g. stepping
// a walk branch that is no longer active.
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Semantically invalid experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure to read or write a file; the message names the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace drwps
