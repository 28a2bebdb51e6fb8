#pragma once

#include <stdexcept>
#include <string>

namespace mindim {

// Malformed or inconsistent input data.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured degree, element, enumeration or time budget was exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameters outside the documented domain of an operation.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A self-check failed; indicates a bug or corrupted data.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mindim
