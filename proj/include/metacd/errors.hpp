#pragma once

#include <stdexcept>

namespace metacd {

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical routine could not deliver a trustworthy result. Exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace metacd
