#pragma once

#include <stdexcept>
#include <string>

namespace scalenet {

// Malformed user input (files, configs, CLI arguments). The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scalenet
