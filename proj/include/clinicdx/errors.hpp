#pragma once

#include <stdexcept>

namespace clinicdx {

// Base class for every failure the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clinicdx
