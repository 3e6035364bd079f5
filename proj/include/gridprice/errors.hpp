#pragma once

#include <stdexcept>
#include <string>

namespace gridprice {

// Invalid scenario/config input: bad keys, out-of-range parameters.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Model-domain violation: negative price where none is allowed, no market
// equilibrium in the price bracket, malformed attack windows, and the like.
class model_error : public std::runtime_error {
 public:
  explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem/serialization failure while reading or writing artifacts.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridprice
