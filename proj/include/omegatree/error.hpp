#pragma once

#include <stdexcept>
#include <string>

namespace omt {

// Malformed input or violated precondition.
class invalid_input : public std::invalid_argument {
public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// A computation would exceed a configured budget (group order, game states, node count).
class resource_error : public std::runtime_error {
public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace omt
