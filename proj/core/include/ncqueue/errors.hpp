#pragma once

#include <stdexcept>
#include <string>

namespace ncq {

// Bad input file / bad parameter combination. CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Tolerance not reachable, diverging series, singular solve. Exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ncq
