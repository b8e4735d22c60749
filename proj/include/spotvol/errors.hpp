#pragma once

#include <stdexcept>
#include <string>

namespace spotvol {

// Rejected input: bad parameters, malformed files, inconsistent shapes.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation produced NaN/Inf or otherwise broke a numerical contract.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace spotvol
