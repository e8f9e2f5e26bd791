#pragma once

#include <stdexcept>
#include <string>

namespace sertk {

// Bad input or a violated call contract. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed. The CLI maps this to exit code 2.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& message) {
  if (!cond) throw InputError(message);
}

inline void ensure(bool cond, const std::string& message) {
  if (!cond) throw InvariantError(message);
}

}  // namespace sertk
