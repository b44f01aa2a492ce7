#ifndef SCV_ERROR_HPP
#define SCV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace scv {

/// Precondition violated by a caller (bad dims, k out of range, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated file contents.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A dense volume would exceed the configured element budget.
class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string &what) {
  if (!cond)
    throw InvalidArgument(what);
}

} // namespace detail
} // namespace scv

#endif // SCV_ERROR_HPP
