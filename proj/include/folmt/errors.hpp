#ifndef FOLMT_ERRORS_HPP
#define FOLMT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace folmt {

// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A redex no longer matches the formula it is applied to.
class StaleRedex : public Error {
 public:
  using Error::Error;
};

class NotFresh : public Error {
 public:
  using Error::Error;
};

class NotPresent : public Error {
 public:
  using Error::Error;
};

// Raised when the normalization step budget is exhausted. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

class RateLimited : public TransportError {
 public:
  RateLimited(const std::string& what, double retry_after_seconds)
      : TransportError(what), retry_after_(retry_after_seconds) {}
  double retry_after() const noexcept { return retry_after_; }

 private:
  double retry_after_;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

}  // namespace folmt

#endif  // FOLMT_ERRORS_HPP
