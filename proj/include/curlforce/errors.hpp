#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace curlforce {

/// Byte offsets [begin, end) into an expression source string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Coarse failure class. The CLI maps these onto process exit codes.
enum class ErrorCategory {
  usage,      // exit 1
  input,      // exit 2
  numerical,  // exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed expression, unknown identifier or bad arity.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, Span span)
      : Error(ErrorCategory::input, message + " at " + std::to_string(span.begin) + ".." +
                                        std::to_string(span.end)),
        span_(span) {}

  Span span() const noexcept { return span_; }

 private:
  Span span_;
};

/// Evaluation outside a function's domain, division by zero or overflow.
class EvalError : public Error {
 public:
  EvalError(const std::string& message, Span span)
      : Error(ErrorCategory::numerical, message + " at " + std::to_string(span.begin) + ".." +
                                            std::to_string(span.end)),
        span_(span) {}

  Span span() const noexcept { return span_; }

 private:
  Span span_;
};

/// A query point (or integrated state) left the declared field domain.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, Eigen::VectorXd point)
      : Error(ErrorCategory::numerical, message), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const noexcept { return point_; }

 private:
  Eigen::VectorXd point_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorCategory::numerical, message) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error(ErrorCategory::input, message) {}
};

}  // namespace curlforce
