#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l3svm {

/// Base class for every error raised by the library.
class l3svm_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed LIBSVM text. Carries the 1-based line number (0 when not tied to a line).
class parse_error : public l3svm_error {
  public:
    parse_error(std::size_t line, const std::string &what)
        : l3svm_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Vector or matrix shapes that do not agree.
class dimension_error : public l3svm_error {
  public:
    using l3svm_error::l3svm_error;
};

/// A parameter outside its documented domain.
class invalid_argument_error : public l3svm_error {
  public:
    using l3svm_error::l3svm_error;
};

/// Model documents that cannot be loaded.
class model_format_error : public l3svm_error {
  public:
    using l3svm_error::l3svm_error;
};

class unsupported_version_error : public model_format_error {
  public:
    using model_format_error::model_format_error;
};

}  // namespace l3svm
