#pragma once

#include <stdexcept>
#include <string>

namespace vsglab {

// Coarse error categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
  kConfig,        // invalid parameters or configuration
  kNumericFault,  // divergence or non-finite state
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidParams : Error {
  explicit InvalidParams(const std::string& what)
      : Error(ErrorKind::kConfig, "invalid-params: " + what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, "config-invalid: " + what) {}
};

struct NumericFault : Error {
  explicit NumericFault(const std::string& what)
      : Error(ErrorKind::kNumericFault, "numeric-fault: " + what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what)
      : Error(ErrorKind::kIo, "io-error: " + what) {}
};

}  // namespace vsglab
