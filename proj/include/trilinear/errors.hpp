#pragma once

#include <stdexcept>
#include <string>

namespace trilinear {

/// Base for every failure raised by the library. `module()` names the
/// component that raised it so front ends can tag diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not converge or left its validity regime.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace trilinear
