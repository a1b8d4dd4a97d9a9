#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freecalc {

/// Base class of every error raised by the library. The CLI maps the
/// concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FREECALC_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* kind() const noexcept override { return #Name; }     \
  }

FREECALC_DEFINE_ERROR(InvalidInput);
FREECALC_DEFINE_ERROR(ConditioningError);
FREECALC_DEFINE_ERROR(ArityError);
FREECALC_DEFINE_ERROR(RangeError);
FREECALC_DEFINE_ERROR(DilationError);
FREECALC_DEFINE_ERROR(StallError);
FREECALC_DEFINE_ERROR(DemoInsufficient);

#undef FREECALC_DEFINE_ERROR

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  const char* kind() const noexcept override { return "SyntaxError"; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when an `inv(...)` node meets a singular or over-conditioned
/// operand. Carries the printed subexpression.
class SingularError : public Error {
 public:
  SingularError(std::string subexpr, double cond)
      : Error("singular inverse in subexpression '" + subexpr +
              "' (condition number " + std::to_string(cond) + ")"),
        subexpr_(std::move(subexpr)),
        cond_(cond) {}
  const char* kind() const noexcept override { return "SingularError"; }
  const std::string& subexpr() const noexcept { return subexpr_; }
  double cond() const noexcept { return cond_; }

 private:
  std::string subexpr_;
  double cond_;
};

}  // namespace freecalc
