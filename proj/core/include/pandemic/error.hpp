#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pandemic {

enum class Errc {
  InvalidArgument,
  NonFinite,
  NegativityViolation,
  DivisionByZero,
  LengthMismatch,
  DegenerateCosts,
  InconsistentStorage,
  SolverNotConverged,
  EmptySubset,
  NoFrugalIndex,
  AmbiguousFrugalIndex,
  InstanceTooLarge,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace pandemic
