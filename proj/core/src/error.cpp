#include "pandemic/error.hpp"

namespace pandemic {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NegativityViolation: return "NegativityViolation";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateCosts: return "DegenerateCosts";
    case Errc::InconsistentStorage: return "InconsistentStorage";
    case Errc::SolverNotConverged: return "SolverNotConverged";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::NoFrugalIndex: return "NoFrugalIndex";
    case Errc::AmbiguousFrugalIndex: return "AmbiguousFrugalIndex";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace pandemic
