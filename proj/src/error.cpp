#include "pbe_djm/error.hpp"

namespace pbe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivergentTail: return "DIVERGENT_TAIL";
    case ErrorCode::DivergentMoment: return "DIVERGENT_MOMENT";
    case ErrorCode::UnsupportedClass: return "UNSUPPORTED_CLASS";
    case ErrorCode::MixedRates: return "MIXED_RATES";
    case ErrorCode::MissingRadius: return "MISSING_RADIUS";
    case ErrorCode::TermBlowup: return "TERM_BLOWUP";
    case ErrorCode::UnknownExample: return "UNKNOWN_EXAMPLE";
    case ErrorCode::QuadratureFailure: return "QUADRATURE_FAILURE";
    case ErrorCode::Blowup: return "BLOWUP";
    case ErrorCode::NoExactSolution: return "NO_EXACT_SOLUTION";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace pbe
