#include "fusionkit/error.hpp"

namespace fusionkit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::NotADual: return "NotADual";
    case ErrorKind::NotInSubspace: return "NotInSubspace";
    case ErrorKind::SpanMismatch: return "SpanMismatch";
    case ErrorKind::NotAFrame: return "NotAFrame";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::EmptyBlock: return "EmptyBlock";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotAPerturbation: return "NotAPerturbation";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::BadDims: return "BadDims";
  }
  return "Unknown";
}

}  // namespace fusionkit
