#include "ldp/error.hpp"

namespace ldp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::CutoffOverflow: return "cutoff-overflow";
    case ErrorKind::IllConditioned: return "ill-conditioned";
    case ErrorKind::SearchOverflow: return "search-overflow";
    case ErrorKind::RejectionExhausted: return "rejection-exhausted";
    case ErrorKind::NotInGamma: return "not-in-gamma";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace ldp
