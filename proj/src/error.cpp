#include "asymlab/error.hpp"

namespace asymlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::RejectionLimit: return "rejection-limit";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace asymlab
