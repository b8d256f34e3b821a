#include "wavebound/errors.hpp"

namespace wavebound {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::range: return "range";
    case ErrorKind::domain: return "domain";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::resource: return "resource";
    case ErrorKind::structure: return "structure";
    case ErrorKind::verification: return "verification";
  }
  return "unknown";
}

}  // namespace wavebound
