#include "bb/errors.h"

namespace bb {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument: return "ArgumentError";
    case ErrorKind::io: return "IoError";
    case ErrorKind::ingest: return "IngestError";
    case ErrorKind::key: return "KeyError";
    case ErrorKind::format: return "FormatError";
    case ErrorKind::range: return "RangeError";
    case ErrorKind::coverage: return "CoverageError";
    case ErrorKind::capacity: return "CapacityError";
    case ErrorKind::dimension: return "DimensionError";
    case ErrorKind::state: return "StateError";
    case ErrorKind::gateway: return "GatewayError";
    case ErrorKind::template_: return "TemplateError";
    case ErrorKind::anchor_format: return "AnchorFormatError";
    case ErrorKind::degenerate: return "DegenerateError";
    case ErrorKind::shape: return "ShapeError";
    case ErrorKind::deadline: return "DeadlineError";
  }
  return "Error";
}

}  // namespace bb
