#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace bb {

// Every failure the engine reports carries one of these kinds. The C API maps
// them 1:1 onto bb_status codes.
enum class ErrorKind {
  argument,
  io,
  ingest,
  key,
  format,
  range,
  coverage,
  capacity,
  dimension,
  state,
  gateway,
  template_,
  anchor_format,
  degenerate,
  shape,
  deadline,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorKind::argument, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

enum class IngestFailure { duplicate, parse, metric };

struct IngestError : Error {
  IngestError(IngestFailure f, const std::string& w, std::size_t line = 0)
      : Error(ErrorKind::ingest, w), failure(f), line(line) {}
  IngestFailure failure;
  std::size_t line;  // 1-based, 0 when not tied to a line
};

struct KeyError : Error {
  explicit KeyError(const std::string& w) : Error(ErrorKind::key, w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w, std::string offending = {})
      : Error(ErrorKind::format, w), offending(std::move(offending)) {}
  std::string offending;
};
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error(ErrorKind::range, w) {}
};
struct CoverageError : Error {
  explicit CoverageError(const std::string& w) : Error(ErrorKind::coverage, w) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error(ErrorKind::capacity, w) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::dimension, w) {}
};
struct StateError : Error {
  explicit StateError(const std::string& w) : Error(ErrorKind::state, w) {}
};
struct GatewayError : Error {
  explicit GatewayError(const std::string& w) : Error(ErrorKind::gateway, w) {}
};
// A remote response that arrived but does not match the template's output
// format. Callers may re-ask.
struct ResponseFormatError : GatewayError {
  ResponseFormatError(const std::string& w, std::string response)
      : GatewayError(w), response(std::move(response)) {}
  std::string response;
};
struct TemplateError : Error {
  explicit TemplateError(const std::string& w) : Error(ErrorKind::template_, w) {}
};
struct AnchorFormatError : Error {
  explicit AnchorFormatError(const std::string& w) : Error(ErrorKind::anchor_format, w) {}
};
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& w) : Error(ErrorKind::degenerate, w) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(ErrorKind::shape, w) {}
};
struct DeadlineError : Error {
  explicit DeadlineError(const std::string& w) : Error(ErrorKind::deadline, w) {}
};

}  // namespace bb
