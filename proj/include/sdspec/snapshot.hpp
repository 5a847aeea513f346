#pragma once

#include <string>
#include <variant>

#include "sdspec/field.hpp"

namespace sdspec {

/// Snapshot file: one line of JSON text
///   {"format":"sdspec-snapshot","version":1,"dim":2,"points":128,"extent":20.0,
///    "time":0.5,"kind":"complex","precision":"float64","byte_order":"little"}
/// terminated by '\n', followed by the raw row-major samples as IEEE-754
/// binary64, complex values interleaved (re, im). Writers always emit
/// little-endian; readers honour the declared byte order.
struct Snapshot {
  double time = 0.0;
  std::variant<ComplexField, RealField> field;

  const Grid& grid() const;
  bool is_complex() const { return std::holds_alternative<ComplexField>(field); }
};

/// Writes atomically (temporary file + rename). Throws io_failure.
void write_snapshot(const ComplexField& f, double time, const std::string& path);
void write_snapshot(const RealField& f, double time, const std::string& path);

/// Throws io_failure, header_mismatch or truncated_payload.
Snapshot read_snapshot(const std::string& path);

/// Writes `content` to path via a temporary file and rename. Throws io_failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace sdspec
