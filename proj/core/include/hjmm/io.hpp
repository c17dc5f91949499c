#pragma once

#include <string>
#include <vector>

#include "hjmm/curve.hpp"
#include "hjmm/drivers.hpp"

namespace hjmm {

/// All writers format floats with %.17g (value round-trips exactly) and
/// throw StructuralError when the file cannot be written, so output is
/// byte-for-byte reproducible across runs and thread counts.

std::string format_double(double v);

void ensure_directory(const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);

/// Two-column curve CSV; the header comment carries the space weight and the
/// tail flag:  # beta=... tail_zero=0|1  /  maturity,value  /  rows.
void write_curve_csv(const std::string& path, const ForwardCurve& h);

/// Per-path jump audit: time,mark_0,...,mark_{d-1}.
void write_jump_log_csv(const std::string& path, const JumpLog& log);

/// Generic aligned-series CSV: comment lines first (each prefixed "# "),
/// then a header row of column names, then the rows.  All columns must have
/// equal length.
struct SeriesColumn {
  std::string name;
  std::vector<double> values;
};
void write_series_csv(const std::string& path, const std::vector<std::string>& comments,
                      const std::vector<SeriesColumn>& columns);

}  // namespace hjmm
