#include "hjmm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hjmm/errors.hpp"

namespace hjmm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StructuralError("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw StructuralError("write failed: " + path);
}

void write_curve_csv(const std::string& path, const ForwardCurve& h) {
  h.ensure_valid();
  std::string s = "# beta=" + format_double(h.beta) + " tail_zero=" + (h.tail_zero ? "1" : "0") +
                  "\nmaturity,value\n";
  const auto& pts = h.grid->points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += format_double(pts[i]) + "," + format_double(h.values[i]) + "\n";
  write_text_file(path, s);
}

void write_jump_log_csv(const std::string& path, const JumpLog& log) {
  std::string s = "time";
  for (int d = 0; d < log.mark_dim; ++d) s += ",mark_" + std::to_string(d);
  s += "\n";
  for (std::size_t i = 0; i < log.count(); ++i) {
    s += format_double(log.times[i]);
    for (double m : log.mark(i)) s += "," + format_double(m);
    s += "\n";
  }
  write_text_file(path, s);
}

void write_series_csv(const std::string& path, const std::vector<std::string>& comments,
                      const std::vector<SeriesColumn>& columns) {
  if (columns.empty()) throw StructuralError("series CSV needs at least one column");
  const std::size_t rows = columns.front().values.size();
  std::string s;
  for (const auto& c : comments) s += "# " + c + "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].values.size() != rows)
      throw StructuralError("series CSV columns have unequal lengths");
    s += (k ? "," : "") + columns[k].name;
  }
  s += "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k)
      s += (k ? "," : "") + format_double(columns[k].values[r]);
    s += "\n";
  }
  write_text_file(path, s);
}

}  // namespace hjmm
