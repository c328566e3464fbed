#include "dirac_torus/output.hpp"

#include <cstdio>
#include <fstream>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

void write_plot_data(const std::string& path, const std::vector<double>& x,
                     const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  for (size_t i = 0; i < x.size(); ++i)
    out << format_g17(x[i]) << " " << format_g17(y[i]) << "\n";
  if (!out) throw Error("write failed: " + path);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace dirac_torus
