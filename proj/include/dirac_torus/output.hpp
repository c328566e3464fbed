#pragma once

#include <string>
#include <vector>

namespace dirac_torus {

// 17 significant digits: doubles round-trip exactly, so identical runs diff clean
std::string format_g17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::string& path) const;
};

// two-column whitespace-separated plot data
void write_plot_data(const std::string& path, const std::vector<double>& x,
                     const std::vector<double>& y);

void write_text(const std::string& path, const std::string& content);

}  // namespace dirac_torus
