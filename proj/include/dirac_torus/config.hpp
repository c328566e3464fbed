#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirac_torus/circle_dynamics.hpp"

namespace dirac_torus {

// Flat key-value run configuration:
//   key = scalar
//   key = [v1, v2, ...]
//   key = [(a, b, c), (d, e, f)]
// '#' starts a comment. Keys are single identifiers; values are numbers except
// alpha_cf entries and string enums (variant = standard | growth_weighted).
class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<std::string> get_raw_list(const std::string& key) const;
  std::vector<std::vector<double>> get_tuple_list(const std::string& key) const;

  // lift = [(k, a_k, phi_k), ...] (absent: identity); alpha or alpha_cf
  // (absent: (sqrt(5)-1)/2)
  CircleLift lift() const;
  double rotation_number() const;
  CircleDiffeo diffeo() const;

 private:
  std::map<std::string, std::string> raw_;
};

}  // namespace dirac_torus
