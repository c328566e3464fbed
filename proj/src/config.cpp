#include "dirac_torus/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("trailing characters in number for key " + key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("cannot parse number '" + s + "' for key " + key);
  }
}

// split a bracketed list "a, b, (c, d), e" at top-level commas
std::vector<std::string> split_top_level(const std::string& body) {
  std::vector<std::string> items;
  int depth = 0;
  std::string cur;
  for (char ch : body) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += ch;
  }
  const std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (cfg.raw_.count(key))
      throw ConfigError("duplicate key '" + key + "' at line " + std::to_string(lineno));
    cfg.raw_[key] = val;
  }
  return cfg;
}

bool RunConfig::has(const std::string& key) const { return raw_.count(key) > 0; }

double RunConfig::get_double(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) throw ConfigError("missing key: " + key);
  return parse_number(it->second, key);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long RunConfig::get_long(const std::string& key) const {
  const double v = get_double(key);
  const long l = static_cast<long>(std::llround(v));
  if (std::abs(v - l) > 1e-9) throw ConfigError("key " + key + " must be an integer");
  return l;
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

std::string RunConfig::get_string(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) throw ConfigError("missing key: " + key);
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<std::string> RunConfig::get_raw_list(const std::string& key) const {
  const std::string v = get_string(key);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("key " + key + " must be a bracketed list");
  return split_top_level(v.substr(1, v.size() - 2));
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_raw_list(key)) out.push_back(parse_number(item, key));
  return out;
}

std::vector<std::vector<double>> RunConfig::get_tuple_list(const std::string& key) const {
  std::vector<std::vector<double>> out;
  for (const auto& item : get_raw_list(key)) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')')
      throw ConfigError("key " + key + ": expected (..) tuples");
    std::vector<double> tup;
    for (const auto& field : split_top_level(item.substr(1, item.size() - 2)))
      tup.push_back(parse_number(field, key));
    out.push_back(std::move(tup));
  }
  return out;
}

CircleLift RunConfig::lift() const {
  if (!has("lift")) return CircleLift();
  std::vector<TrigTerm> terms;
  for (const auto& tup : get_tuple_list("lift")) {
    if (tup.size() != 3) throw ConfigError("lift entries must be (k, a_k, phi_k)");
    const long k = static_cast<long>(std::llround(tup[0]));
    if (k < 1 || std::abs(tup[0] - k) > 1e-9)
      throw ConfigError("lift frequency must be a positive integer");
    terms.push_back({static_cast<int>(k), tup[1], tup[2]});
  }
  try {
    return CircleLift(std::move(terms));
  } catch (const NotADiffeomorphism& e) {
    throw ConfigError(std::string("invalid lift: ") + e.what());
  }
}

double RunConfig::rotation_number() const {
  if (has("alpha_cf")) {
    ContinuedFraction cf;
    for (const auto& item : get_raw_list("alpha_cf")) {
      try {
        cf.partial_quotients.push_back(big_int(item));
      } catch (...) {
        throw ConfigError("alpha_cf entries must be positive integers");
      }
    }
    if (cf.partial_quotients.size() < 3)
      throw ConfigError("alpha_cf needs at least 3 partial quotients");
    return cf.value();
  }
  if (has("alpha")) return get_double("alpha");
  return (std::sqrt(5.0) - 1.0) / 2.0;
}

CircleDiffeo RunConfig::diffeo() const {
  try {
    return make_diffeo(lift(), rotation_number());
  } catch (const RationalRotation& e) {
    throw ConfigError(std::string("invalid rotation number: ") + e.what());
  }
}

}  // namespace dirac_torus
