#include "dirac_torus/torus_algebra.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

Symbol Symbol::delta(int m, int n, cd c) {
  Symbol s;
  s.add(m, n, c);
  return s;
}

void Symbol::add(int m, int n, cd c) {
  auto key = std::make_pair(m, n);
  auto it = a_.find(key);
  if (it == a_.end()) {
    if (c != cd(0.0, 0.0)) a_[key] = c;
    return;
  }
  it->second += c;
  if (it->second == cd(0.0, 0.0)) a_.erase(it);
}

cd Symbol::at(int m, int n) const {
  auto it = a_.find(std::make_pair(m, n));
  return it == a_.end() ? cd(0.0, 0.0) : it->second;
}

int Symbol::max_abs_level() const {
  int v = 0;
  for (const auto& [k, c] : a_) v = std::max(v, std::abs(k.second));
  return v;
}

int Symbol::max_abs_frequency() const {
  int v = 0;
  for (const auto& [k, c] : a_) v = std::max(v, std::abs(k.first));
  return v;
}

static long sigma(int m, int n, int p, int q) {
  return static_cast<long>(m) * q - static_cast<long>(p) * n;
}

Symbol weyl_mul(const Symbol& f, const Symbol& g, double alpha) {
  Symbol out;
  for (const auto& [b, fb] : f.support()) {
    for (const auto& [c, gc] : g.support()) {
      const int m = b.first + c.first, n = b.second + c.second;
      const double phase = -kTwoPi * alpha * static_cast<double>(sigma(m, n, b.first, b.second));
      out.add(m, n, fb * gc * std::polar(1.0, phase));
    }
  }
  return out;
}

Symbol weyl_star(const Symbol& f) {
  Symbol out;
  for (const auto& [a, c] : f.support()) out.add(-a.first, -a.second, std::conj(c));
  return out;
}

cd trace_tau(const Symbol& f) { return f.at(0, 0); }

MeasureCoeffs MeasureCoeffs::point_mass(double angle) {
  return convex_point_masses({1.0}, {angle});
}

MeasureCoeffs MeasureCoeffs::convex_point_masses(const std::vector<double>& weights,
                                                 const std::vector<double>& angles) {
  if (weights.size() != angles.size() || weights.empty())
    throw Error("convex_point_masses: mismatched inputs");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0) throw Error("convex_point_masses: negative weight");
    total += w;
  }
  MeasureCoeffs mu;
  for (int m = 1; m <= 64; ++m) {
    cd v(0.0, 0.0);
    for (size_t j = 0; j < weights.size(); ++j)
      v += weights[j] / total * std::polar(1.0, m * angles[j]);
    mu.set(m, v);
  }
  return mu;
}

void MeasureCoeffs::set(int m, cd v) {
  if (m == 0) {
    if (v != cd(1.0, 0.0)) throw Error("mu(0) must be 1");
    return;
  }
  moments_[std::abs(m)] = m > 0 ? v : std::conj(v);
}

cd MeasureCoeffs::moment(int m) const {
  if (m == 0) return cd(1.0, 0.0);
  auto it = moments_.find(std::abs(m));
  if (it == moments_.end()) return cd(0.0, 0.0);
  return m > 0 ? it->second : std::conj(it->second);
}

Eigen::MatrixXcd MeasureCoeffs::moment_matrix(int size) const {
  Eigen::MatrixXcd t(size, size);
  for (int j = 0; j < size; ++j)
    for (int k = 0; k < size; ++k) t(j, k) = moment(j - k);
  return t;
}

bool MeasureCoeffs::positive_definite(int size, double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(moment_matrix(size), Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > tol;
}

cd state_omega(const MeasureCoeffs& mu, const Symbol& f) {
  cd v(0.0, 0.0);
  for (const auto& [a, c] : f.support())
    if (a.second == 0) v += mu.moment(a.first) * c;
  return v;
}

GNSVector GNSVector::zero(int n, int m) {
  GNSVector x;
  x.N = n;
  x.M = m;
  x.data.assign(2 * n + 1, Eigen::VectorXcd::Zero(2 * m + 1));
  return x;
}

GNSVector GNSVector::random(int n, int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  GNSVector x = zero(n, m);
  for (auto& lv : x.data)
    for (int i = 0; i < lv.size(); ++i) lv[i] = cd(dist(rng), dist(rng));
  return x;
}

double GNSVector::norm() const {
  double s = 0.0;
  for (const auto& lv : data) s += lv.squaredNorm();
  return std::sqrt(s);
}

GNSVector GNSVector::operator-(const GNSVector& o) const {
  GNSVector out = *this;
  for (size_t i = 0; i < data.size(); ++i) out.data[i] -= o.data[i];
  return out;
}

GNSVector GNSVector::operator+(const GNSVector& o) const {
  GNSVector out = *this;
  for (size_t i = 0; i < data.size(); ++i) out.data[i] += o.data[i];
  return out;
}

cd GNSVector::dot(const GNSVector& o) const {
  cd s(0.0, 0.0);
  for (size_t i = 0; i < data.size(); ++i) s += o.data[i].dot(data[i]);  // conj-linear in o
  return s;
}

namespace {

int gns_grid(int m) { return next_power_of_two(std::max(4 * (2 * m + 1), 64)); }

// row anti-transform u_l(e^{i psi}) = sum_m f(m,l) e^{i m psi}
cd eval_row(const std::vector<std::pair<int, cd>>& row, double psi) {
  cd v(0.0, 0.0);
  for (const auto& [m, c] : row) v += c * std::polar(1.0, m * psi);
  return v;
}

}  // namespace

std::string symbol_to_json(const Symbol& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [a, c] : f.support())
    arr.push_back({a.first, a.second, c.real(), c.imag()});
  return arr.dump();
}

Symbol symbol_from_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw Error("symbol JSON must be an array of [m, n, re, im]");
  Symbol f;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 4) throw Error("symbol entries must be [m, n, re, im]");
    f.add(e[0].get<int>(), e[1].get<int>(), cd(e[2].get<double>(), e[3].get<double>()));
  }
  return f;
}

std::string gns_to_json(const GNSVector& x) {
  nlohmann::json j;
  j["N"] = x.N;
  j["M"] = x.M;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : x.data) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int i = 0; i < lv.size(); ++i) {
      coeffs.push_back(lv[i].real());
      coeffs.push_back(lv[i].imag());
    }
    levels.push_back(std::move(coeffs));
  }
  j["levels"] = std::move(levels);
  return j.dump();
}

GNSVector gns_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GNSVector x = GNSVector::zero(j.at("N").get<int>(), j.at("M").get<int>());
  const auto& levels = j.at("levels");
  if (levels.size() != x.data.size()) throw Error("GNS JSON level count mismatch");
  for (size_t n = 0; n < x.data.size(); ++n) {
    const auto& coeffs = levels[n];
    if (static_cast<int>(coeffs.size()) != 2 * (2 * x.M + 1))
      throw Error("GNS JSON coefficient count mismatch");
    for (int i = 0; i < 2 * x.M + 1; ++i)
      x.data[n][i] = cd(coeffs[2 * i].get<double>(), coeffs[2 * i + 1].get<double>());
  }
  return x;
}

GNSVector gns_apply(const Symbol& f, const CircleDiffeo& diffeo, const GNSVector& x) {
  const int N = x.N, M = x.M;
  const int G = gns_grid(M);
  if (f.max_abs_frequency() >= G / 2)
    throw UnsupportedSymbol("row frequency at or beyond the grid Nyquist");

  // group the symbol by level shift l
  std::map<int, std::vector<std::pair<int, cd>>> rows;
  for (const auto& [a, c] : f.support()) rows[a.second].push_back({a.first, c});

  const auto theta = uniform_grid(G);
  std::vector<double> hinv(theta.size());
  const bool trivial = diffeo.conjugator().is_identity();
  for (int j = 0; j < G; ++j)
    hinv[j] = trivial ? theta[j] : diffeo.conjugator().inverse(theta[j]);
  const double pi_alpha = (kTwoPi / 2.0) * diffeo.rotation_number();

  GNSVector out = GNSVector::zero(N, M);
  std::vector<cd> acc(G), src(G);
  for (int n = -N; n <= N; ++n) {
    std::fill(acc.begin(), acc.end(), cd(0.0, 0.0));
    bool touched = false;
    for (const auto& [l, row] : rows) {
      const int nsrc = n - l;
      if (nsrc < -N || nsrc > N) continue;  // truncation compression: dropped
      src = synthesize(x.level(nsrc), G);
      // u_l o h^{-1} o T^{2n-l}: angle psi = H^{-1}(theta) + (2n-l) pi alpha
      const double shift = (2.0 * n - l) * pi_alpha;
      for (int j = 0; j < G; ++j) acc[j] += eval_row(row, hinv[j] + shift) * src[j];
      touched = true;
    }
    if (touched) out.level(n) = project_modes(acc, M);
  }
  return out;
}

double gns_convention_gap(const Symbol& row0_symbol, const CircleDiffeo& diffeo, int n_levels,
                          int m) {
  std::vector<std::pair<int, cd>> row;
  for (const auto& [a, c] : row0_symbol.support()) {
    if (a.second != 0) throw Error("gns_convention_gap expects a level-0 row symbol");
    row.push_back({a.first, c});
  }
  const int G = gns_grid(m);
  const auto theta = uniform_grid(G);
  double gap = 0.0;
  for (int n = -n_levels; n <= n_levels; ++n) {
    // exact convention: u o h^{-1} o T^{2n}; naive: u o f^n
    std::vector<cd> exact(G), naive(G);
    for (int j = 0; j < G; ++j) {
      const double psi =
          diffeo.conjugator().inverse(theta[j]) + 2.0 * n * (kTwoPi / 2.0) * diffeo.rotation_number();
      exact[j] = eval_row(row, psi);
      naive[j] = eval_row(row, diffeo.map_angle(n, theta[j]));
    }
    // gap between the two multiplication operators = sup |difference|
    double sup = 0.0;
    for (int j = 0; j < G; ++j) sup = std::max(sup, std::abs(exact[j] - naive[j]));
    gap = std::max(gap, sup);
  }
  return gap;
}

GNSVector modular_apply(ModularOp which, double t, const CircleDiffeo& diffeo,
                        const GNSVector& x) {
  const int N = x.N, M = x.M;
  const int G = gns_grid(M);
  const auto theta = uniform_grid(G);
  GNSVector out = GNSVector::zero(N, M);
  std::vector<cd> buf(G);
  for (int n = -N; n <= N; ++n) {
    switch (which) {
      case ModularOp::DeltaPower: {
        const auto src = synthesize(x.level(n), G);
        for (int j = 0; j < G; ++j)
          buf[j] = std::pow(diffeo.lift_derivative(n, theta[j]), t) * src[j];
        break;
      }
      case ModularOp::S:
      case ModularOp::J: {
        const auto& modes = x.level(-n);
        for (int j = 0; j < G; ++j) {
          const double phi = diffeo.map_angle(n, theta[j]);
          cd v = std::conj(eval_modes(modes, phi));
          if (which == ModularOp::J) v *= std::sqrt(diffeo.lift_derivative(n, theta[j]));
          buf[j] = v;
        }
        break;
      }
    }
    out.level(n) = project_modes(buf, M);
  }
  return out;
}

}  // namespace dirac_torus
