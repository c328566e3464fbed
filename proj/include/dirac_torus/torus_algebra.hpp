#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dirac_torus/circle_dynamics.hpp"
#include "dirac_torus/fourier.hpp"

namespace dirac_torus {

// Finitely supported function Z^2 -> C; W(f) = sum f(a) W(a) in the Weyl form.
class Symbol {
 public:
  using Support = std::map<std::pair<int, int>, cd>;

  Symbol() = default;
  static Symbol delta(int m, int n, cd c = cd(1.0, 0.0));

  void add(int m, int n, cd c);  // accumulates; exact zeros are pruned
  cd at(int m, int n) const;
  const Support& support() const { return a_; }
  bool empty() const { return a_.empty(); }
  int max_abs_level() const;
  int max_abs_frequency() const;

 private:
  Support a_;
};

// twisted convolution (f *_{2a} g)(x) = sum_b f(b) g(x-b) e^{-2 pi i alpha sigma(x,b)},
// sigma((m,n),(p,q)) = m q - p n
Symbol weyl_mul(const Symbol& f, const Symbol& g, double alpha);
Symbol weyl_star(const Symbol& f);  // f*(a) = conj(f(-a))
cd trace_tau(const Symbol& f);      // tau(W(f)) = f(0,0)

// Moments mu(m) of a probability measure on the circle; mu(0) = 1, mu(-m) = conj(mu(m)).
class MeasureCoeffs {
 public:
  MeasureCoeffs() { moments_[0] = 1.0; }
  static MeasureCoeffs haar() { return MeasureCoeffs(); }
  static MeasureCoeffs point_mass(double angle);
  static MeasureCoeffs convex_point_masses(const std::vector<double>& weights,
                                           const std::vector<double>& angles);

  void set(int m, cd v);
  cd moment(int m) const;
  Eigen::MatrixXcd moment_matrix(int size) const;  // Toeplitz [mu(j-k)]
  bool positive_definite(int size, double tol = 1e-12) const;

 private:
  std::map<int, cd> moments_;  // stored for m >= 0
};

// omega_mu(W(f)) = sum_m mu(m) f(m, 0)
cd state_omega(const MeasureCoeffs& mu, const Symbol& f);

// Truncation of the GNS space: levels n = -N..N, each a 2M+1 Fourier coefficient vector.
struct GNSVector {
  int N = 0, M = 0;
  std::vector<Eigen::VectorXcd> data;  // index n+N

  static GNSVector zero(int n, int m);
  static GNSVector random(int n, int m, unsigned seed);
  Eigen::VectorXcd& level(int n) { return data[static_cast<size_t>(n + N)]; }
  const Eigen::VectorXcd& level(int n) const { return data[static_cast<size_t>(n + N)]; }
  double norm() const;
  GNSVector operator-(const GNSVector& o) const;
  GNSVector operator+(const GNSVector& o) const;
  cd dot(const GNSVector& o) const;  // <this, o> conjugate-linear in o? see impl
};

// GNS action of W(f): the symbol is decomposed row-wise into products x lambda^l;
// a row l with anti-transform u_l acts on level n by multiplication with
// u_l o h^{-1} o T^{2n-l} followed by the l-step shift. Levels shifted outside
// -N..N are dropped (finite-section compression).
GNSVector gns_apply(const Symbol& f, const CircleDiffeo& diffeo, const GNSVector& x);

// Diagnostic for the composition-convention question: operator gap on the
// truncation between the naive reading M_{u o f^n} of a level-0 row and the
// exact action M_{u o h^{-1} o f^n}. Zero when the conjugator is trivial.
double gns_convention_gap(const Symbol& row0_symbol, const CircleDiffeo& diffeo, int n_levels,
                          int m);

// wire formats: symbols as JSON arrays of [m, n, re, im]; GNS vectors as
// {"N":., "M":., "levels":[[re,im, re,im, ...], ...]}
std::string symbol_to_json(const Symbol& f);
Symbol symbol_from_json(const std::string& text);
std::string gns_to_json(const GNSVector& x);
GNSVector gns_from_json(const std::string& text);

enum class ModularOp { S, DeltaPower, J };

// S: (Sx)_n = conj(x_{-n} o f^n); DeltaPower(t): level n multiplied by d_n^t;
// J: (Jx)_n = d_n^{1/2} conj(x_{-n} o f^n). Grid evaluation, reprojected at the same M.
GNSVector modular_apply(ModularOp which, double t, const CircleDiffeo& diffeo,
                        const GNSVector& x);

}  // namespace dirac_torus
