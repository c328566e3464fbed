#pragma once

#include <map>
#include <vector>

#include "dirac_torus/circle_dynamics.hpp"
#include "dirac_torus/dirac_spectral.hpp"
#include "dirac_torus/fourier.hpp"

namespace dirac_torus {

// Linear combination of compressed generators P_N pi(x_F) lambda^l P_N. The
// diagonal factor of a term acts at output level n as multiplication by
// F o f^{n + level_offset}; the pure-diagonal and pure-shift generator shapes
// are the special cases l = 0 and F = 1. level_offset is what makes the star
// of a product representable again.
struct ElementTerm {
  std::map<int, cd> trig;  // \hat F(m); empty means F = 1
  int shift = 0;
  int level_offset = 0;
  cd coefficient = cd(1.0, 0.0);
};

struct ElementSpec {
  std::vector<ElementTerm> terms;
  int cutoff_N = 0;  // P_N compression level

  static ElementSpec identity(int n);
  static ElementSpec diagonal_monomial(int m, int n);        // F(z) = z^m
  static ElementSpec shift(int l, int n);                    // lambda^l
  static ElementSpec product_monomial(int m, int l, int n);  // P_N pi(x_{z^m}) lambda^l P_N
  int max_shift() const;
  ElementSpec star() const;
};

// Operator on the truncated doubled GNS space, stored as level-indexed blocks.
// Levels run over |n| <= N with n = 0 excluded (the Dirac kernel levels are
// disregarded); each block is a dense 2(2M+1) matrix unless noted.
struct BlockOp {
  int block_dim = 0;
  std::map<std::pair<long, long>, Eigen::MatrixXcd> blocks;

  BlockOp& add_scaled(const BlockOp& other, cd scale);
  BlockOp adjoint() const;
  BlockOp mul(const BlockOp& other) const;
  double frobenius() const;
  double operator_norm(int iterations = 200) const;  // power iteration on X^H X
  BlockOp compressed(long level_bound, int freq_keep, int m, bool doubled) const;
  bool level_diagonal() const;
};

// Per-level functional calculus of the truncated deformed Dirac operator.
struct DeformedPhaseCalculus {
  int N = 0, M = 0;
  double eta = 0.0;
  const CircleDiffeo* f = nullptr;
  std::vector<long> levels;  // |n| <= N, n != 0
  std::map<long, Eigen::MatrixXcd> Fphase, absD, absDinv, D;
  std::map<long, Cocycle> cocycles;
};

// Assembles blocks on levels |n| <= N (n = 0 removed) at frequency cutoff M and
// diagonalizes each; throws SingularD if any |eigenvalue| < 1e-10.
DeformedPhaseCalculus make_phase_calculus(const CircleDiffeo& f, int N, int M, double eta,
                                          int grid_size = 0);

// d_T(A) assembled from the analytic commutator functions (the independent
// route against the four-term phase expression).
struct DerivationResult {
  BlockOp op;
  double norm = 0.0;
};
DerivationResult deformed_derivation(const ElementSpec& a, const DeformedPhaseCalculus& calc);
DerivationResult deformed_derivation(const ElementSpec& a, const CircleDiffeo& f, int n_levels,
                                     int m, double eta);

struct CommutatorReport {
  double gap = 0.0;             // power-iteration estimate of ||lhs - rhs|| (interior)
  double gap_frobenius = 0.0;   // Frobenius norm of the same compression (upper bound)
  std::vector<double> singular_values;  // of the assembled commutator, descending (optional)
  double norm_a = 0.0;
  double norm_derivation = 0.0;
  double triple_norm = 0.0;
  double conj_norm_plus = 0.0;   // ||Gamma A Gamma^{-1}|| on the truncation
  double conj_norm_minus = 0.0;  // ||Gamma^{-1} A Gamma||
  int N = 0, M = 0;
  double eta = 0.0;
  long interior_levels = 0;
  int interior_freqs = 0;
};

// Four-term deformed commutator versus |D|^{-1} d_T(A) + d_T(A) |D|^{-1}; both
// sides compared after compression to levels |n| <= N - max_shift and
// frequencies |k| <= M/2.
CommutatorReport fredholm_commutator(const ElementSpec& a, const DeformedPhaseCalculus& calc,
                                     bool want_singular_values = false, bool want_norms = true);
CommutatorReport fredholm_commutator(const ElementSpec& a, const CircleDiffeo& f, int n_levels,
                                     int m, double eta, bool want_singular_values = false,
                                     bool want_norms = true);

double triple_norm(const ElementSpec& a, const CircleDiffeo& f, int n_levels, int m, double eta);

// i (F C+ - C- F) + i (F |D| C+ |D|^{-1} - |D|^{-1} C- |D| F); F, |D|, |D|^{-1}
// level-diagonal. Shared by the torus machinery and the 1-D circle example.
BlockOp four_term_commutator(const BlockOp& f_phase, const BlockOp& abs_d,
                             const BlockOp& abs_d_inv, const BlockOp& c_plus,
                             const BlockOp& c_minus);

// Exact matrices of the 1-D circle example on frequencies |k| <= K (kernel
// k = 0 removed as a zero row/column). deformed: -i[F,a]_T for a = M_{z^l},
// entries l (1/|k+l| + 1/|k|); undeformed: [F,a] = 2 sign(l) P_{L_l} lambda^l.
Eigen::MatrixXd circle_example(int l, int k_max, bool deformed);

// The same deformed commutator computed through four_term_commutator with
// D = diag(k), Gamma = I (one level, trivial cocycle).
Eigen::MatrixXcd circle_example_via_machinery(int l, int k_max);

// |D|[F,a] for a trigonometric polynomial a = sum f_l z^l, with the bound
// 2 sum |l||f_l|.
struct ConnesBound {
  Eigen::MatrixXcd b_a;
  double norm = 0.0;
  double bound = 0.0;
};
ConnesBound circle_connes_bound(const std::map<int, cd>& trig, int k_max);

}  // namespace dirac_torus
