#pragma once

#include <string>
#include <vector>

#include "dirac_torus/circle_dynamics.hpp"
#include "dirac_torus/fourier.hpp"

namespace dirac_torus {

enum class DiracVariant { standard, growth_weighted };

// Fourier truncation of one block of the deformed Dirac operator, ordered as
// [upper component, frequencies -M..M | lower component, frequencies -M..M].
// Hermitian by construction: the lower-left block is the conjugate transpose
// of the truncated upper-right block.
struct DiracBlock {
  long n = 0;
  int M = 0;
  double eta = 0.0;
  DiracVariant variant = DiracVariant::standard;
  Eigen::MatrixXcd matrix;  // 2(2M+1) square

  int dim() const { return 2 * (2 * M + 1); }
  Eigen::MatrixXcd upper_right() const {
    const int d = 2 * M + 1;
    return matrix.block(0, d, d, d);
  }
};

// Upper-right block: Toep(d^{eta-1}) diag(ik - n) Toep(d^{-eta}); growth_weighted
// replaces n with a_{f,n}. grid_size 0 picks the power of two >= 4(2M+1).
DiracBlock assemble_block(const CircleDiffeo& f, long n, int M, double eta,
                          DiracVariant variant = DiracVariant::standard, int grid_size = 0);

// Finite-section discrepancy of the hermitization choice: compression of the
// full operator product M_{d^-eta} L* M_{d^{eta-1}} against the conjugate
// transpose of the truncated upper-right block. The difference is localized at
// the frequency edge (its norm grows ~ M there); the interior part collapses
// to roundoff once M clears the coefficient decay length.
struct HermitizationGap {
  double full = 0.0;      // operator norm over all frequencies
  double interior = 0.0;  // compressed to |k| <= M/2
};
HermitizationGap hermitization_gap(const CircleDiffeo& f, long n, int M, double eta,
                                   int grid_size = 0);

struct SpectrumEntry {
  long n;
  double lambda;
  int eigvec_index;  // column into SpectrumReport::eigenvectors; -1 if absent
  std::string method;
  double residual;
};

struct SpectrumReport {
  std::vector<SpectrumEntry> entries;  // sorted ascending by lambda
  Eigen::MatrixXcd eigenvectors;
  long n = 0;
  int M = 0;
  double eta = 0.0;
};

// Full hermitian eigendecomposition; verifies the +/- pairing within 1e-9
// and that every residual ||Bv - lambda v|| <= 1e-9.
SpectrumReport block_spectrum(const DiracBlock& block);

struct InverseNormRow {
  long n;
  double inv_norm;  // 1 / smallest singular value of the block
  double bound;     // gamma_f(n) / |n|
  bool satisfied;   // inv_norm <= bound + 1e-8
};

std::vector<InverseNormRow> inverse_norm_report(const CircleDiffeo& f,
                                                const std::vector<long>& n_range, int M);

struct StructureReport {
  double j_squared_residual;        // max interior || (J^2 + ... ) - expected || per level
  double j_gamma_residual;          // || J_T gamma + gamma J_T || on random vectors
  double gamma_squared_residual;    // || gamma^2 - I ||, exact 0
  int N = 0, M = 0;
};

// Truncated J_T, gamma checks: J_T^2 = -I and J_T gamma = -gamma J_T. The J^2
// residual is compressed to frequencies |k| <= M/4 (composition operators lose
// mass near the frequency edge).
StructureReport structure_checks(const CircleDiffeo& f, int N, int M);

}  // namespace dirac_torus
