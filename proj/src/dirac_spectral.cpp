#include "dirac_torus/dirac_spectral.hpp"

#include <algorithm>
#include <cmath>

#include "dirac_torus/errors.hpp"
#include "dirac_torus/torus_algebra.hpp"

namespace dirac_torus {

namespace {

int auto_grid(int M, int grid_size) {
  if (grid_size == 0) return next_power_of_two(std::max(4 * (2 * M + 1), 64));
  return grid_size;
}

// Toeplitz section of multiplication by d^s, with the cutoff tail guard.
Eigen::MatrixXcd power_toeplitz(const Cocycle& coc, double s, int M) {
  const int d = 2 * M + 1;
  if (s == 0.0) return Eigen::MatrixXcd::Identity(d, d);
  FourierData fd = coc.fourier_of_power(s);
  if (fd.tail_mass_beyond(M) > 1e-6)
    throw CutoffTooSmall("Fourier tail of d^" + std::to_string(s) +
                         " beyond M exceeds 1e-6 of its mass");
  return fd.toeplitz(M);
}

}  // namespace

DiracBlock assemble_block(const CircleDiffeo& f, long n, int M, double eta, DiracVariant variant,
                          int grid_size) {
  if (M < 8) throw Error("assemble_block: M must be >= 8");
  if (eta < 0.0 || eta > 1.0) throw Error("assemble_block: eta must be in [0,1]");
  const int G = auto_grid(M, grid_size);
  const Cocycle coc(f, n, G);

  double level = static_cast<double>(n);
  if (variant == DiracVariant::growth_weighted) {
    const GrowthTable g = growth_sequence(f, static_cast<int>(std::labs(n)), 4096);
    level = growth_weight(g, n);
  }

  const int d = 2 * M + 1;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d, d);
  for (int k = -M; k <= M; ++k) L(k + M, k + M) = cd(-level, static_cast<double>(k));  // ik - n

  const Eigen::MatrixXcd T1 = power_toeplitz(coc, eta - 1.0, M);
  const Eigen::MatrixXcd T2 = power_toeplitz(coc, -eta, M);
  Eigen::MatrixXcd U = T1 * L * T2;

  DiracBlock b;
  b.n = n;
  b.M = M;
  b.eta = eta;
  b.variant = variant;
  b.matrix = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  b.matrix.block(0, d, d, d) = U;
  b.matrix.block(d, 0, d, d) = U.adjoint();
  return b;
}

HermitizationGap hermitization_gap(const CircleDiffeo& f, long n, int M, double eta,
                                   int grid_size) {
  // compression of the full operator product M_{d^-eta} L* M_{d^{eta-1}},
  // internal frequency sum running over the whole grid band, against the
  // conjugate transpose of the truncated upper-right block
  const int G = auto_grid(M, grid_size);
  const Cocycle coc(f, n, G);
  const int d = 2 * M + 1;
  const int big = G / 2 - 1;
  const Eigen::VectorXcd c1 = coc.fourier_of_power(-eta).modes(big);
  const Eigen::VectorXcd c2 = coc.fourier_of_power(eta - 1.0).modes(big);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(d, d);
  for (int j = -M; j <= M; ++j)
    for (int k = -M; k <= M; ++k) {
      cd s(0.0, 0.0);
      for (int l = std::max(j - big, std::max(k - big, -big));
           l <= std::min(j + big, std::min(k + big, big)); ++l)
        s += c1[j - l + big] * cd(-static_cast<double>(n), -l) * c2[l - k + big];
      full(j + M, k + M) = s;
    }
  const DiracBlock b = assemble_block(f, n, M, eta, DiracVariant::standard, G);
  const Eigen::MatrixXcd diff = full - b.upper_right().adjoint();
  const int mi = M / 2;
  HermitizationGap gap;
  gap.full = operator_norm(diff);
  gap.interior = operator_norm(diff.block(M - mi, M - mi, 2 * mi + 1, 2 * mi + 1));
  return gap;
}

SpectrumReport block_spectrum(const DiracBlock& block) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block.matrix);
  if (es.info() != Eigen::Success) throw EigensolveFailure("block eigensolve failed");

  SpectrumReport rep;
  rep.n = block.n;
  rep.M = block.M;
  rep.eta = block.eta;
  rep.eigenvectors = es.eigenvectors();

  const auto& ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    const double res = (block.matrix * rep.eigenvectors.col(i) - ev[i] * rep.eigenvectors.col(i))
                           .norm();
    if (res > 1e-9) throw EigensolveFailure("eigenpair residual above 1e-9");
    rep.entries.push_back({block.n, ev[i], i, "matrix", res});
  }
  std::sort(rep.entries.begin(), rep.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.lambda < b.lambda; });

  // chirality: the spectrum is symmetric about 0
  const int m = static_cast<int>(rep.entries.size());
  for (int i = 0; i < m; ++i) {
    const double lo = rep.entries[i].lambda, hi = rep.entries[m - 1 - i].lambda;
    if (std::abs(lo + hi) > 1e-9)
      throw EigensolveFailure("eigenvalue +/- pairing violated beyond 1e-9");
  }
  return rep;
}

std::vector<InverseNormRow> inverse_norm_report(const CircleDiffeo& f,
                                                const std::vector<long>& n_range, int M) {
  long n_max = 0;
  for (long n : n_range) {
    if (n == 0) throw Error("inverse_norm_report: n = 0 block is excluded (kernel)");
    n_max = std::max(n_max, std::labs(n));
  }
  const GrowthTable g = growth_sequence(f, static_cast<int>(n_max), 4096);

  std::vector<InverseNormRow> rows;
  for (long n : n_range) {
    const DiracBlock b = assemble_block(f, n, M, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigensolveFailure("inverse_norm eigensolve failed");
    const double smin = es.eigenvalues().cwiseAbs().minCoeff();
    if (smin < 1e-12) throw SingularBlock("smallest singular value below 1e-12");
    const double inv = 1.0 / smin;
    const double bound = g.gamma[static_cast<size_t>(std::labs(n))] / std::labs(n);
    rows.push_back({n, inv, bound, inv <= bound + 1e-8});
  }
  return rows;
}

StructureReport structure_checks(const CircleDiffeo& f, int N, int M) {
  StructureReport rep;
  rep.N = N;
  rep.M = M;
  const int d = 2 * M + 1;

  // Antilinear level maps of J: (Jx)_n = A_n conj(x_{-n}) in coefficients.
  // A_n columns come from modular_apply(J) on basis vectors.
  std::vector<Eigen::MatrixXcd> A(2 * N + 1);
  for (int n = -N; n <= N; ++n) {
    Eigen::MatrixXcd An(d, d);
    for (int j = 0; j < d; ++j) {
      GNSVector e = GNSVector::zero(N, M);
      e.level(-n)[j] = 1.0;
      const GNSVector Je = modular_apply(ModularOp::J, 0.0, f, e);
      An.col(j) = Je.level(n);
    }
    A[static_cast<size_t>(n + N)] = An;
  }

  // J^2 = I per level: A_n conj(A_{-n}) = I, compressed to |k| <= M/4.
  const int Mi = M / 4;
  double j2 = 0.0;
  for (int n = -N; n <= N; ++n) {
    const Eigen::MatrixXcd prod =
        A[static_cast<size_t>(n + N)] * A[static_cast<size_t>(-n + N)].conjugate();
    const Eigen::MatrixXcd gap = prod - Eigen::MatrixXcd::Identity(d, d);
    j2 = std::max(j2, operator_norm(gap.block(M - Mi, M - Mi, 2 * Mi + 1, 2 * Mi + 1)));
  }
  rep.j_squared_residual = j2;

  // J_T gamma + gamma J_T on random doubled vectors; antilinearity handled by
  // applying the maps directly.
  auto applyJ = [&](const GNSVector& v) {
    GNSVector out = GNSVector::zero(N, M);
    for (int n = -N; n <= N; ++n)
      out.level(n) = A[static_cast<size_t>(n + N)] * v.level(-n).conjugate();
    return out;
  };
  auto negate = [](GNSVector v) {
    for (auto& lv : v.data) lv = -lv;
    return v;
  };
  double jg = 0.0;
  for (unsigned seed = 1; seed <= 3; ++seed) {
    GNSVector x1 = GNSVector::random(N, M, seed), x2 = GNSVector::random(N, M, seed + 100);
    // J_T (x1,x2) = (J x2, -J x1); gamma (x1,x2) = (x1, -x2)
    const GNSVector jg_up = applyJ(negate(x2));   // J_T gamma, upper
    const GNSVector jg_lo = negate(applyJ(x1));   // J_T gamma, lower
    const GNSVector gj_up = applyJ(x2);           // gamma J_T, upper
    const GNSVector gj_lo = applyJ(x1);           // gamma J_T, lower = -(-J x1)
    const double num = (jg_up + gj_up).norm() + (jg_lo + gj_lo).norm();
    jg = std::max(jg, num / std::max(1.0, x1.norm() + x2.norm()));
  }
  rep.j_gamma_residual = jg;
  rep.gamma_squared_residual = 0.0;  // gamma = diag(I, -I): gamma^2 = I identically
  return rep;
}

}  // namespace dirac_torus
