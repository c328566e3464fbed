#include "dirac_torus/hill_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

HillProblem hill_assemble(const Cocycle& coc, long n, double eta, int M,
                          bool printed_coefficient) {
  if (M < 8) throw Error("hill_assemble: M must be >= 8");
  if (coc.level() != n) throw Error("hill_assemble: cocycle level does not match n");

  HillProblem p;
  p.n = n;
  p.eta = eta;
  p.M = M;
  p.printed_coefficient = printed_coefficient;

  const int d = 2 * M + 1;
  p.A = Eigen::MatrixXcd::Zero(d, d);
  for (int k = -M; k <= M; ++k)
    p.A(k + M, k + M) = static_cast<double>(k) * k + static_cast<double>(n) * n;

  p.C = coc.fourier_of_power(2.0).toeplitz(M);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.C, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
      throw IndefiniteC("Toeplitz section of d^2 is not positive definite");
  }

  if (eta != 0.0) {
    // Toeplitz section of (ln d)'
    const int mv = coc.grid() / 2 - 1;
    if (mv < 2 * M) throw Error("hill_assemble: cocycle grid too small for this M");
    const Eigen::VectorXcd vmodes = coc.log_deriv_modes(mv);
    Eigen::MatrixXcd Tv(d, d);
    for (int j = -M; j <= M; ++j)
      for (int k = -M; k <= M; ++k) Tv(j + M, k + M) = vmodes[j - k + mv];
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(d, d);
    for (int k = -M; k <= M; ++k) K(k + M, k + M) = static_cast<double>(k);
    const double z = printed_coefficient ? 1.0 : static_cast<double>(n);
    p.B1 = cd(0.0, 2.0 * eta) * (Tv * K) + 2.0 * eta * z * Tv;
  }
  return p;
}

HillSpectrum hill_eigenvalues(const HillProblem& p) {
  HillSpectrum out;
  const int d = 2 * p.M + 1;

  if (p.eta == 0.0 || p.B1.size() == 0) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.A, p.C);
    if (es.info() != Eigen::Success) throw FactorizationFailure("pencil eigensolve failed");
    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < d; ++i) {
      const double l2 = es.eigenvalues()[i];
      if (l2 < -1e-9) out.anomalies.push_back(l2);
      order.push_back({std::sqrt(std::max(0.0, l2)), i});
    }
    std::sort(order.begin(), order.end());
    out.vectors.resize(d, d);
    for (int i = 0; i < d; ++i) {
      out.lambda_abs.push_back(order[i].first);
      out.vectors.col(i) = es.eigenvectors().col(order[i].second);
    }
    return out;
  }

  // general problem C^{-1}(A + B1); eigenvalues with visible imaginary part
  // are truncation artifacts and get discarded. The d^{+-eta} similarity has a
  // finite-section edge zone whose width scales with the coefficient decay
  // length, so artifacts can reach below M/2 for rougher cocycles; discards
  // inside the trustworthy window |lambda| <= M/4 signal a corrupted problem.
  const Eigen::MatrixXcd G = p.C.partialPivLu().solve(p.A + p.B1);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(G);
  if (es.info() != Eigen::Success) throw FactorizationFailure("general eigensolve failed");
  std::vector<std::pair<double, int>> order;
  const double interior_l2 = 0.0625 * static_cast<double>(p.M) * p.M;
  int discarded_interior = 0, interior_total = 0;
  for (int i = 0; i < d; ++i) {
    const cd l2 = es.eigenvalues()[i];
    if (l2.real() <= interior_l2) ++interior_total;
    if (std::abs(l2.imag()) > 1e-6) {
      ++out.discarded;
      if (l2.real() <= interior_l2) ++discarded_interior;
      continue;
    }
    if (l2.real() < -1e-9) out.anomalies.push_back(l2.real());
    order.push_back({std::sqrt(std::max(0.0, l2.real())), i});
  }
  if (discarded_interior * 10 > interior_total)
    throw SpuriousSpectrum("more than 10% of the interior Galerkin eigenvalues discarded");
  std::sort(order.begin(), order.end());
  out.vectors.resize(d, static_cast<int>(order.size()));
  for (size_t i = 0; i < order.size(); ++i) {
    out.lambda_abs.push_back(order[i].first);
    out.vectors.col(static_cast<int>(i)) = es.eigenvectors().col(order[i].second);
  }
  return out;
}

namespace {

using ld = long double;

struct Mat2ld {
  ld a = 1, b = 0, c = 0, d = 1;
};

ld trace_minus_two(const Mat2ld& m) { return m.a + m.d - 2.0L; }

std::array<std::complex<ld>, 2> multipliers_of(const Mat2ld& m) {
  const std::complex<ld> tr(m.a + m.d, 0), det(m.a * m.d - m.b * m.c, 0);
  const std::complex<ld> sq = std::sqrt(tr * tr / 4.0L - det);
  return {tr / 2.0L + sq, tr / 2.0L - sq};
}

ld residual_of(const Mat2ld& m) {
  const auto mu = multipliers_of(m);
  return std::min(std::abs(mu[0] - std::complex<ld>(1, 0)),
                  std::abs(mu[1] - std::complex<ld>(1, 0)));
}

// mode count that keeps the dropped tail below ~1e-18 of the coefficient mass
int synthesis_modes(const FourierData& fd) {
  const int half = fd.grid() / 2 - 1;
  for (int m = 16; m < half; m *= 2)
    if (fd.tail_mass_beyond(m) < 1e-18) return m;
  return half;
}

}  // namespace

HillIntegrator::HillIntegrator(const Cocycle& coc, long n, double eta) : n_(n), eta_(eta) {
  if (coc.level() != n) throw Error("HillIntegrator: cocycle level does not match n");
  const FourierData d2 = coc.fourier_of_power(2.0);
  d2_modes_ = d2.modes(synthesis_modes(d2));
  if (eta != 0.0) v_modes_ = coc.log_deriv_modes(coc.grid() / 4);
}

const HillIntegrator::Sampler& HillIntegrator::sampler(int steps) const {
  auto it = cache_.find(steps);
  if (it != cache_.end()) return it->second;

  Sampler s;
  s.steps = steps;
  const int pts = 2 * steps + 1;
  s.d2.resize(pts);
  if (eta_ != 0.0) s.v.resize(pts);

  const int m2 = (static_cast<int>(d2_modes_.size()) - 1) / 2;
  const int mv = eta_ != 0.0 ? (static_cast<int>(v_modes_.size()) - 1) / 2 : 0;
  const int mmax = std::max(m2, mv);
  const ld step = static_cast<ld>(kTwoPi) / 2.0L / static_cast<ld>(steps);
  for (int j = 0; j < pts; ++j) {
    const ld t = step * j;
    std::complex<ld> zstep(cosl(static_cast<ld>(t)), sinl(static_cast<ld>(t)));
    std::complex<ld> zk(cosl(-mmax * t), sinl(-mmax * t));
    std::complex<ld> acc_d2(0, 0), acc_v(0, 0);
    for (int k = -mmax; k <= mmax; ++k) {
      if (std::abs(k) <= m2) {
        const cd c = d2_modes_[k + m2];
        acc_d2 += std::complex<ld>(c.real(), c.imag()) * zk;
      }
      if (eta_ != 0.0 && std::abs(k) <= mv) {
        const cd c = v_modes_[k + mv];
        acc_v += std::complex<ld>(c.real(), c.imag()) * zk;
      }
      zk *= zstep;
    }
    s.d2[j] = acc_d2.real();
    if (eta_ != 0.0) s.v[j] = acc_v.real();
  }
  return cache_.emplace(steps, std::move(s)).first->second;
}

namespace {

Mat2ld integrate_impl(const std::vector<ld>& d2s, const std::vector<ld>& vs, int S, long n,
                      double eta, ld lambda) {
  const ld h = static_cast<ld>(kTwoPi) / S;
  const ld n2 = static_cast<ld>(n) * n;
  const ld l2 = lambda * lambda;
  const ld et = static_cast<ld>(eta);
  const bool has_v = !vs.empty();

  ld Y[4] = {1, 0, 0, 1};  // row-major [H1, H2; H1', H2']
  ld k1[4], k2[4], k3[4], k4[4], tmp[4];
  auto rhs = [&](int half_idx, const ld* y, ld* out) {
    const ld q = l2 * d2s[half_idx] - n2 -
                 (has_v ? 2.0L * et * static_cast<ld>(n) * vs[half_idx] : 0.0L);
    const ld damp = has_v ? 2.0L * et * vs[half_idx] : 0.0L;
    out[0] = y[2];
    out[1] = y[3];
    out[2] = -q * y[0] + damp * y[2];
    out[3] = -q * y[1] + damp * y[3];
  };
  for (int i = 0; i < S; ++i) {
    rhs(2 * i, Y, k1);
    for (int j = 0; j < 4; ++j) tmp[j] = Y[j] + 0.5L * h * k1[j];
    rhs(2 * i + 1, tmp, k2);
    for (int j = 0; j < 4; ++j) tmp[j] = Y[j] + 0.5L * h * k2[j];
    rhs(2 * i + 1, tmp, k3);
    for (int j = 0; j < 4; ++j) tmp[j] = Y[j] + h * k3[j];
    rhs(2 * i + 2, tmp, k4);
    for (int j = 0; j < 4; ++j) Y[j] += h / 6.0L * (k1[j] + 2.0L * k2[j] + 2.0L * k3[j] + k4[j]);
  }
  return {Y[0], Y[1], Y[2], Y[3]};
}

MonodromyResult pack_result(int steps, ld lambda, const Mat2ld& m) {
  MonodromyResult r;
  r.lambda = static_cast<double>(lambda);
  r.monodromy << static_cast<double>(m.a), static_cast<double>(m.b), static_cast<double>(m.c),
      static_cast<double>(m.d);
  const auto mu = multipliers_of(m);
  r.multipliers = {cd(static_cast<double>(mu[0].real()), static_cast<double>(mu[0].imag())),
                   cd(static_cast<double>(mu[1].real()), static_cast<double>(mu[1].imag()))};
  r.periodicity_residual = static_cast<double>(residual_of(m));
  r.det_error = static_cast<double>(std::abs(m.a * m.d - m.b * m.c - 1.0L));
  r.steps = steps;
  return r;
}

}  // namespace

MonodromyResult HillIntegrator::run(double lambda, int steps) const {
  if (steps < 1024) throw Error("monodromy: steps must be >= 1024");
  const Sampler& s = sampler(steps);
  const Mat2ld m = integrate_impl(s.d2, s.v, steps, n_, eta_, static_cast<ld>(lambda));
  return pack_result(steps, static_cast<ld>(lambda), m);
}

MonodromyResult HillIntegrator::run_checked(double lambda, int steps) const {
  MonodromyResult r = run(lambda, steps);
  const MonodromyResult r2 = run(lambda, 2 * steps);
  r.step_halving_error = std::abs(r2.periodicity_residual - r.periodicity_residual);
  if (r.step_halving_error > 1e-6)
    throw StepTooLarge("halving the step changes the periodicity residual by more than 1e-6");
  return r;
}

LocatedRoot HillIntegrator::locate(double lambda_guess, int steps) const {
  if (std::abs(lambda_guess) < 1e-12) throw ZeroLambda("cannot locate a root at lambda = 0");
  const int s_coarse = std::max(8192, steps / 8);

  LocatedRoot out;
  ld lam = static_cast<ld>(lambda_guess);
  int iters = 0;

  // Newton within one sampler; only traces from the same discretization are
  // comparable, so the best-seen fallback is tracked per phase.
  auto newton = [&](int s, int max_iter) {
    const Sampler& smp = sampler(s);
    ld best_lam = lam, best_abs_tr = 1e30L;
    for (int it = 0; it < max_iter; ++it) {
      const ld t0 = trace_minus_two(integrate_impl(smp.d2, smp.v, s, n_, eta_, lam));
      if (std::abs(t0) < best_abs_tr) {
        best_abs_tr = std::abs(t0);
        best_lam = lam;
      }
      const ld dl = 1e-9L * std::max(1.0L, std::abs(lam));
      const ld t1 = trace_minus_two(integrate_impl(smp.d2, smp.v, s, n_, eta_, lam + dl));
      const ld slope = (t1 - t0) / dl;
      ++iters;
      if (slope == 0.0L) break;
      const ld cap = 1e-3L * std::max(1.0L, std::abs(lam));
      const ld step = std::clamp(-t0 / slope, -cap, cap);
      lam += step;
      if (std::abs(step) < 1e-17L * std::max(1.0L, std::abs(lam))) break;
    }
    const ld t_end = trace_minus_two(integrate_impl(smp.d2, smp.v, s, n_, eta_, lam));
    if (std::abs(t_end) > best_abs_tr) lam = best_lam;  // tangential discriminant: keep best
  };

  newton(s_coarse, 8);
  newton(steps, 4);

  const Sampler& fine = sampler(steps);
  const Mat2ld mf = integrate_impl(fine.d2, fine.v, steps, n_, eta_, lam);
  const MonodromyResult r = pack_result(steps, lam, mf);
  out.lambda = r.lambda;
  out.periodicity_residual = r.periodicity_residual;
  out.det_error = r.det_error;
  out.steps = steps;
  out.iterations = iters;
  return out;
}

MonodromyResult monodromy(const Cocycle& coc, long n, double eta, double lambda, int steps) {
  return HillIntegrator(coc, n, eta).run_checked(lambda, steps);
}

LocatedRoot locate_periodic_eigenvalue(const Cocycle& coc, long n, double eta,
                                       double lambda_guess, int steps) {
  return HillIntegrator(coc, n, eta).locate(lambda_guess, steps);
}

Reconstruction reconstruct_eigenvector(const HillProblem& p, const Eigen::VectorXcd& h,
                                       const CircleDiffeo& f, double lambda) {
  if (std::abs(lambda) < 1e-14) throw ZeroLambda("reconstruction divides by lambda");
  const int M = p.M;
  const int G = next_power_of_two(std::max(4 * (2 * M + 1), 64));
  const Cocycle coc(f, p.n, G);

  std::vector<cd> Hg = synthesize(h, G);
  Eigen::VectorXcd hp = h;
  for (int k = -M; k <= M; ++k) hp[k + M] *= cd(0.0, static_cast<double>(k));
  std::vector<cd> Hpg = synthesize(hp, G);

  std::vector<cd> up(G), lo(G);
  for (int j = 0; j < G; ++j) {
    const double d = coc.samples()[static_cast<size_t>(j)];
    up[j] = std::pow(d, 1.0 - p.eta) * Hg[j];
    lo[j] = std::pow(d, -p.eta) * (-Hpg[j] - static_cast<double>(p.n) * Hg[j]) / lambda;
  }

  Reconstruction rec;
  rec.upper = project_modes(up, M);
  rec.lower = project_modes(lo, M);

  const DiracBlock block = assemble_block(f, p.n, M, p.eta, DiracVariant::standard, G);
  Eigen::VectorXcd v(2 * (2 * M + 1));
  v << rec.upper, rec.lower;
  rec.rel_residual = (block.matrix * v - lambda * v).norm() / v.norm();
  return rec;
}

}  // namespace dirac_torus
