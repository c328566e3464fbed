#include <cmath>
#include <set>

#include "dirac_torus/dirac_spectral.hpp"
#include "dirac_torus/errors.hpp"
#include "doctest.h"

using namespace dirac_torus;

namespace {

const double kAlphaGolden = (std::sqrt(5.0) - 1.0) / 2.0;

CircleDiffeo rotation() { return make_diffeo(CircleLift(), kAlphaGolden); }
CircleDiffeo test_diffeo() {
  return make_diffeo(CircleLift({{1, 0.3, 0.0}}), kAlphaGolden);
}

// the undeformed block of level n: off-diagonal diag(ik - n) and its adjoint
Eigen::MatrixXcd undeformed_block(long n, int M) {
  const int d = 2 * M + 1;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int k = -M; k <= M; ++k) {
    b(k + M, d + k + M) = cd(-static_cast<double>(n), k);
    b(d + k + M, k + M) = cd(-static_cast<double>(n), -k);
  }
  return b;
}

std::vector<double> sorted_abs_positive(const SpectrumReport& rep) {
  std::vector<double> v;
  for (const auto& e : rep.entries)
    if (e.lambda > 0) v.push_back(e.lambda);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("assemble_block: undeformed exactness for the trivial conjugator") {
  const CircleDiffeo rot = rotation();
  for (long n : {-3L, -1L, 0L, 2L, 3L}) {
    for (double eta : {0.0, 0.5, 1.0}) {
      const DiracBlock b = assemble_block(rot, n, 16, eta);
      CHECK((b.matrix - undeformed_block(n, 16)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("block_spectrum: exact eigenvalues in the tracial case") {
  const CircleDiffeo rot = rotation();
  for (long n : {-3L, -2L, -1L, 0L, 1L, 2L, 3L}) {
    const int M = 32;
    const SpectrumReport rep = block_spectrum(assemble_block(rot, n, M, 0.0));
    std::multiset<double> expected;
    for (int k = -M; k <= M; ++k) {
      expected.insert(std::sqrt(static_cast<double>(k) * k + static_cast<double>(n) * n));
      expected.insert(-std::sqrt(static_cast<double>(k) * k + static_cast<double>(n) * n));
    }
    REQUIRE(rep.entries.size() == expected.size());
    auto it = expected.begin();
    for (const auto& e : rep.entries) {
      CHECK(std::abs(e.lambda - *it) <= 1e-10);
      ++it;
    }
  }
}

TEST_CASE("block_spectrum: n = 2, M = 2 eigenvalue list") {
  const SpectrumReport rep = block_spectrum(assemble_block(rotation(), 2, 8, 0.0));
  const auto pos = sorted_abs_positive(rep);
  CHECK(pos[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pos[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(pos[2] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(pos[3] == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  CHECK(pos[4] == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
}

TEST_CASE("block_spectrum: n = 0 kernel has dimension 2") {
  const SpectrumReport rep = block_spectrum(assemble_block(rotation(), 0, 16, 0.0));
  int zeros = 0;
  for (const auto& e : rep.entries)
    if (std::abs(e.lambda) <= 1e-10) ++zeros;
  CHECK(zeros == 2);
}

TEST_CASE("assemble_block: eta = 0 and eta = 1 are conjugate truncations") {
  const CircleDiffeo f = test_diffeo();
  for (long n : {1L, 2L}) {
    const auto e0 = sorted_abs_positive(block_spectrum(assemble_block(f, n, 64, 0.0)));
    const auto e1 = sorted_abs_positive(block_spectrum(assemble_block(f, n, 64, 1.0)));
    for (int i = 0; i < 20; ++i) CHECK(std::abs(e0[i] - e1[i]) <= 1e-6);
  }
}

TEST_CASE("assemble_block: truncation stability of interior eigenvalues") {
  // deformed eigenfunctions spread Fourier mass by a factor of sup d ~ 1.86,
  // so eigenvalues are truncation-stable for |lambda| <= M/4 (at M/2 the
  // M = 32 -> 64 change is ~1e-3)
  const CircleDiffeo f = test_diffeo();
  const auto a = sorted_abs_positive(block_spectrum(assemble_block(f, 1, 32, 0.0)));
  const auto b = sorted_abs_positive(block_spectrum(assemble_block(f, 1, 64, 0.0)));
  int checked = 0;
  for (size_t i = 0; i < a.size() && a[i] <= 8.0; ++i, ++checked)  // |lambda| <= M/4
    CHECK(std::abs(a[i] - b[i]) <= 1e-8);
  CHECK(checked >= 10);
}

TEST_CASE("assemble_block: chirality is structural") {
  const CircleDiffeo f = test_diffeo();
  const DiracBlock b = assemble_block(f, 2, 16, 0.5);
  const int d = 2 * 16 + 1;
  // gamma B gamma = -B means the diagonal blocks vanish
  CHECK(b.matrix.block(0, 0, d, d).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.matrix.block(d, d, d, d).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.matrix - b.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble_block: cutoff guard fires when the tail is fat") {
  const CircleDiffeo f = test_diffeo();
  CHECK_THROWS_AS(assemble_block(f, 1, 8, 0.5), CutoffTooSmall);
  CHECK_NOTHROW(assemble_block(f, 1, 64, 0.5));
}

TEST_CASE("assemble_block: growth_weighted equals standard for the pure rotation") {
  const CircleDiffeo rot = rotation();
  const DiracBlock a = assemble_block(rot, 3, 16, 0.0, DiracVariant::standard);
  const DiracBlock b = assemble_block(rot, 3, 16, 0.0, DiracVariant::growth_weighted);
  CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("assemble_block: growth_weighted level for a generic diffeomorphism") {
  const CircleDiffeo f = test_diffeo();
  const DiracBlock b = assemble_block(f, 2, 16, 0.0, DiracVariant::growth_weighted);
  const GrowthTable g = growth_sequence(f, 2, 4096);
  const double a2 = 1.0 / g.gamma[1] + 1.0 / g.gamma[2];
  // diagonal of the upper block carries ik - a_{f,n}
  const Eigen::MatrixXcd u = b.upper_right();
  // Toeplitz factors have unit mean, so the diagonal mean recovers -a approximately
  CHECK(std::abs(u(16, 16).real() + a2) <= 0.2);
  const SpectrumReport rep = block_spectrum(b);  // hermitian, +/- paired
  CHECK(rep.entries.front().lambda < 0);
}

TEST_CASE("inverse_norm_report: tracial case is tight") {
  const CircleDiffeo rot = rotation();
  const auto rows = inverse_norm_report(rot, {1, 2, 3, 5}, 16);
  for (const auto& r : rows) {
    CHECK(r.inv_norm == doctest::Approx(1.0 / std::labs(r.n)).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(1.0 / std::labs(r.n)).epsilon(1e-9));
    CHECK(r.satisfied);
  }
}

TEST_CASE("inverse_norm_report: bound holds for n = 1..20") {
  const CircleDiffeo f = test_diffeo();
  std::vector<long> ns;
  for (long n = 1; n <= 20; ++n) ns.push_back(n);
  const auto rows = inverse_norm_report(f, ns, 64);
  double worst = 0.0;
  for (const auto& r : rows) {
    CHECK(r.satisfied);
    worst = std::max(worst, r.inv_norm * std::labs(r.n) / (r.bound * std::labs(r.n)));
  }
  CHECK(worst <= 1.0 + 1e-8);  // max_n ||D^-1|| |n| / gamma(n) <= 1
}

TEST_CASE("inverse_norm_report: rejects n = 0") {
  CHECK_THROWS_AS(inverse_norm_report(rotation(), {0, 1}, 16), Error);
}

TEST_CASE("structure_checks: trivial conjugator") {
  const StructureReport rep = structure_checks(rotation(), 2, 16);
  CHECK(rep.j_squared_residual <= 1e-10);
  CHECK(rep.j_gamma_residual <= 1e-10);
  CHECK(rep.gamma_squared_residual == 0.0);
}

TEST_CASE("structure_checks: generic diffeomorphism, interior compression") {
  const StructureReport rep = structure_checks(test_diffeo(), 2, 64);
  CHECK(rep.j_squared_residual <= 1e-8);
  CHECK(rep.j_gamma_residual <= 1e-10);
}

TEST_CASE("hermitization gap: interior part vanishes, edge part stays confined") {
  CHECK(hermitization_gap(rotation(), 2, 16, 0.5).full <= 1e-13);
  const CircleDiffeo f = test_diffeo();
  const HermitizationGap g16 = hermitization_gap(f, 1, 16, 0.5);
  const HermitizationGap g32 = hermitization_gap(f, 1, 32, 0.5);
  CHECK(g32.interior < g16.interior);
  CHECK(g32.interior <= 1e-12);
  // the edge discrepancy is O(M) in norm but exponentially localized; the
  // hermitized block is what keeps the eigenproblem honest
  CHECK(g32.full > 0.1);
}
