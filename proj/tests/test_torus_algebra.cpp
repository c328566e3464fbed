#include <cmath>
#include <random>

#include "dirac_torus/errors.hpp"
#include "dirac_torus/torus_algebra.hpp"
#include "doctest.h"

using namespace dirac_torus;

namespace {

const double kAlphaGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const double kAlpha = kAlphaGolden / 2.0;  // algebra twist: the rotation number is 2 alpha

CircleDiffeo test_diffeo() {
  return make_diffeo(CircleLift({{1, 0.3, 0.0}}), kAlphaGolden);
}

Symbol random_symbol(std::mt19937& rng, int freq, int lvl, int count) {
  std::uniform_int_distribution<int> um(-freq, freq), un(-lvl, lvl);
  std::normal_distribution<double> g(0.0, 1.0);
  Symbol s;
  for (int i = 0; i < count; ++i) s.add(um(rng), un(rng), cd(g(rng), g(rng)));
  return s;
}

GNSVector random_bandlimited(int N, int M, int band, unsigned seed) {
  // compositions spread Fourier support by sup|F'|; identities on truncations
  // need the input mass to sit well inside the stored band
  GNSVector x = GNSVector::zero(N, M);
  const GNSVector r = GNSVector::random(N, band, seed);
  for (int n = -N; n <= N; ++n)
    for (int k = -band; k <= band; ++k) x.level(n)[k + M] = r.level(n)[k + band];
  return x;
}

double symbol_dist(const Symbol& a, const Symbol& b) {
  double m = 0.0;
  for (const auto& [k, c] : a.support()) m = std::max(m, std::abs(c - b.at(k.first, k.second)));
  for (const auto& [k, c] : b.support()) m = std::max(m, std::abs(c - a.at(k.first, k.second)));
  return m;
}

// direct triple sum ((f*g)*h)(a) = sum f(b) g(c) h(a-b-c) e^{-2 pi i alpha (sigma(c,b)+sigma(a,b)+sigma(a,c))}
Symbol triple_product_oracle(const Symbol& f, const Symbol& g, const Symbol& h, double alpha) {
  auto sigma = [](std::pair<int, int> x, std::pair<int, int> y) {
    return static_cast<double>(x.first) * y.second - static_cast<double>(y.first) * x.second;
  };
  Symbol out;
  for (const auto& [b, fb] : f.support())
    for (const auto& [c, gc] : g.support())
      for (const auto& [e, he] : h.support()) {
        const std::pair<int, int> a{b.first + c.first + e.first, b.second + c.second + e.second};
        const double ph = -kTwoPi * alpha * (sigma(c, b) + sigma(a, b) + sigma(a, c));
        out.add(a.first, a.second, fb * gc * he * std::polar(1.0, ph));
      }
  return out;
}

}  // namespace

TEST_CASE("weyl_mul: commutation relation on delta symbols") {
  const Symbol f = Symbol::delta(1, 0), g = Symbol::delta(0, 1);
  const Symbol fg = weyl_mul(f, g, kAlpha);
  CHECK(std::abs(fg.at(1, 1) - std::polar(1.0, kTwoPi * kAlpha)) <= 1e-15);
  CHECK(fg.support().size() == 1);

  // Weyl relation exact for |a|, |b| <= 10
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = u(rng), n = u(rng), p = u(rng), q = u(rng);
    const Symbol prod = weyl_mul(Symbol::delta(m, n), Symbol::delta(p, q), kAlpha);
    const double sig = static_cast<double>(m) * q - static_cast<double>(p) * n;
    const cd expected = std::polar(1.0, kTwoPi * kAlpha * sig);
    CHECK(std::abs(prod.at(m + p, n + q) - expected) <= 1e-14);
    CHECK(prod.support().size() == 1);
  }
}

TEST_CASE("weyl_mul: identity element") {
  std::mt19937 rng(5);
  const Symbol g = random_symbol(rng, 4, 4, 6);
  CHECK(symbol_dist(weyl_mul(Symbol::delta(0, 0), g, kAlpha), g) <= 1e-15);
  CHECK(symbol_dist(weyl_mul(g, Symbol::delta(0, 0), kAlpha), g) <= 1e-15);
}

TEST_CASE("weyl_mul: associativity against the direct triple sum") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Symbol f = random_symbol(rng, 5, 5, 5);
    const Symbol g = random_symbol(rng, 5, 5, 5);
    const Symbol h = random_symbol(rng, 5, 5, 5);
    const Symbol oracle = triple_product_oracle(f, g, h, kAlpha);
    CHECK(symbol_dist(weyl_mul(weyl_mul(f, g, kAlpha), h, kAlpha), oracle) <= 1e-12);
    CHECK(symbol_dist(weyl_mul(f, weyl_mul(g, h, kAlpha), kAlpha), oracle) <= 1e-12);
  }
}

TEST_CASE("weyl_star: basis flip and involution") {
  const Symbol s = weyl_star(Symbol::delta(2, 3));
  CHECK(std::abs(s.at(-2, -3) - cd(1.0, 0.0)) == 0.0);
  std::mt19937 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol f = random_symbol(rng, 6, 6, 8);
    CHECK(symbol_dist(weyl_star(weyl_star(f)), f) == 0.0);
  }
}

TEST_CASE("weyl_star: anti-homomorphism") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Symbol f = random_symbol(rng, 5, 5, 5), g = random_symbol(rng, 5, 5, 5);
    const Symbol lhs = weyl_star(weyl_mul(f, g, kAlpha));
    const Symbol rhs = weyl_mul(weyl_star(g), weyl_star(f), kAlpha);
    CHECK(symbol_dist(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("trace_tau: values and positivity identity") {
  CHECK(trace_tau(Symbol::delta(0, 0)) == cd(1.0, 0.0));
  CHECK(trace_tau(Symbol::delta(2, 3)) == cd(0.0, 0.0));
  std::mt19937 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol f = random_symbol(rng, 5, 5, 7);
    double sum = 0.0;
    for (const auto& [k, c] : f.support()) sum += std::norm(c);
    const cd t = trace_tau(weyl_mul(weyl_star(f), f, kAlpha));
    CHECK(std::abs(t - cd(sum, 0.0)) <= 1e-12);
  }
}

TEST_CASE("state_omega: Haar moments reproduce the trace") {
  const MeasureCoeffs haar = MeasureCoeffs::haar();
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol f = random_symbol(rng, 5, 5, 7);
    CHECK(std::abs(state_omega(haar, f) - trace_tau(f)) == 0.0);
  }
}

TEST_CASE("state_omega: normalization and point mass") {
  CHECK(state_omega(MeasureCoeffs::haar(), Symbol::delta(0, 0)) == cd(1.0, 0.0));
  // point mass at z = 1: mu(m) = 1 for all m, so omega(f) = sum_m f(m, 0)
  const MeasureCoeffs pm = MeasureCoeffs::point_mass(0.0);
  Symbol f;
  f.add(0, 0, cd(0.5, 0.0));
  f.add(3, 0, cd(0.0, 1.0));
  f.add(-2, 0, cd(1.0, -1.0));
  f.add(1, 2, cd(9.0, 9.0));  // level != 0 does not contribute
  CHECK(std::abs(state_omega(pm, f) - cd(1.5, 0.0)) <= 1e-12);
}

TEST_CASE("state_omega: Gram matrices positive semidefinite") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> wt(0.1, 1.0);
  for (int family = 0; family < 20; ++family) {
    const MeasureCoeffs mu = MeasureCoeffs::convex_point_masses(
        {wt(rng), wt(rng), wt(rng), wt(rng), wt(rng)},
        {ang(rng), ang(rng), ang(rng), ang(rng), ang(rng)});
    REQUIRE(mu.positive_definite(4, 1e-12));
    std::vector<Symbol> fam;
    for (int i = 0; i < 5; ++i) fam.push_back(random_symbol(rng, 3, 3, 4));
    Eigen::MatrixXcd gram(fam.size(), fam.size());
    for (size_t i = 0; i < fam.size(); ++i)
      for (size_t j = 0; j < fam.size(); ++j)
        gram(i, j) = state_omega(mu, weyl_mul(weyl_star(fam[i]), fam[j], kAlpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (gram + gram.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("gns_apply: identity symbol") {
  const CircleDiffeo f = test_diffeo();
  const GNSVector x = GNSVector::random(3, 8, 99);
  const GNSVector y = gns_apply(Symbol::delta(0, 0), f, x);
  CHECK((y - x).norm() <= 1e-12);
}

TEST_CASE("gns_apply: pure shift") {
  const CircleDiffeo f = test_diffeo();
  const GNSVector x = GNSVector::random(3, 8, 100);
  const GNSVector y = gns_apply(Symbol::delta(0, 2), f, x);
  for (int n = -3; n <= 3; ++n) {
    if (n - 2 >= -3) {
      CHECK((y.level(n) - x.level(n - 2)).norm() <= 1e-12);
    } else {
      CHECK(y.level(n).norm() <= 1e-12);  // shifted out: dropped
    }
  }
}

TEST_CASE("gns_apply: trivial conjugator, F(z) = z multiplies by the rotated phase") {
  const CircleDiffeo f = make_diffeo(CircleLift(), kAlphaGolden);
  const GNSVector x = GNSVector::random(2, 6, 101);
  const GNSVector y = gns_apply(Symbol::delta(1, 0), f, x);
  // level n: multiplication by e^{i(theta + 2 pi n alpha-hat)}: one-frequency
  // shift times the phase e^{2 pi i n alpha-hat}
  for (int n = -2; n <= 2; ++n) {
    const cd phase = std::polar(1.0, kTwoPi * kAlphaGolden * n);
    for (int k = -6; k <= 5; ++k) {
      CHECK(std::abs(y.level(n)[k + 1 + 6] - phase * x.level(n)[k + 6]) <= 1e-12);
    }
    CHECK(std::abs(y.level(n)[0]) <= 1e-12);  // frequency -6 slot: shifted in as zero
  }
}

TEST_CASE("gns_apply: GNS homomorphism on truncations") {
  // random symbols confined to levels |n| <= N/4, compared on |n| <= N/2;
  // inputs band-limited so the one-step frequency spread stays inside M
  const CircleDiffeo f = test_diffeo();
  const int N = 8, M = 32;
  std::mt19937 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol a = random_symbol(rng, 2, N / 4, 4);
    const Symbol b = random_symbol(rng, 2, N / 4, 4);
    const GNSVector x = random_bandlimited(N, M, 4, 200 + trial);
    const GNSVector lhs = gns_apply(a, f, gns_apply(b, f, x));
    const GNSVector rhs = gns_apply(weyl_mul(a, b, f.half_rotation()), f, x);
    double gap = 0.0;
    for (int n = -N / 2; n <= N / 2; ++n) gap = std::max(gap, (lhs.level(n) - rhs.level(n)).norm());
    CHECK(gap <= 1e-8);
  }
}

TEST_CASE("gns_apply: star compatibility (adjoint on interior levels)") {
  const CircleDiffeo f = test_diffeo();
  const int N = 8, M = 16;
  std::mt19937 rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol a = random_symbol(rng, 2, 2, 4);
    // x, y supported on interior levels so truncation drops nothing
    GNSVector x = GNSVector::zero(N, M), y = GNSVector::zero(N, M);
    const GNSVector xr = GNSVector::random(N / 2, M, 300 + trial);
    const GNSVector yr = GNSVector::random(N / 2, M, 400 + trial);
    for (int n = -N / 2; n <= N / 2; ++n) {
      x.level(n) = xr.level(n);
      y.level(n) = yr.level(n);
    }
    const cd lhs = gns_apply(a, f, x).dot(y);              // <pi(a) x, y>
    const cd rhs = x.dot(gns_apply(weyl_star(a), f, y));   // <x, pi(a*) y>
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("gns_apply: Nyquist guard") {
  const CircleDiffeo f = test_diffeo();
  const GNSVector x = GNSVector::random(1, 8, 1);
  // grid is next_power_of_two(4 * 17) = 128; row frequency 64 is at Nyquist
  CHECK_THROWS_AS(gns_apply(Symbol::delta(64, 0), f, x), UnsupportedSymbol);
}

TEST_CASE("gns_convention_gap: zero for trivial conjugator, visible for generic") {
  const CircleDiffeo rot = make_diffeo(CircleLift(), kAlphaGolden);
  const CircleDiffeo f = test_diffeo();
  const Symbol z = Symbol::delta(1, 0);
  CHECK(gns_convention_gap(z, rot, 2, 8) <= 1e-12);
  CHECK(gns_convention_gap(z, f, 2, 8) > 1e-2);  // the two readings genuinely differ
}

TEST_CASE("modular_apply: tracial case has Delta = I and S = J") {
  const CircleDiffeo rot = make_diffeo(CircleLift(), kAlphaGolden);
  const GNSVector x = GNSVector::random(3, 8, 7);
  const GNSVector dx = modular_apply(ModularOp::DeltaPower, 1.0, rot, x);
  CHECK((dx - x).norm() <= 1e-12);
  const GNSVector sx = modular_apply(ModularOp::S, 0.0, rot, x);
  const GNSVector jx = modular_apply(ModularOp::J, 0.0, rot, x);
  CHECK((sx - jx).norm() <= 1e-12);
}

TEST_CASE("modular_apply: S is an involution") {
  const CircleDiffeo f = test_diffeo();
  for (unsigned seed : {1u, 2u, 3u}) {
    const GNSVector x = random_bandlimited(3, 32, 4, seed);
    const GNSVector ssx = modular_apply(ModularOp::S, 0.0, f, modular_apply(ModularOp::S, 0.0, f, x));
    CHECK((ssx - x).norm() <= 1e-9 * x.norm());
  }
}

TEST_CASE("modular_apply: S = J Delta^{1/2}") {
  const CircleDiffeo f = test_diffeo();
  for (unsigned seed : {4u, 5u}) {
    const GNSVector x = random_bandlimited(3, 32, 4, seed);
    const GNSVector sx = modular_apply(ModularOp::S, 0.0, f, x);
    const GNSVector jdx =
        modular_apply(ModularOp::J, 0.0, f, modular_apply(ModularOp::DeltaPower, 0.5, f, x));
    CHECK((sx - jdx).norm() <= 1e-8 * x.norm());
  }
}

TEST_CASE("modular_apply: Delta powers compose") {
  const CircleDiffeo f = test_diffeo();
  const GNSVector x = random_bandlimited(2, 32, 4, 77);
  const GNSVector a =
      modular_apply(ModularOp::DeltaPower, 0.3, f, modular_apply(ModularOp::DeltaPower, 0.7, f, x));
  const GNSVector b = modular_apply(ModularOp::DeltaPower, 1.0, f, x);
  CHECK((a - b).norm() <= 1e-9 * x.norm());
}

TEST_CASE("serialization: symbol and GNS vector round-trip") {
  std::mt19937 rng(71);
  const Symbol f = random_symbol(rng, 6, 6, 8);
  const Symbol back = symbol_from_json(symbol_to_json(f));
  CHECK(symbol_dist(f, back) == 0.0);

  const GNSVector x = GNSVector::random(3, 8, 400);
  const GNSVector y = gns_from_json(gns_to_json(x));
  CHECK((x - y).norm() == 0.0);
  CHECK(y.N == 3);
  CHECK(y.M == 8);
}
