#include "dirac_torus/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

ElementSpec ElementSpec::identity(int n) {
  ElementSpec a;
  a.cutoff_N = n;
  a.terms.push_back(ElementTerm{});
  return a;
}

ElementSpec ElementSpec::diagonal_monomial(int m, int n) {
  ElementSpec a;
  a.cutoff_N = n;
  ElementTerm t;
  t.trig[m] = cd(1.0, 0.0);
  a.terms.push_back(std::move(t));
  return a;
}

ElementSpec ElementSpec::shift(int l, int n) {
  ElementSpec a;
  a.cutoff_N = n;
  ElementTerm t;
  t.shift = l;
  a.terms.push_back(std::move(t));
  return a;
}

ElementSpec ElementSpec::product_monomial(int m, int l, int n) {
  ElementSpec a;
  a.cutoff_N = n;
  ElementTerm t;
  t.trig[m] = cd(1.0, 0.0);
  t.shift = l;
  a.terms.push_back(std::move(t));
  return a;
}

int ElementSpec::max_shift() const {
  int s = 0;
  for (const auto& t : terms) s = std::max(s, std::abs(t.shift));
  return s;
}

ElementSpec ElementSpec::star() const {
  // (c P pi(x) lambda^l P)^* = conj(c) P lambda^{-l} pi(x^*) P; moving the
  // shift to the right turns the diagonal factor into F^* o f^{n+l}.
  ElementSpec out;
  out.cutoff_N = cutoff_N;
  for (const auto& t : terms) {
    ElementTerm s;
    s.shift = -t.shift;
    s.level_offset = t.level_offset + t.shift;
    s.coefficient = std::conj(t.coefficient);
    // conj(F)(z) = sum_m conj(F^(m)) z^{-m}
    for (const auto& [m, c] : t.trig) s.trig[-m] = std::conj(c);
    out.terms.push_back(std::move(s));
  }
  return out;
}

BlockOp& BlockOp::add_scaled(const BlockOp& other, cd scale) {
  for (const auto& [key, mat] : other.blocks) {
    auto it = blocks.find(key);
    if (it == blocks.end())
      blocks[key] = scale * mat;
    else
      it->second += scale * mat;
  }
  return *this;
}

BlockOp BlockOp::adjoint() const {
  BlockOp out;
  out.block_dim = block_dim;
  for (const auto& [key, mat] : blocks) out.blocks[{key.second, key.first}] = mat.adjoint();
  return out;
}

BlockOp BlockOp::mul(const BlockOp& other) const {
  BlockOp out;
  out.block_dim = block_dim;
  for (const auto& [ka, ma] : blocks)
    for (const auto& [kb, mb] : other.blocks) {
      if (ka.second != kb.first) continue;
      auto key = std::make_pair(ka.first, kb.second);
      auto it = out.blocks.find(key);
      if (it == out.blocks.end())
        out.blocks[key] = ma * mb;
      else
        it->second += ma * mb;
    }
  return out;
}

double BlockOp::frobenius() const {
  double s = 0.0;
  for (const auto& [key, mat] : blocks) s += mat.squaredNorm();
  return std::sqrt(s);
}

bool BlockOp::level_diagonal() const {
  for (const auto& [key, mat] : blocks)
    if (key.first != key.second) return false;
  return true;
}

namespace {

// deterministic level-indexed vector for power iteration
std::map<long, Eigen::VectorXcd> seed_vector(const BlockOp& x) {
  std::map<long, Eigen::VectorXcd> v;
  for (const auto& [key, mat] : x.blocks) {
    if (!v.count(key.second)) {
      Eigen::VectorXcd u(mat.cols());
      for (int i = 0; i < u.size(); ++i)
        u[i] = cd(1.0 + 0.37 * std::sin(1.0 + i + key.second), 0.21 * std::cos(2.0 + i));
      v[key.second] = u;
    }
  }
  return v;
}

double vec_norm(const std::map<long, Eigen::VectorXcd>& v) {
  double s = 0.0;
  for (const auto& [n, u] : v) s += u.squaredNorm();
  return std::sqrt(s);
}

std::map<long, Eigen::VectorXcd> apply(const BlockOp& x,
                                       const std::map<long, Eigen::VectorXcd>& v,
                                       bool adjoint_side) {
  std::map<long, Eigen::VectorXcd> out;
  for (const auto& [key, mat] : x.blocks) {
    const long src = adjoint_side ? key.first : key.second;
    const long dst = adjoint_side ? key.second : key.first;
    auto it = v.find(src);
    if (it == v.end()) continue;
    Eigen::VectorXcd term = adjoint_side ? (mat.adjoint() * it->second).eval()
                                         : (mat * it->second).eval();
    auto jt = out.find(dst);
    if (jt == out.end())
      out[dst] = term;
    else
      jt->second += term;
  }
  return out;
}

}  // namespace

double BlockOp::operator_norm(int iterations) const {
  if (blocks.empty()) return 0.0;
  auto v = seed_vector(*this);
  double nv = vec_norm(v);
  if (nv == 0.0) return 0.0;
  for (auto& [n, u] : v) u /= nv;
  double sigma2 = 0.0, prev = 0.0;
  for (int it = 0; it < iterations; ++it) {
    auto w = apply(*this, v, false);
    auto g = apply(*this, w, true);  // X^H X v
    const double ng = vec_norm(g);
    if (ng == 0.0) return 0.0;
    sigma2 = ng;  // Rayleigh-type estimate since ||v|| = 1
    for (auto& [n, u] : g) u /= ng;
    v = std::move(g);
    if (it > 8 && std::abs(sigma2 - prev) < 1e-13 * sigma2) break;
    prev = sigma2;
  }
  return std::sqrt(sigma2);
}

BlockOp BlockOp::compressed(long level_bound, int freq_keep, int m, bool doubled) const {
  const int d = 2 * m + 1;
  const int di = 2 * freq_keep + 1;
  BlockOp out;
  out.block_dim = doubled ? 2 * di : di;
  for (const auto& [key, mat] : blocks) {
    if (std::labs(key.first) > level_bound || std::labs(key.second) > level_bound) continue;
    if (!doubled) {
      out.blocks[key] = mat.block(m - freq_keep, m - freq_keep, di, di);
      continue;
    }
    Eigen::MatrixXcd c(2 * di, 2 * di);
    c.block(0, 0, di, di) = mat.block(m - freq_keep, m - freq_keep, di, di);
    c.block(0, di, di, di) = mat.block(m - freq_keep, d + m - freq_keep, di, di);
    c.block(di, 0, di, di) = mat.block(d + m - freq_keep, m - freq_keep, di, di);
    c.block(di, di, di, di) = mat.block(d + m - freq_keep, d + m - freq_keep, di, di);
    out.blocks[key] = c;
  }
  return out;
}

DeformedPhaseCalculus make_phase_calculus(const CircleDiffeo& f, int N, int M, double eta,
                                          int grid_size) {
  DeformedPhaseCalculus calc;
  calc.N = N;
  calc.M = M;
  calc.eta = eta;
  calc.f = &f;
  const int G = grid_size ? grid_size : next_power_of_two(std::max(4 * (2 * M + 1), 64));
  for (long n = -N; n <= N; ++n) {
    if (n == 0) continue;
    calc.levels.push_back(n);
    calc.cocycles.emplace(n, Cocycle(f, n, G));
    const DiracBlock b = assemble_block(f, n, M, eta, DiracVariant::standard, G);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.matrix);
    if (es.info() != Eigen::Success) throw EigensolveFailure("phase calculus eigensolve failed");
    if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-10)
      throw SingularD("truncated Dirac block has an eigenvalue below 1e-10");
    const auto& V = es.eigenvectors();
    const auto& w = es.eigenvalues();
    Eigen::VectorXd sgn(w.size()), awp(w.size()), awi(w.size());
    for (int i = 0; i < w.size(); ++i) {
      sgn[i] = w[i] >= 0 ? 1.0 : -1.0;
      awp[i] = std::abs(w[i]);
      awi[i] = 1.0 / std::abs(w[i]);
    }
    calc.D[n] = b.matrix;
    calc.Fphase[n] = V * sgn.asDiagonal() * V.adjoint();
    calc.absD[n] = V * awp.asDiagonal() * V.adjoint();
    calc.absDinv[n] = V * awi.asDiagonal() * V.adjoint();
  }
  return calc;
}

namespace {

// grid samples of F o f^{n_eff} and its theta-derivative for one term
struct TermFunctions {
  std::vector<cd> w, wprime;
};

TermFunctions term_functions(const ElementTerm& t, const CircleDiffeo& f, long n, int G) {
  TermFunctions tf;
  tf.w.assign(G, cd(1.0, 0.0));
  tf.wprime.assign(G, cd(0.0, 0.0));
  if (t.trig.empty()) return tf;

  const long n_eff = n + t.level_offset;
  for (int j = 0; j < G; ++j) {
    const double theta = kTwoPi * j / G;
    const auto lp = f.iterate_lift(2 * n_eff, theta);
    cd w(0.0, 0.0), wp(0.0, 0.0);
    for (const auto& [m, c] : t.trig) {
      const cd e = c * std::polar(1.0, m * lp.value);
      w += e;
      wp += e * cd(0.0, static_cast<double>(m)) * lp.derivative;  // d/dtheta of e^{imF_n}
    }
    tf.w[j] = w;
    tf.wprime[j] = wp;
  }
  return tf;
}

Eigen::MatrixXcd toeplitz_of(const std::vector<cd>& samples, int m) {
  return FourierData(samples).toeplitz(m);
}

}  // namespace

// Doubled operator diag-part of A with d-power weights: upper component blocks
// get d_n^{pu} (...) d_{n-l}^{qu}, lower d_n^{pl} (...) d_{n-l}^{ql}.
static BlockOp conjugated_element(const ElementSpec& a, const DeformedPhaseCalculus& calc,
                                  double pu, double qu, double pl, double ql) {
  const int M = calc.M;
  const int d = 2 * M + 1;
  BlockOp out;
  out.block_dim = 2 * d;
  for (const auto& t : a.terms) {
    for (long n : calc.levels) {
      const long nc = n - t.shift;
      if (std::labs(n) > a.cutoff_N || std::labs(nc) > a.cutoff_N) continue;
      if (std::find(calc.levels.begin(), calc.levels.end(), nc) == calc.levels.end()) continue;

      const auto& dn = calc.cocycles.at(n).samples();
      const TermFunctions tf = term_functions(t, *calc.f, n, static_cast<int>(dn.size()));
      const auto& dc = calc.cocycles.at(nc).samples();
      const int G = static_cast<int>(dn.size());

      std::vector<cd> up(G), lo(G);
      for (int j = 0; j < G; ++j) {
        const double wu = (pu || qu) ? std::pow(dn[j], pu) * std::pow(dc[j], qu) : 1.0;
        const double wl = (pl || ql) ? std::pow(dn[j], pl) * std::pow(dc[j], ql) : 1.0;
        up[j] = t.coefficient * tf.w[j] * wu;
        lo[j] = t.coefficient * tf.w[j] * wl;
      }
      Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
      blk.block(0, 0, d, d) = toeplitz_of(up, M);
      blk.block(d, d, d, d) = toeplitz_of(lo, M);
      auto key = std::make_pair(n, nc);
      auto it = out.blocks.find(key);
      if (it == out.blocks.end())
        out.blocks[key] = blk;
      else
        it->second += blk;
    }
  }
  return out;
}

DerivationResult deformed_derivation(const ElementSpec& a, const DeformedPhaseCalculus& calc) {
  const int M = calc.M;
  const int d = 2 * M + 1;
  const double eta = calc.eta;
  BlockOp op;
  op.block_dim = 2 * d;
  for (const auto& t : a.terms) {
    for (long n : calc.levels) {
      const long nc = n - t.shift;
      if (std::labs(n) > a.cutoff_N || std::labs(nc) > a.cutoff_N) continue;
      if (std::find(calc.levels.begin(), calc.levels.end(), nc) == calc.levels.end()) continue;

      const auto& dn = calc.cocycles.at(n).samples();
      const TermFunctions tf = term_functions(t, *calc.f, n, static_cast<int>(dn.size()));
      const auto& dc = calc.cocycles.at(nc).samples();
      const int G = static_cast<int>(dn.size());
      const double l = static_cast<double>(t.shift);

      // [L, pi(x) lambda^l] = (M_{W'} - l M_W) lambda^l, [L*, .] = (-M_{W'} - l M_W) lambda^l
      std::vector<cd> up(G), lo(G);
      for (int j = 0; j < G; ++j) {
        const cd comm_u = tf.wprime[j] - l * tf.w[j];
        const cd comm_l = -tf.wprime[j] - l * tf.w[j];
        up[j] = t.coefficient * std::pow(dn[j], eta - 1.0) * comm_u * std::pow(dc[j], -eta);
        lo[j] = t.coefficient * std::pow(dn[j], -eta) * comm_l * std::pow(dc[j], eta - 1.0);
      }
      Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
      blk.block(0, d, d, d) = cd(0.0, 1.0) * toeplitz_of(up, M);
      blk.block(d, 0, d, d) = cd(0.0, 1.0) * toeplitz_of(lo, M);
      auto key = std::make_pair(n, nc);
      auto it = op.blocks.find(key);
      if (it == op.blocks.end())
        op.blocks[key] = blk;
      else
        it->second += blk;
    }
  }
  DerivationResult res;
  res.norm = op.operator_norm();
  res.op = std::move(op);
  return res;
}

DerivationResult deformed_derivation(const ElementSpec& a, const CircleDiffeo& f, int n_levels,
                                     int m, double eta) {
  return deformed_derivation(a, make_phase_calculus(f, n_levels, m, eta));
}

BlockOp four_term_commutator(const BlockOp& f_phase, const BlockOp& abs_d,
                             const BlockOp& abs_d_inv, const BlockOp& c_plus,
                             const BlockOp& c_minus) {
  BlockOp lhs = f_phase.mul(c_plus);
  lhs.add_scaled(c_minus.mul(f_phase), cd(-1.0, 0.0));
  // associate against the element first: A usually has far fewer blocks than
  // the level-diagonal calculus operators
  BlockOp t2 = f_phase.mul(abs_d.mul(c_plus)).mul(abs_d_inv);
  t2.add_scaled(abs_d_inv.mul(c_minus.mul(abs_d)).mul(f_phase), cd(-1.0, 0.0));
  lhs.add_scaled(t2, cd(1.0, 0.0));
  BlockOp out;
  out.block_dim = lhs.block_dim;
  for (auto& [key, mat] : lhs.blocks) out.blocks[key] = cd(0.0, 1.0) * mat;
  return out;
}

CommutatorReport fredholm_commutator(const ElementSpec& a, const DeformedPhaseCalculus& calc,
                                     bool want_singular_values, bool want_norms) {
  const int M = calc.M;
  const double eta = calc.eta;

  BlockOp Fb, Da, Di;
  Fb.block_dim = Da.block_dim = Di.block_dim = 2 * (2 * M + 1);
  for (long n : calc.levels) {
    Fb.blocks[{n, n}] = calc.Fphase.at(n);
    Da.blocks[{n, n}] = calc.absD.at(n);
    Di.blocks[{n, n}] = calc.absDinv.at(n);
  }

  // Gamma_eta = diag(Delta^{1-eta}, Delta^eta)
  const BlockOp Cp = conjugated_element(a, calc, 1.0 - eta, eta - 1.0, eta, -eta);
  const BlockOp Cm = conjugated_element(a, calc, eta - 1.0, 1.0 - eta, -eta, eta);
  const BlockOp plain = conjugated_element(a, calc, 0.0, 0.0, 0.0, 0.0);

  const BlockOp lhs = four_term_commutator(Fb, Da, Di, Cp, Cm);
  const DerivationResult der = deformed_derivation(a, calc);
  BlockOp rhs = Di.mul(der.op);
  rhs.add_scaled(der.op.mul(Di), cd(1.0, 0.0));

  BlockOp gap_op = lhs;
  gap_op.add_scaled(rhs, cd(-1.0, 0.0));

  CommutatorReport rep;
  rep.N = calc.N;
  rep.M = M;
  rep.eta = eta;
  rep.interior_levels = std::max<long>(1, calc.N - a.max_shift());
  rep.interior_freqs = M / 2;
  const BlockOp gap_c = gap_op.compressed(rep.interior_levels, rep.interior_freqs, M, true);
  rep.gap = gap_c.operator_norm();
  rep.gap_frobenius = gap_c.frobenius();
  rep.norm_derivation = der.norm;
  if (want_norms) {
    rep.norm_a = plain.operator_norm();
    rep.triple_norm = rep.norm_a + rep.norm_derivation;
    rep.conj_norm_plus = Cp.operator_norm();
    rep.conj_norm_minus = Cm.operator_norm();
  }

  if (want_singular_values) {
    // singular values via eigenvalues of X^H X (cheaper than a full SVD)
    auto sv_of = [](const Eigen::MatrixXcd& mat, std::vector<double>& sv) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat.adjoint() * mat,
                                                         Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw EigensolveFailure("singular value eigensolve failed");
      for (int i = 0; i < es.eigenvalues().size(); ++i)
        sv.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i])));
    };
    std::vector<double> sv;
    if (lhs.level_diagonal()) {
      for (const auto& [key, mat] : lhs.blocks) sv_of(mat, sv);
    } else {
      std::vector<long> lv = calc.levels;
      const int d = 2 * (2 * M + 1);
      const int total = static_cast<int>(lv.size()) * d;
      Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(total, total);
      auto index_of = [&](long n) {
        return static_cast<int>(std::find(lv.begin(), lv.end(), n) - lv.begin());
      };
      for (const auto& [key, mat] : lhs.blocks)
        full.block(index_of(key.first) * d, index_of(key.second) * d, d, d) = mat;
      sv_of(full, sv);
    }
    std::sort(sv.rbegin(), sv.rend());
    rep.singular_values = std::move(sv);
  }
  return rep;
}

CommutatorReport fredholm_commutator(const ElementSpec& a, const CircleDiffeo& f, int n_levels,
                                     int m, double eta, bool want_singular_values,
                                     bool want_norms) {
  return fredholm_commutator(a, make_phase_calculus(f, n_levels, m, eta), want_singular_values,
                             want_norms);
}

double triple_norm(const ElementSpec& a, const CircleDiffeo& f, int n_levels, int m, double eta) {
  const DeformedPhaseCalculus calc = make_phase_calculus(f, n_levels, m, eta);
  const BlockOp plain = conjugated_element(a, calc, 0.0, 0.0, 0.0, 0.0);
  const DerivationResult der = deformed_derivation(a, calc);
  return plain.operator_norm() + der.norm;
}

Eigen::MatrixXd circle_example(int l, int k_max, bool deformed) {
  if (k_max < std::abs(l) + 2) throw Error("circle_example: K must be >= |l| + 2");
  const int d = 2 * k_max + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  if (deformed) {
    for (int k = -k_max; k <= k_max; ++k) {
      const int kl = k + l;
      if (k == 0 || kl == 0 || std::abs(kl) > k_max) continue;
      out(kl + k_max, k + k_max) = l * (1.0 / std::abs(kl) + 1.0 / std::abs(k));
    }
    return out;
  }
  // [F, a] = 2 sign(l) P_{L_l} lambda^l, L_l = [1, l-1] (l > 1), [l+1, -1] (l < -1), else empty
  if (std::abs(l) <= 1) return out;
  const int lo = l > 1 ? 1 : l + 1;
  const int hi = l > 1 ? l - 1 : -1;
  const double s = l > 0 ? 2.0 : -2.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const int kl = k + l;
    if (std::abs(kl) > k_max) continue;
    if (kl >= lo && kl <= hi) out(kl + k_max, k + k_max) = s;
  }
  return out;
}

Eigen::MatrixXcd circle_example_via_machinery(int l, int k_max) {
  if (k_max < std::abs(l) + 2) throw Error("circle_example: K must be >= |l| + 2");
  // one level, kernel frequency removed: indices k in {-K..K} \ {0}
  const int d = 2 * k_max;
  auto row_of = [&](int k) { return k > 0 ? k_max + k - 1 : k + k_max; };
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(d, d), Da = F, Di = F, A = F;
  for (int k = -k_max; k <= k_max; ++k) {
    if (k == 0) continue;
    F(row_of(k), row_of(k)) = k > 0 ? 1.0 : -1.0;
    Da(row_of(k), row_of(k)) = std::abs(k);
    Di(row_of(k), row_of(k)) = 1.0 / std::abs(k);
    const int kl = k + l;
    if (kl != 0 && std::abs(kl) <= k_max) A(row_of(kl), row_of(k)) = 1.0;
  }
  BlockOp Fb, Dab, Dib, Ab;
  Fb.block_dim = Dab.block_dim = Dib.block_dim = Ab.block_dim = d;
  Fb.blocks[{1, 1}] = F;
  Dab.blocks[{1, 1}] = Da;
  Dib.blocks[{1, 1}] = Di;
  Ab.blocks[{1, 1}] = A;
  const BlockOp commut = four_term_commutator(Fb, Dab, Dib, Ab, Ab);
  // re-embed with the kernel row/column and report -i [F,a]_T
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * k_max + 1, 2 * k_max + 1);
  const Eigen::MatrixXcd& c = commut.blocks.at({1, 1});
  for (int k = -k_max; k <= k_max; ++k) {
    if (k == 0) continue;
    for (int j = -k_max; j <= k_max; ++j) {
      if (j == 0) continue;
      out(j + k_max, k + k_max) = cd(0.0, -1.0) * c(row_of(j), row_of(k));
    }
  }
  return out;
}

ConnesBound circle_connes_bound(const std::map<int, cd>& trig, int k_max) {
  const int d = 2 * k_max + 1;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
  double bound = 0.0;
  for (const auto& [l, c] : trig) {
    bound += 2.0 * std::abs(l) * std::abs(c);
    for (int k = -k_max; k <= k_max; ++k) {
      const int kl = k + l;
      if (k == 0 || kl == 0 || std::abs(kl) > k_max) continue;
      // |D| [F, z^l] entry at (k+l, k): |k+l| (sign(k+l) - sign(k))
      const double sgn = (kl > 0 ? 1.0 : -1.0) - (k > 0 ? 1.0 : -1.0);
      b(kl + k_max, k + k_max) += c * (std::abs(kl) * sgn);
    }
  }
  ConnesBound out;
  out.norm = operator_norm(b);
  out.b_a = std::move(b);
  out.bound = bound;
  return out;
}

}  // namespace dirac_torus
