#include "dirac_torus/circle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

CircleLift::CircleLift(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.frequency < 1) throw NotADiffeomorphism("lift frequency must be >= 1");
    amp_sum_ += std::abs(t.amplitude);
    weighted_amp_ += t.frequency * std::abs(t.amplitude);
  }
  if (weighted_amp_ >= 1.0)
    throw NotADiffeomorphism("sum k|a_k| = " + std::to_string(weighted_amp_) +
                             " >= 1: lift derivative may vanish");
}

double CircleLift::value(double t) const {
  double v = t;
  for (const auto& tm : terms_) v += tm.amplitude * std::sin(tm.frequency * t + tm.phase);
  return v;
}

double CircleLift::derivative(double t) const {
  double v = 1.0;
  for (const auto& tm : terms_)
    v += tm.amplitude * tm.frequency * std::cos(tm.frequency * t + tm.phase);
  return v;
}

double CircleLift::inverse(double y) const {
  if (terms_.empty()) return y;
  // H(x) - x is bounded by amp_sum_, so the root is bracketed here
  double lo = y - amp_sum_, hi = y + amp_sum_;
  double x = y;
  for (int it = 0; it < 100; ++it) {
    const double fx = value(x) - y;
    if (fx > 0)
      hi = x;
    else
      lo = x;
    const double step = fx / derivative(x);
    double next = x - step;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);  // bisection safeguard
    if (std::abs(next - x) < 1e-13 * (1.0 + std::abs(y))) {
      x = next;
      return x;
    }
    x = next;
  }
  throw InversionFailure("lift inversion did not converge to tolerance");
}

CircleDiffeo::CircleDiffeo(CircleLift conjugator, double rotation_number)
    : h_(std::move(conjugator)), alpha_(rotation_number) {}

CircleDiffeo::LiftPoint CircleDiffeo::iterate_lift(long k, double t) const {
  if (k == 0) return {t, 1.0};
  const double shift = k * (kTwoPi / 2.0) * alpha_;  // k * pi * alpha
  if (h_.is_identity()) return {t + shift, 1.0};
  const double u = h_.inverse(t);
  const double v = h_.value(u + shift);
  const double dv = h_.derivative(u + shift) / h_.derivative(u);
  return {v, dv};
}

double CircleDiffeo::map_angle(long n, double t) const { return iterate_lift(2 * n, t).value; }

double CircleDiffeo::lift_derivative(long n, double t) const {
  return iterate_lift(2 * n, t).derivative;
}

namespace {

// true if x is p/q with q <= qmax to near machine precision
bool is_small_rational(double x, long qmax) {
  double y = x;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // convergents at k = -2, -1
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(y);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > qmax || q2 < 0) return false;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (q1 > 0 && std::abs(x - static_cast<double>(p1) / q1) < 1e-14) return true;
    const double frac = y - a;
    if (frac < 1e-15) return q1 <= qmax;
    y = 1.0 / frac;
  }
  return false;
}

}  // namespace

CircleDiffeo make_diffeo(CircleLift conjugator, double rotation_number) {
  if (!(rotation_number > 0.0 && rotation_number < 1.0))
    throw RationalRotation("rotation number must lie in (0,1)");
  if (is_small_rational(rotation_number, 100000))
    throw RationalRotation("rotation number is an exact rational to working precision");
  return CircleDiffeo(std::move(conjugator), rotation_number);
}

GrowthTable growth_sequence(const CircleDiffeo& f, int n_max, int grid_size) {
  if (n_max < 0) throw Error("growth_sequence: n_max must be >= 0");
  if (grid_size < 16) throw Error("growth_sequence: grid_size must be >= 16");
  GrowthTable out;
  out.grid_size = grid_size;
  out.gamma.resize(n_max + 1, 1.0);
  out.refinement_gap.resize(n_max + 1, 0.0);

  auto grid_sup = [&f](long n, int g) {
    double s = 0.0;
    for (int j = 0; j < g; ++j) {
      const double t = kTwoPi * j / g;
      s = std::max(s, std::max(f.lift_derivative(n, t), f.lift_derivative(-n, t)));
    }
    return s;
  };

  for (int n = 1; n <= n_max; ++n) {
    const double coarse = grid_sup(n, grid_size);
    const double fine = grid_sup(n, 2 * grid_size);  // contains the coarse grid points
    out.gamma[n] = fine;
    out.refinement_gap[n] = fine - coarse;
  }
  return out;
}

double growth_weight(const GrowthTable& g, long n) {
  if (n == 0) return 0.0;
  const int sign = n > 0 ? 1 : -1;
  const long absn = std::labs(n);
  double s = 0.0;
  for (long l = 1; l <= absn; ++l) {
    const long idx = l - (1 - sign) / 2;  // l for n>0, l-1 for n<0
    if (idx >= static_cast<long>(g.gamma.size()))
      throw Error("growth_weight: growth table too short");
    s += 1.0 / g.gamma[static_cast<size_t>(idx)];
  }
  return sign * s;
}

Cocycle::Cocycle(const CircleDiffeo& f, long n, int grid_size)
    : n_(n),
      samples_([&] {
        if (grid_size < 16 || !is_power_of_two(grid_size))
          throw Error("cocycle grid size must be a power of two >= 16");
        std::vector<double> s(grid_size);
        for (int j = 0; j < grid_size; ++j) {
          s[j] = f.lift_derivative(n, kTwoPi * j / grid_size);
          if (!(s[j] > 0.0)) throw NonPositiveDensity("cocycle sample <= 0");
        }
        return s;
      }()),
      fourier_(samples_) {}

double Cocycle::mean() const { return fourier_.coeff(0).real(); }

FourierData Cocycle::fourier_of_power(double s) const {
  std::vector<double> v(samples_.size());
  for (size_t j = 0; j < v.size(); ++j) v[j] = std::pow(samples_[j], s);
  return FourierData(v);
}

FourierData Cocycle::fourier_log() const {
  std::vector<double> v(samples_.size());
  for (size_t j = 0; j < v.size(); ++j) v[j] = std::log(samples_[j]);
  return FourierData(v);
}

Eigen::VectorXcd Cocycle::log_deriv_modes(int m) const {
  Eigen::VectorXcd lm = fourier_log().modes(m);
  for (int k = -m; k <= m; ++k) lm[k + m] *= cd(0.0, static_cast<double>(k));
  return lm;
}

Cocycle radon_nikodym(const CircleDiffeo& f, long n, int grid_size) {
  return Cocycle(f, n, grid_size);
}

std::vector<ContinuedFraction::Convergent> ContinuedFraction::convergents() const {
  std::vector<Convergent> out;
  big_int p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // k = -1, 0
  for (const auto& a : partial_quotients) {
    if (a < 1) throw Error("partial quotients must be positive");
    big_int p2 = a * p1 + p0, q2 = a * q1 + q0;
    out.push_back({p2, q2});
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  return out;
}

big_float ContinuedFraction::value_precise() const {
  if (partial_quotients.empty()) throw Error("empty continued fraction");
  big_float x = big_float(partial_quotients.back());
  for (auto it = partial_quotients.rbegin() + 1; it != partial_quotients.rend(); ++it)
    x = big_float(*it) + 1 / x;
  return 1 / x;
}

double ContinuedFraction::value() const { return static_cast<double>(value_precise()); }

ContinuedFraction ContinuedFraction::golden(int depth) {
  ContinuedFraction cf;
  cf.partial_quotients.assign(depth, big_int(1));
  return cf;
}

ContinuedFraction ContinuedFraction::liouville(big_int first, int depth) {
  ContinuedFraction cf;
  big_int pm = 1, qm = 0, pc = 0, qc = 1;  // convergents at k = -1, 0
  big_int a = first;
  for (int k = 1; k <= depth; ++k) {
    cf.partial_quotients.push_back(a);
    big_int pn = a * pc + pm, qn = a * qc + qm;
    pm = pc; qm = qc; pc = pn; qc = qn;
    big_int ak = 1;
    for (int e = 0; e < k; ++e) ak *= qc;  // a_{k+1} = q_k^k
    a = ak;
  }
  return cf;
}

std::vector<LiouvilleRow> liouville_report(const ContinuedFraction& cf,
                                           const std::vector<int>& n_list) {
  const auto& a = cf.partial_quotients;
  if (a.size() < 3) throw Error("liouville_report needs at least 3 partial quotients");
  const auto convs = cf.convergents();
  const double log10_2 = 0.30102999566398119521;

  std::vector<LiouvilleRow> rows;
  for (size_t k = 0; k + 1 < convs.size(); ++k) {
    // |alpha - p_k/q_k| = 1 / (q_k (x_{k+1} q_k + q_{k-1})) with x_{k+1} the
    // complete quotient of the tail; no cancellation at any depth.
    big_float tail = big_float(a.back());
    for (size_t i = a.size() - 1; i > k + 1; --i) tail = big_float(a[i - 1]) + 1 / tail;
    const big_float qk(convs[k].q);
    const big_float qk1 = (k == 0) ? big_float(1) : big_float(convs[k - 1].q);
    const big_float abs_err = 1 / (qk * (tail * qk + qk1));

    LiouvilleRow row;
    row.k = static_cast<int>(k + 1);
    row.p = convs[k].p.str();
    row.q = convs[k].q.str();
    const big_float log10_err = log10(abs_err);
    row.log10_abs_err = static_cast<double>(log10_err);
    const big_float log10_q = log10(qk);

    for (int N : n_list) {
      if (N < 1) throw Error("liouville_report: N must be >= 1");
      // condition (L): |alpha - p/q| < q^{-N}
      const big_float log10_rhs_l = -N * log10_q;
      row.satisfies_L.push_back(log10_err < log10_rhs_l);
      row.residual_L.push_back(static_cast<double>(abs_err - pow(qk, -N)));

      // condition (UL) with lambda = 2: |alpha - p/q| < 2^{-q^N}
      const big_float qN = pow(qk, N);
      if (isinf(qN) || isnan(qN)) {
        row.satisfies_UL.push_back(-1);  // indeterminate: q^N exceeds the precision budget
        row.residual_UL.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const big_float log10_rhs_ul = -qN * log10_2;
      row.satisfies_UL.push_back(log10_err < log10_rhs_ul ? 1 : 0);
      big_float rhs_ul = 0;
      if (log10_rhs_ul > -100000) rhs_ul = pow(big_float(2), -qN);
      row.residual_UL.push_back(static_cast<double>(abs_err - rhs_ul));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dirac_torus
