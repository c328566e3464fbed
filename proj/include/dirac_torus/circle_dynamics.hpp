#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "dirac_torus/fourier.hpp"

namespace dirac_torus {

using big_int = boost::multiprecision::cpp_int;
// 600 decimal digits; enough to resolve |alpha - p/q| for the continued
// fractions handled by liouville_report (the hard cases go through the
// complete-quotient formula, which needs no cancellation).
using big_float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<600>>;

struct TrigTerm {
  int frequency = 1;     // k >= 1
  double amplitude = 0;  // a_k
  double phase = 0;      // phi_k in [0, 2pi)
};

// Degree-one lift H(t) = t + sum_k a_k sin(k t + phi_k).
// Diffeomorphism condition sum_k k|a_k| < 1 is enforced at construction.
class CircleLift {
 public:
  CircleLift() = default;  // identity lift
  explicit CircleLift(std::vector<TrigTerm> terms);

  double value(double t) const;
  double derivative(double t) const;
  // monotone inversion: bisection bracket + Newton, tol 1e-13, max 100 iterations
  double inverse(double y) const;

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool is_identity() const { return terms_.empty(); }
  double derivative_lower_bound() const { return 1.0 - weighted_amp_; }

 private:
  std::vector<TrigTerm> terms_;
  double amp_sum_ = 0.0;       // sum |a_k|
  double weighted_amp_ = 0.0;  // sum k |a_k|
};

// f = h o R_{alpha} o h^{-1} with rotation number alpha in (0,1).
// Iterates of the square root T = h o R_{alpha/2} o h^{-1} are computed by a
// single conjugation, never by repeated composition.
class CircleDiffeo {
 public:
  CircleDiffeo(CircleLift conjugator, double rotation_number);

  double rotation_number() const { return alpha_; }
  double half_rotation() const { return alpha_ / 2.0; }
  const CircleLift& conjugator() const { return h_; }

  struct LiftPoint {
    double value;
    double derivative;
  };
  // lift value/derivative of T^k: G_k(t) = H(H^{-1}(t) + k*pi*alpha); f^n = T^{2n}
  LiftPoint iterate_lift(long k, double t) const;
  double map_angle(long n, double t) const;        // F_n(t), lift of f^n
  double lift_derivative(long n, double t) const;  // F_n'(t) = d_n(t) > 0

 private:
  CircleLift h_;
  double alpha_;
};

// Validates the conjugator and rejects rotation numbers that are exact small
// rationals (RationalRotation) or outside (0,1).
CircleDiffeo make_diffeo(CircleLift conjugator, double rotation_number);

struct GrowthTable {
  std::vector<double> gamma;           // gamma_f(n), n = 0..n_max (refined-grid sup)
  std::vector<double> refinement_gap;  // sup on 2G-grid minus sup on G-grid
  int grid_size = 0;
};

// gamma_f(n) = max(sup F_n', sup F_{-n}') over the grid, with one refinement doubling.
GrowthTable growth_sequence(const CircleDiffeo& f, int n_max, int grid_size);

// a_{f,n} = sign(n) sum_{l=1}^{|n|} 1/gamma_f(l - (1-sign n)/2)
double growth_weight(const GrowthTable& g, long n);

// Radon-Nikodym cocycle d_n(theta) = F_n'(theta), sampled on a power-of-two grid.
class Cocycle {
 public:
  Cocycle(const CircleDiffeo& f, long n, int grid_size);

  long level() const { return n_; }
  int grid() const { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const { return samples_; }
  double mean() const;

  const FourierData& fourier() const { return fourier_; }  // of d_n
  FourierData fourier_of_power(double s) const;            // of d_n^s
  FourierData fourier_log() const;                         // of ln d_n
  Eigen::VectorXcd log_deriv_modes(int m) const;           // modes of (ln d_n)'

 private:
  long n_;
  std::vector<double> samples_;
  FourierData fourier_;
};

Cocycle radon_nikodym(const CircleDiffeo& f, long n, int grid_size);

struct ContinuedFraction {
  std::vector<big_int> partial_quotients;  // a_1, a_2, ... (all >= 1)

  struct Convergent {
    big_int p, q;
  };
  // convergents p_k/q_k of [0; a_1, a_2, ...], k = 1..len
  std::vector<Convergent> convergents() const;
  big_float value_precise() const;
  double value() const;

  static ContinuedFraction golden(int depth);  // [1,1,1,...]
  // a_1 = first, a_{k+1} = q_k^k (classical Liouville-type construction)
  static ContinuedFraction liouville(big_int first, int depth);
};

struct LiouvilleRow {
  int k = 0;
  std::string p, q;
  double log10_abs_err = 0;  // log10 |alpha - p_k/q_k|
  // one entry per N in N_list
  std::vector<double> residual_L;    // |alpha - p/q| - q^{-N}
  std::vector<bool> satisfies_L;     // |alpha - p/q| < q^{-N}
  std::vector<double> residual_UL;   // |alpha - p/q| - 2^{-q^N}
  std::vector<int> satisfies_UL;     // 1 yes, 0 no, -1 indeterminate
};

// Finite diagnostic for conditions (L) and (UL); covers convergents k = 1..len-1
// (the final convergent equals the finite value exactly).
std::vector<LiouvilleRow> liouville_report(const ContinuedFraction& cf,
                                           const std::vector<int>& n_list);

}  // namespace dirac_torus
