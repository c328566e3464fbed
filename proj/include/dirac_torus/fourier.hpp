#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace dirac_torus {

using cd = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_power_of_two(int g);
int next_power_of_two(int g);

// theta_j = 2*pi*j/G, j = 0..G-1
std::vector<double> uniform_grid(int g);

// Fourier coefficients of a function sampled on the uniform grid:
// coeff(k) = (1/G) sum_j v_j e^{-ik theta_j}, addressable for |k| <= G/2.
class FourierData {
 public:
  explicit FourierData(const std::vector<cd>& samples);
  explicit FourierData(const std::vector<double>& samples);

  int grid() const { return static_cast<int>(c_.size()); }
  cd coeff(long k) const;
  // sum_{M<|k|<=G/2} |c_k|  /  sum_{|k|<=G/2} |c_k|
  double tail_mass_beyond(int m) const;
  Eigen::VectorXcd modes(int m) const;    // (c_{-M}, ..., c_M)
  Eigen::MatrixXcd toeplitz(int m) const; // T(j,k) = c_{j-k}, j,k = -M..M

 private:
  std::vector<cd> c_;  // c_[k mod G]
};

// samples on the uniform G-grid of sum_{|k|<=M} modes[k+M] e^{ik theta}; G power of two > 2M
std::vector<cd> synthesize(const Eigen::VectorXcd& modes, int g);
// pointwise value of the mode vector at angle t
cd eval_modes(const Eigen::VectorXcd& modes, double t);
// FourierData(samples).modes(M)
Eigen::VectorXcd project_modes(const std::vector<cd>& samples, int m);

// largest singular value via eigenvalues of X^H X
double operator_norm(const Eigen::MatrixXcd& x);

}  // namespace dirac_torus
