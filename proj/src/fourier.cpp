#include "dirac_torus/fourier.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

#include "dirac_torus/errors.hpp"

namespace dirac_torus {

bool is_power_of_two(int g) { return g > 0 && (g & (g - 1)) == 0; }

int next_power_of_two(int g) {
  int p = 1;
  while (p < g) p <<= 1;
  return p;
}

std::vector<double> uniform_grid(int g) {
  std::vector<double> t(g);
  for (int j = 0; j < g; ++j) t[j] = kTwoPi * j / g;
  return t;
}

static std::vector<cd> forward_dft(const std::vector<cd>& samples) {
  Eigen::FFT<double> fft;
  std::vector<cd> out;
  fft.fwd(out, samples);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& v : out) v *= scale;
  return out;
}

FourierData::FourierData(const std::vector<cd>& samples) : c_(forward_dft(samples)) {}

FourierData::FourierData(const std::vector<double>& samples)
    : c_(forward_dft(std::vector<cd>(samples.begin(), samples.end()))) {}

cd FourierData::coeff(long k) const {
  const long g = grid();
  long i = k % g;
  if (i < 0) i += g;
  return c_[static_cast<size_t>(i)];
}

double FourierData::tail_mass_beyond(int m) const {
  const int g = grid();
  double total = 0.0, tail = 0.0;
  for (int k = -g / 2 + 1; k <= g / 2; ++k) {
    const double a = std::abs(coeff(k));
    total += a;
    if (std::abs(k) > m) tail += a;
  }
  return total > 0.0 ? tail / total : 0.0;
}

Eigen::VectorXcd FourierData::modes(int m) const {
  if (2 * m >= grid()) throw Error("modes: grid too small for requested mode count");
  Eigen::VectorXcd v(2 * m + 1);
  for (int k = -m; k <= m; ++k) v[k + m] = coeff(k);
  return v;
}

Eigen::MatrixXcd FourierData::toeplitz(int m) const {
  if (4 * m >= grid()) throw Error("toeplitz: grid too small, lags would alias");
  const int d = 2 * m + 1;
  Eigen::MatrixXcd t(d, d);
  for (int j = -m; j <= m; ++j)
    for (int k = -m; k <= m; ++k) t(j + m, k + m) = coeff(j - k);
  return t;
}

std::vector<cd> synthesize(const Eigen::VectorXcd& modes, int g) {
  const int m = (static_cast<int>(modes.size()) - 1) / 2;
  if (g <= 2 * m) throw Error("synthesize: grid too small for mode count");
  std::vector<cd> bins(g, cd(0.0, 0.0));
  for (int k = -m; k <= m; ++k) {
    int i = k % g;
    if (i < 0) i += g;
    bins[static_cast<size_t>(i)] = modes[k + m];
  }
  Eigen::FFT<double> fft;
  std::vector<cd> out;
  fft.inv(out, bins);  // (1/G) sum_b bins_b e^{+i b theta_j}
  for (auto& v : out) v *= static_cast<double>(g);
  return out;
}

cd eval_modes(const Eigen::VectorXcd& modes, double t) {
  const int m = (static_cast<int>(modes.size()) - 1) / 2;
  // recurrence over k avoids 2M+1 trig calls
  const cd w = std::polar(1.0, t);
  cd zk = std::polar(1.0, -m * t);
  cd acc(0.0, 0.0);
  for (int k = -m; k <= m; ++k) {
    acc += modes[k + m] * zk;
    zk *= w;
  }
  return acc;
}

Eigen::VectorXcd project_modes(const std::vector<cd>& samples, int m) {
  return FourierData(samples).modes(m);
}

double operator_norm(const Eigen::MatrixXcd& x) {
  if (x.rows() == 0 || x.cols() == 0) return 0.0;
  Eigen::MatrixXcd g = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigensolveFailure("operator_norm: eigensolve failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace dirac_torus
