#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oscflow {

using cplx = std::complex<double>;

namespace fourier {

// Real T-periodic data is kept as one-sided harmonic arrays c_0..c_K with the
// convention q(t) = c_0 + 2 Re sum_{k>=1} c_k exp(i k w t), w = 2 pi / T.

inline double angular_frequency(double period) { return 2.0 * M_PI / period; }

// Uniform sample times t_j = j T / M, j = 0..M-1.
std::vector<double> sample_times(double period, int samples);

// One-sided harmonics (k = 0..max_harmonic) of uniformly sampled real data.
// Requires max_harmonic < samples / 2 so no harmonic aliases onto the Nyquist bin.
std::vector<cplx> analyze(std::span<const double> samples, int max_harmonic);

double evaluate(std::span<const cplx> harmonics, double period, double t);

// Column-wise variants: each column of `samples` (rows = time) is a separate
// real signal. Result has one row per harmonic.
Eigen::MatrixXcd analyze_columns(const Eigen::MatrixXd& samples, int max_harmonic);
Eigen::VectorXd evaluate_rows(const Eigen::MatrixXcd& harmonics, double period, double t);

// Trigonometric interpolation of uniformly sampled periodic data (rows = time),
// including the Nyquist term for even sample counts. `order` selects the time
// derivative of the interpolant that is evaluated.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(const Eigen::MatrixXd& samples, double period);

  Eigen::VectorXd operator()(double t, int order = 0) const;
  int columns() const { return static_cast<int>(coeffs_.cols()); }
  double period() const { return period_; }

 private:
  double period_ = 1.0;
  int samples_ = 0;
  Eigen::MatrixXcd coeffs_;  // rows k = 0..samples/2
};

}  // namespace fourier
}  // namespace oscflow
