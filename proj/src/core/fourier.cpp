#include "oscflow/fourier.hpp"

#include <cmath>

#include "oscflow/error.hpp"

namespace oscflow::fourier {

std::vector<double> sample_times(double period, int samples) {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) t[j] = period * j / samples;
  return t;
}

std::vector<cplx> analyze(std::span<const double> samples, int max_harmonic) {
  const int m = static_cast<int>(samples.size());
  if (m == 0 || 2 * max_harmonic >= m)
    fail(ErrorCode::InvalidArgument, "fourier::analyze: too few samples for requested harmonics");
  std::vector<cplx> out(static_cast<std::size_t>(max_harmonic + 1));
  for (int k = 0; k <= max_harmonic; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * j / m;
      acc += samples[j] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc / static_cast<double>(m);
  }
  out[0] = out[0].real();
  return out;
}

double evaluate(std::span<const cplx> harmonics, double period, double t) {
  if (harmonics.empty()) return 0.0;
  const double w = angular_frequency(period);
  double v = harmonics[0].real();
  for (std::size_t k = 1; k < harmonics.size(); ++k) {
    const double ang = w * static_cast<double>(k) * t;
    v += 2.0 * (harmonics[k] * cplx(std::cos(ang), std::sin(ang))).real();
  }
  return v;
}

Eigen::MatrixXcd analyze_columns(const Eigen::MatrixXd& samples, int max_harmonic) {
  const int m = static_cast<int>(samples.rows());
  if (m == 0 || 2 * max_harmonic >= m)
    fail(ErrorCode::InvalidArgument, "fourier::analyze_columns: too few samples for requested harmonics");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(max_harmonic + 1, samples.cols());
  for (int k = 0; k <= max_harmonic; ++k) {
    for (int j = 0; j < m; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * j / m;
      out.row(k) += cplx(std::cos(ang), std::sin(ang)) * samples.row(j).cast<cplx>();
    }
  }
  out /= static_cast<double>(m);
  out.row(0) = out.row(0).real().cast<cplx>();
  return out;
}

Eigen::VectorXd evaluate_rows(const Eigen::MatrixXcd& harmonics, double period, double t) {
  const double w = angular_frequency(period);
  Eigen::VectorXd v = harmonics.row(0).real().transpose();
  for (int k = 1; k < harmonics.rows(); ++k) {
    const double ang = w * k * t;
    v += 2.0 * (cplx(std::cos(ang), std::sin(ang)) * harmonics.row(k)).real().transpose();
  }
  return v;
}

TrigInterpolant::TrigInterpolant(const Eigen::MatrixXd& samples, double period)
    : period_(period), samples_(static_cast<int>(samples.rows())) {
  if (samples_ < 2) fail(ErrorCode::InvalidArgument, "TrigInterpolant: need at least two samples");
  const int kmax = samples_ / 2;
  coeffs_ = Eigen::MatrixXcd::Zero(kmax + 1, samples.cols());
  for (int k = 0; k <= kmax; ++k) {
    for (int j = 0; j < samples_; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * j / samples_;
      coeffs_.row(k) += cplx(std::cos(ang), std::sin(ang)) * samples.row(j).cast<cplx>();
    }
  }
  coeffs_ /= static_cast<double>(samples_);
}

Eigen::VectorXd TrigInterpolant::operator()(double t, int order) const {
  const double w = angular_frequency(period_);
  const int kmax = samples_ / 2;
  const bool even = samples_ % 2 == 0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(coeffs_.cols());
  if (order == 0) v = coeffs_.row(0).real().transpose();
  for (int k = 1; k <= kmax; ++k) {
    const double ang = w * k * t;
    if (even && k == kmax) {
      // The Nyquist bin is a lone cosine, not a conjugate pair.
      static constexpr double kCosDerivSign[4][2] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
      const double* sc = kCosDerivSign[order % 4];
      const double d = sc[0] * std::cos(ang) + sc[1] * std::sin(ang);
      v += coeffs_.row(k).real().transpose() * (std::pow(w * k, order) * d);
      continue;
    }
    const cplx factor = std::pow(cplx(0.0, w * k), order) * cplx(std::cos(ang), std::sin(ang));
    v += 2.0 * (factor * coeffs_.row(k)).real().transpose();
  }
  return v;
}

}  // namespace oscflow::fourier
