#pragma once

#include <span>
#include <string>
#include <vector>

#include "oscflow/fourier.hpp"

namespace oscflow {

struct Harmonic {
  int k = 0;
  cplx c;
};

// Real T-periodic scalar signal held as a truncated Fourier series together
// with its values on a uniform grid of [0, T). Immutable after construction.
class PeriodicSignal {
 public:
  static constexpr int kDefaultGrid = 256;

  PeriodicSignal() : PeriodicSignal(1.0, {cplx(0.0)}, kDefaultGrid) {}  // zero, period 1

  // Accepts harmonics for any sign of k. A harmonic and its mirror must be
  // complex conjugates when both are given; c_0 must be real. A missing
  // mirror is implied by conjugation.
  static PeriodicSignal make(double period, std::span<const Harmonic> coeffs,
                             int grid = kDefaultGrid);
  // One-sided harmonics c_0..c_K.
  static PeriodicSignal from_one_sided(double period, std::vector<cplx> one_sided,
                                       int grid = kDefaultGrid);
  static PeriodicSignal zero(double period, int grid = kDefaultGrid);
  static PeriodicSignal constant(double period, double value, int grid = kDefaultGrid);
  // amplitude * sin(2 pi harmonic t / T) + offset
  static PeriodicSignal sine(double period, double amplitude, int harmonic = 1,
                             double offset = 0.0, int grid = kDefaultGrid);
  static PeriodicSignal from_samples(double period, std::span<const double> samples,
                                     int max_harmonic, int grid = kDefaultGrid);

  double period() const { return period_; }
  int max_harmonic() const { return static_cast<int>(harmonics_.size()) - 1; }
  // Coefficient of exp(i k w t) for any integer k; zero beyond truncation.
  cplx harmonic(int k) const;
  const std::vector<cplx>& harmonics() const { return harmonics_; }
  const std::vector<double>& grid_samples() const { return samples_; }
  int grid_size() const { return static_cast<int>(samples_.size()); }

  double operator()(double t) const { return fourier::evaluate(harmonics_, period_, t); }

  PeriodicSignal derivative(int order) const;
  // Primitive with zero mean; only defined for mean-free signals.
  PeriodicSignal antiderivative() const;
  PeriodicSignal scaled(double factor) const;
  PeriodicSignal with_period(double period) const;
  PeriodicSignal plus(const PeriodicSignal& other) const;

  // (sum_{j<=m} ||d^j s/dt^j||^2_{L^2(0,T)})^{1/2} via Parseval.
  double sobolev_norm(int m) const;
  double l2_norm() const { return sobolev_norm(0); }
  double sup_norm() const;  // max |s| over the stored grid
  bool is_zero() const;

  std::string to_json() const;
  static PeriodicSignal from_json(const std::string& text, int grid = kDefaultGrid);

 private:
  PeriodicSignal(double period, std::vector<cplx> one_sided, int grid);

  double period_ = 1.0;
  std::vector<cplx> harmonics_{cplx(0.0)};
  std::vector<double> samples_;
};

}  // namespace oscflow
