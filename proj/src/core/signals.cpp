#include "oscflow/signals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "oscflow/error.hpp"

namespace oscflow {
namespace {

constexpr int kMaxDerivative = 3;
constexpr double kSymmetryTol = 1e-14;

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

void check_period(double period) {
  if (!(period > 0.0) || !std::isfinite(period))
    fail(ErrorCode::InvalidArgument, "periodic signal: period must be positive and finite");
}

}  // namespace

PeriodicSignal::PeriodicSignal(double period, std::vector<cplx> one_sided, int grid)
    : period_(period), harmonics_(std::move(one_sided)) {
  check_period(period);
  if (harmonics_.empty()) harmonics_.push_back(0.0);
  if (grid < 2 * max_harmonic() + 1)
    fail(ErrorCode::InvalidArgument, "periodic signal: grid too small for its harmonics");
  samples_.resize(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) samples_[j] = (*this)(period_ * j / grid);
}

PeriodicSignal PeriodicSignal::make(double period, std::span<const Harmonic> coeffs, int grid) {
  check_period(period);
  std::map<int, cplx> given;
  for (const auto& h : coeffs) {
    if (!finite(h.c)) fail(ErrorCode::InvalidArgument, "periodic signal: non-finite coefficient");
    if (!given.emplace(h.k, h.c).second)
      fail(ErrorCode::InvalidArgument,
           "periodic signal: harmonic " + std::to_string(h.k) + " given twice");
  }
  int kmax = 0;
  for (const auto& [k, c] : given) kmax = std::max(kmax, std::abs(k));
  std::vector<cplx> one_sided(static_cast<std::size_t>(kmax + 1), cplx(0.0));
  for (const auto& [k, c] : given) {
    const double scale = std::max(1.0, std::abs(c));
    if (k == 0) {
      if (std::abs(c.imag()) > kSymmetryTol * scale)
        fail(ErrorCode::InvalidArgument, "periodic signal: c_0 must be real");
      one_sided[0] = c.real();
      continue;
    }
    const cplx positive = k > 0 ? c : std::conj(c);
    if (auto mirror = given.find(-k); mirror != given.end()) {
      const cplx other = k > 0 ? std::conj(mirror->second) : mirror->second;
      if (std::abs(positive - other) > kSymmetryTol * scale)
        fail(ErrorCode::InvalidArgument, "periodic signal: harmonics " + std::to_string(k) +
                                             " and " + std::to_string(-k) +
                                             " are not complex conjugates");
    }
    one_sided[std::abs(k)] = positive;
  }
  return PeriodicSignal(period, std::move(one_sided), grid);
}

PeriodicSignal PeriodicSignal::from_one_sided(double period, std::vector<cplx> one_sided, int grid) {
  for (const auto& c : one_sided)
    if (!finite(c)) fail(ErrorCode::InvalidArgument, "periodic signal: non-finite coefficient");
  if (!one_sided.empty()) {
    if (std::abs(one_sided[0].imag()) > kSymmetryTol * std::max(1.0, std::abs(one_sided[0])))
      fail(ErrorCode::InvalidArgument, "periodic signal: c_0 must be real");
    one_sided[0] = one_sided[0].real();
  }
  return PeriodicSignal(period, std::move(one_sided), grid);
}

PeriodicSignal PeriodicSignal::zero(double period, int grid) {
  return PeriodicSignal(period, {cplx(0.0)}, grid);
}

PeriodicSignal PeriodicSignal::constant(double period, double value, int grid) {
  return PeriodicSignal(period, {cplx(value)}, grid);
}

PeriodicSignal PeriodicSignal::sine(double period, double amplitude, int harmonic, double offset,
                                    int grid) {
  if (harmonic < 1) fail(ErrorCode::InvalidArgument, "sine: harmonic index must be >= 1");
  std::vector<cplx> c(static_cast<std::size_t>(harmonic + 1), cplx(0.0));
  c[0] = offset;
  c[harmonic] = cplx(0.0, -0.5 * amplitude);
  return PeriodicSignal(period, std::move(c), grid);
}

PeriodicSignal PeriodicSignal::from_samples(double period, std::span<const double> samples,
                                            int max_harmonic, int grid) {
  return PeriodicSignal(period, fourier::analyze(samples, max_harmonic), grid);
}

cplx PeriodicSignal::harmonic(int k) const {
  const int a = std::abs(k);
  if (a > max_harmonic()) return 0.0;
  return k >= 0 ? harmonics_[a] : std::conj(harmonics_[a]);
}

PeriodicSignal PeriodicSignal::derivative(int order) const {
  if (order < 0 || order > kMaxDerivative)
    fail(ErrorCode::InvalidArgument, "derivative: order must be in 0..3");
  const double w = fourier::angular_frequency(period_);
  std::vector<cplx> c(harmonics_.size());
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = harmonics_[k] * std::pow(cplx(0.0, w * static_cast<double>(k)), order);
  if (order > 0) c[0] = 0.0;
  return PeriodicSignal(period_, std::move(c), grid_size());
}

PeriodicSignal PeriodicSignal::antiderivative() const {
  if (std::abs(harmonics_[0]) > 1e-14 * std::max(1.0, sup_norm()))
    fail(ErrorCode::InvalidArgument, "antiderivative: signal must have zero mean");
  const double w = fourier::angular_frequency(period_);
  std::vector<cplx> c(harmonics_.size(), cplx(0.0));
  for (std::size_t k = 1; k < c.size(); ++k)
    c[k] = harmonics_[k] / cplx(0.0, w * static_cast<double>(k));
  return PeriodicSignal(period_, std::move(c), grid_size());
}

PeriodicSignal PeriodicSignal::scaled(double factor) const {
  std::vector<cplx> c = harmonics_;
  for (auto& x : c) x *= factor;
  return PeriodicSignal(period_, std::move(c), grid_size());
}

PeriodicSignal PeriodicSignal::with_period(double period) const {
  return PeriodicSignal(period, harmonics_, grid_size());
}

PeriodicSignal PeriodicSignal::plus(const PeriodicSignal& other) const {
  if (std::abs(other.period_ - period_) > 1e-12 * period_)
    fail(ErrorCode::InvalidArgument, "signal sum: periods differ");
  std::vector<cplx> c(std::max(harmonics_.size(), other.harmonics_.size()), cplx(0.0));
  for (std::size_t k = 0; k < harmonics_.size(); ++k) c[k] += harmonics_[k];
  for (std::size_t k = 0; k < other.harmonics_.size(); ++k) c[k] += other.harmonics_[k];
  return PeriodicSignal(period_, std::move(c), std::max(grid_size(), other.grid_size()));
}

double PeriodicSignal::sobolev_norm(int m) const {
  if (m < 0 || m > kMaxDerivative)
    fail(ErrorCode::InvalidArgument, "sobolev_norm: order must be in 0..3");
  const double w = fourier::angular_frequency(period_);
  double total = 0.0;
  for (std::size_t k = 0; k < harmonics_.size(); ++k) {
    const double mult = k == 0 ? 1.0 : 2.0;
    const double wk2 = (w * static_cast<double>(k)) * (w * static_cast<double>(k));
    double weight = 0.0;
    double p = 1.0;
    for (int j = 0; j <= m; ++j) {
      // the k = 0 term only contributes to the undifferentiated norm
      if (j == 0 || k > 0) weight += p;
      p *= wk2;
    }
    total += mult * std::norm(harmonics_[k]) * weight;
  }
  return std::sqrt(period_ * total);
}

double PeriodicSignal::sup_norm() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

bool PeriodicSignal::is_zero() const {
  return std::all_of(harmonics_.begin(), harmonics_.end(),
                     [](const cplx& c) { return c == cplx(0.0); });
}

std::string PeriodicSignal::to_json() const {
  nlohmann::json j;
  j["T"] = period_;
  auto rows = nlohmann::json::array();
  for (int k = -max_harmonic(); k <= max_harmonic(); ++k) {
    const cplx c = harmonic(k);
    rows.push_back({k, c.real(), c.imag()});
  }
  j["harmonics"] = rows;
  return j.dump();
}

PeriodicSignal PeriodicSignal::from_json(const std::string& text, int grid) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("signal json: ") + e.what());
  }
  if (!j.contains("T") || !j.contains("harmonics"))
    fail(ErrorCode::InvalidArgument, "signal json: expected keys 'T' and 'harmonics'");
  std::vector<Harmonic> coeffs;
  for (const auto& row : j.at("harmonics")) {
    if (!row.is_array() || row.size() != 3)
      fail(ErrorCode::InvalidArgument, "signal json: harmonic rows are [k, re, im]");
    coeffs.push_back({row[0].get<int>(), cplx(row[1].get<double>(), row[2].get<double>())});
  }
  return make(j.at("T").get<double>(), coeffs, grid);
}

}  // namespace oscflow
