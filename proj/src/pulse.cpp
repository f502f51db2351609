#include "ftnslp/pulse.hpp"

namespace ftnslp {

namespace {

double raw_amplitude(PulseFamily family, double t, double T, double rho) {
  if (family == PulseFamily::Srrc) {
    return srrc_amplitude(t, T, rho);
  }
  // Brick-wall pulse f(t) = sinc(t/T)/sqrt(T); autocorrelation is itself.
  const double y = std::abs(t / T);
  if (y < 1e-9) return 1.0 / std::sqrt(T);
  return std::sin(kPi * y) / (kPi * y) / std::sqrt(T);
}

// Composite Simpson energy of the truncated pulse over [-span T, span T].
double truncated_energy(PulseFamily family, double T, double rho, int span) {
  const int n = 512 * span * 2;  // even count, step T/512
  const double a = -span * T, b = span * T;
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = a + i * h;
    const double v = raw_amplitude(family, t, T, rho);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * v * v;
  }
  return sum * h / 3.0;
}

}  // namespace

SampledPulse::SampledPulse(PulseFamily family, double nyquist_period, double rolloff, int span)
    : family_(family), nyquist_period_(nyquist_period), rolloff_(rolloff), span_(span) {
  if (nyquist_period <= 0.0) throw std::invalid_argument("pulse: nyquist period must be positive");
  if (family == PulseFamily::Srrc && (rolloff <= 0.0 || rolloff > 1.0))
    throw std::invalid_argument("pulse: roll-off must lie in (0, 1]");
  if (span < 4) throw std::invalid_argument("pulse: span must be at least 4 Nyquist periods");

  norm_ = 1.0 / std::sqrt(truncated_energy(family, nyquist_period, rolloff, span));

  const int per_period = 64;
  const int n = 2 * span * per_period;
  grid_step_ = nyquist_period / per_period;
  grid_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = -span * nyquist_period + i * grid_step_;
    grid_[i] = norm_ * raw_amplitude(family, t, nyquist_period, rolloff);
  }
}

double SampledPulse::operator()(double t) const {
  if (std::abs(t) > span_ * nyquist_period_) return 0.0;
  return norm_ * raw_amplitude(family_, t, nyquist_period_, rolloff_);
}

double SampledPulse::autocorrelation(double tau) const {
  if (std::abs(tau) >= 2.0 * span_ * nyquist_period_) return 0.0;
  if (family_ == PulseFamily::Sinc) {
    const double y = std::abs(tau / nyquist_period_);
    if (y < 1e-9) return 1.0;
    return std::sin(kPi * y) / (kPi * y);
  }
  return raised_cosine(tau, nyquist_period_, rolloff_);
}

SampledPulse make_srrc(double nyquist_period, double rolloff, int span) {
  return SampledPulse(PulseFamily::Srrc, nyquist_period, rolloff, span);
}

SampledPulse make_sinc(double nyquist_period, int span) {
  return SampledPulse(PulseFamily::Sinc, nyquist_period, 0.0, span);
}

CorrelationMatrix correlation_matrix(const SampledPulse& pulse, double sampling_time, Index size) {
  if (size < 1) throw std::invalid_argument("correlation_matrix: size must be >= 1");
  if (sampling_time <= 0.0) throw std::invalid_argument("correlation_matrix: sampling time must be positive");
  VectorXd first(size);
  for (Index k = 0; k < size; ++k) first[k] = pulse.autocorrelation(double(k) * sampling_time);
  CorrelationMatrix out;
  out.sampling_time = sampling_time;
  out.entries.resize(size, size);
  for (Index r = 0; r < size; ++r)
    for (Index c = 0; c < size; ++c) out.entries(r, c) = first[std::abs(r - c)];
  return out;
}

double block_energy(const VectorXcd& samples, const CorrelationMatrix& corr, double impedance) {
  if (samples.size() != corr.entries.rows())
    throw std::invalid_argument("block_energy: sample/correlation dimension mismatch");
  if (impedance <= 0.0) throw std::invalid_argument("block_energy: impedance must be positive");
  const cplx q = samples.adjoint() * corr.entries * samples;
  return q.real() / impedance;
}

}  // namespace ftnslp
