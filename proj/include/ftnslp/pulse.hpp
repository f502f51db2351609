#pragma once

#include <cmath>
#include <stdexcept>

#include "ftnslp/types.hpp"

namespace ftnslp {

/// Square-root raised-cosine amplitude at time t, for Nyquist period T and
/// roll-off rho in (0,1]. Closed form of the untruncated unit-energy pulse;
/// the removable singularities at t = 0 and t = +/- T/(4 rho) are evaluated
/// through fourth-order series limits so that nearby arguments do not suffer
/// catastrophic cancellation.
template <typename Scalar>
Scalar srrc_amplitude(Scalar t, Scalar T, Scalar rho) {
  const Scalar pi = static_cast<Scalar>(kPi);
  const Scalar x = t / T;
  const Scalar a = pi * (Scalar(1) - rho);  // numerator sine frequency
  const Scalar b = pi * (Scalar(1) + rho);  // numerator cosine frequency
  const Scalar x0 = Scalar(1) / (Scalar(4) * rho);

  const Scalar ax = std::abs(x);
  if (ax < Scalar(1e-9)) {
    return (Scalar(1) - rho + Scalar(4) * rho / pi) / std::sqrt(T);
  }
  if (std::abs(ax - x0) < Scalar(1e-3)) {
    // N(x) = sin(a x) + 4 rho x cos(b x) vanishes at x0; expand N around x0
    // and divide out the (1 - 4 rho x) factor analytically.
    const Scalar e = ax - x0;
    const Scalar s = std::sin(a * x0), co = std::cos(a * x0);
    const Scalar sb = std::sin(b * x0), cb = std::cos(b * x0);
    const Scalar n1 = a * co + Scalar(4) * rho * cb - Scalar(4) * rho * b * x0 * sb;
    const Scalar n2 = -a * a * s - Scalar(8) * rho * b * sb - Scalar(4) * rho * b * b * x0 * cb;
    const Scalar n3 = -a * a * a * co - Scalar(12) * rho * b * b * cb + Scalar(4) * rho * b * b * b * x0 * sb;
    const Scalar n4 = a * a * a * a * s + Scalar(16) * rho * b * b * b * sb + Scalar(4) * rho * b * b * b * b * x0 * cb;
    const Scalar series = n1 + e * (n2 / Scalar(2) + e * (n3 / Scalar(6) + e * n4 / Scalar(24)));
    const Scalar g = -series / (Scalar(4) * rho) / (pi * ax * (Scalar(1) + Scalar(4) * rho * ax));
    return g / std::sqrt(T);
  }
  const Scalar u = Scalar(4) * rho * ax;
  const Scalar num = std::sin(a * ax) + u * std::cos(b * ax);
  const Scalar den = pi * ax * (Scalar(1) - u * u);
  return num / den / std::sqrt(T);
}

/// Raised-cosine autocorrelation (f*f)(tau) of the unit-energy SRRC pulse:
/// a T-Nyquist pulse, equal to 1 at tau = 0 and 0 at nonzero multiples of T.
/// The removable singularity at tau = +/- T/(2 rho) uses a series limit.
template <typename Scalar>
Scalar raised_cosine(Scalar tau, Scalar T, Scalar rho) {
  const Scalar pi = static_cast<Scalar>(kPi);
  const Scalar y = std::abs(tau / T);
  const Scalar y0 = Scalar(1) / (Scalar(2) * rho);

  Scalar sinc;  // sin(pi y) / (pi y)
  if (y < Scalar(1e-9)) {
    sinc = Scalar(1);
  } else {
    sinc = std::sin(pi * y) / (pi * y);
  }

  Scalar shape;  // cos(pi rho y) / (1 - (2 rho y)^2)
  if (std::abs(y - y0) < Scalar(1e-3)) {
    const Scalar e = y - y0;
    const Scalar pr = pi * rho;
    // cos(pr y) / (y - y0) expanded: -pr + pr^3 e^2 / 6 - pr^5 e^4 / 120 ...
    const Scalar ratio = -pr + pr * pr * pr * e * e / Scalar(6);
    shape = ratio * (Scalar(-1) / (Scalar(2) * rho)) / (Scalar(1) + Scalar(2) * rho * y);
  } else {
    const Scalar v = Scalar(2) * rho * y;
    shape = std::cos(pi * rho * y) / (Scalar(1) - v * v);
  }
  return sinc * shape;
}

enum class PulseFamily { Srrc, Sinc };

/// Continuous-time transmit pulse truncated to +/- span Nyquist periods and
/// renormalized to unit energy. Keeps a fine sample grid for quadrature-based
/// diagnostics alongside the analytic evaluator.
class SampledPulse {
 public:
  SampledPulse(PulseFamily family, double nyquist_period, double rolloff, int span);

  double nyquist_period() const { return nyquist_period_; }
  double rolloff() const { return rolloff_; }
  int span() const { return span_; }
  PulseFamily family() const { return family_; }
  double norm_factor() const { return norm_; }

  /// Amplitude at time t; exactly zero beyond the truncation span.
  double operator()(double t) const;

  /// Autocorrelation (f*f)(tau) from the closed form; exactly zero beyond
  /// the 2*span*T support of the truncated pulse.
  double autocorrelation(double tau) const;

  const VectorXd& grid() const { return grid_; }
  double grid_step() const { return grid_step_; }

 private:
  PulseFamily family_;
  double nyquist_period_;
  double rolloff_;
  int span_;
  double norm_ = 1.0;
  VectorXd grid_;
  double grid_step_ = 0.0;
};

SampledPulse make_srrc(double nyquist_period, double rolloff, int span = 16);
SampledPulse make_sinc(double nyquist_period, int span = 16);

/// Pulse correlation matrix [C]_{r,c} = (f*f)((r - c) Ts), symmetric Toeplitz.
struct CorrelationMatrix {
  MatrixXd entries;
  double sampling_time = 0.0;
};

CorrelationMatrix correlation_matrix(const SampledPulse& pulse, double sampling_time, Index size);

/// Waveform energy of one block of DAC samples: (1/Z0) x^H C_f x  [J].
double block_energy(const VectorXcd& samples, const CorrelationMatrix& corr, double impedance);

}  // namespace ftnslp
