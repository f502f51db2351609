#include "ftnslp/theory.hpp"

#include <algorithm>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "ftnslp/multicarrier.hpp"

namespace ftnslp {

DelaySplit make_delay_split(int delta, int block_len, int channel_order) {
  if (block_len < 1) throw std::invalid_argument("delay split: block length must be >= 1");
  if (delta < 0) throw std::invalid_argument("delay split: delta must be non-negative");
  // delta < nu, except the memoryless channel where delta = nu = 0 is the
  // only admissible choice.
  if (delta >= channel_order && !(delta == 0 && channel_order == 0))
    throw std::invalid_argument("delay split: delta must be smaller than the channel order");
  DelaySplit split;
  split.delta = delta;
  split.block_len = block_len;
  split.quotient = delta / block_len;
  split.remainder = delta % block_len;
  return split;
}

IbiIndexSets ibi_index_sets(int channel_order, int block_len, const DelaySplit& split) {
  if (block_len != split.block_len) throw std::invalid_argument("ibi_index_sets: block length mismatch");
  if (split.delta >= channel_order && !(split.delta == 0 && channel_order == 0))
    throw std::invalid_argument("ibi_index_sets: delta must be smaller than the channel order");
  IbiIndexSets sets;
  const int b_total = (channel_order + block_len - 1) / block_len + 2;
  sets.total_blocks = b_total;
  for (int b = 1; b <= b_total - 2 - split.quotient; ++b) sets.forward.push_back(b);
  for (int b = 1; b <= split.quotient + 1; ++b) sets.backward.push_back(b);
  const int rho_nu = channel_order - (b_total - 3) * block_len - 1;
  const bool full = split.remainder >= 1 && split.remainder <= rho_nu;
  sets.max_affecting = full ? b_total : b_total - 1;
  return sets;
}

double se0(int subcarriers, int redundancy, double alpha, double beta,
           int bits_per_symbol, double code_rate, double rolloff) {
  if (redundancy < 0) throw std::invalid_argument("se0: redundancy must be non-negative");
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("se0: alpha must lie in (0, 1]");
  if (code_rate <= 0.0 || code_rate > 1.0) throw std::invalid_argument("se0: code rate must lie in (0, 1]");
  if (rolloff <= 0.0 || rolloff > 1.0) throw std::invalid_argument("se0: roll-off must lie in (0, 1]");
  if (bits_per_symbol < 1) throw std::invalid_argument("se0: bits per symbol must be >= 1");
  const double m = subcarriers;
  return (m / (m + redundancy)) * (1.0 / (alpha * xi(subcarriers, beta))) *
         (bits_per_symbol * code_rate / (2.0 * (1.0 + rolloff)));
}

int redundancy_scaling(int r_ref, double alpha_ref, double alpha) {
  if (r_ref < 0) throw std::invalid_argument("redundancy_scaling: reference must be non-negative");
  if (alpha <= 0.0 || alpha > 1.0 || alpha_ref <= 0.0 || alpha_ref > 1.0)
    throw std::invalid_argument("redundancy_scaling: factors must lie in (0, 1]");
  const double v = (alpha_ref / alpha) * r_ref;
  // Guard against one-ulp undershoot of exactly representable ratios; the
  // inputs are low-denominator rationals, never within 1e-9 of an integer
  // unless they are one.
  return int(std::floor(v + 1e-9 * std::max(1.0, v)));
}

double alpha_min(int subcarriers, double beta, double rolloff) {
  if (rolloff <= 0.0 || rolloff > 1.0) throw std::invalid_argument("alpha_min: roll-off must lie in (0, 1]");
  return 1.0 / ((1.0 + rolloff) * xi(subcarriers, beta));
}

LosslessReport lossless_check(const SampledPulse& pulse, double sampling_time, int grid_points) {
  if (sampling_time <= 0.0) throw std::invalid_argument("lossless_check: sampling time must be positive");
  if (grid_points < 16) throw std::invalid_argument("lossless_check: grid too coarse");

  // |F(j Omega)| via FFT of the sampled pulse, zero-padded for resolution.
  const VectorXd& g = pulse.grid();
  const double dt = pulse.grid_step();
  int nfft = 1;
  while (nfft < 64 * g.size()) nfft <<= 1;
  std::vector<double> padded(nfft, 0.0);
  for (Index i = 0; i < g.size(); ++i) padded[size_t(i)] = g[i];
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, padded);
  const double dw = 2.0 * kPi / (nfft * dt);  // rad/s per FFT bin

  auto mag2 = [&](double omega_abs) {
    const double x = std::abs(omega_abs) / dw;
    const auto i0 = size_t(std::floor(x));
    if (i0 + 1 >= size_t(nfft) / 2) return 0.0;
    const double frac = x - double(i0);
    const double a = std::norm(spec[i0]) * dt * dt;
    const double b = std::norm(spec[i0 + 1]) * dt * dt;
    return a + frac * (b - a);
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    // S(omega) is even and 2 pi periodic; [0, pi] covers it.
    const double omega = kPi * double(k) / double(grid_points - 1);
    double s = 0.0;
    for (int i = -2; i <= 2; ++i) s += mag2((omega + 2.0 * kPi * i) / sampling_time);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  LosslessReport rep;
  rep.margin = hi > 0.0 ? lo / hi : 0.0;
  rep.lossless = rep.margin > 1e-6;
  return rep;
}

int min_redundancy(const DelaySplit& split) { return (split.delta + 1) / 2; }

bool efficiency_check(int subcarriers, int redundancy) {
  if (subcarriers < 1 || redundancy < 0) throw std::invalid_argument("efficiency_check: bad arguments");
  return subcarriers > redundancy;
}

}  // namespace ftnslp
