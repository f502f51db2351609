#pragma once

#include <vector>

#include "ftnslp/pulse.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

/// Group delay decomposed against the block length: delta = q P + r, r in [0, P).
struct DelaySplit {
  int delta = 0;
  int quotient = 0;   // q_delta
  int remainder = 0;  // rho_delta
  int block_len = 0;  // P
};

/// Validates delta < channel order (the memoryless order-0 channel admits
/// only delta = 0) and performs the Euclidean split.
DelaySplit make_delay_split(int delta, int block_len, int channel_order);

/// Index sets of the data blocks that may interfere with the current one.
struct IbiIndexSets {
  std::vector<int> forward;   // b in {1 .. B-2-q_delta}
  std::vector<int> backward;  // b in {1 .. q_delta+1}
  int total_blocks = 0;       // B = ceil(nu / P) + 2
  int max_affecting = 0;      // B or B-1 depending on rho_delta
};

IbiIndexSets ibi_index_sets(int channel_order, int block_len, const DelaySplit& split);

/// Error-free spectral efficiency [bit/s/Hz]:
/// (M / (M + R)) * (1 / (alpha xi_M(beta))) * (b r_c / (2 (1 + rho))).
double se0(int subcarriers, int redundancy, double alpha, double beta,
           int bits_per_symbol, double code_rate, double rolloff);

/// Guard-interval scaling across acceleration factors: floor((alpha_ref / alpha) * R_ref).
int redundancy_scaling(int r_ref, double alpha_ref, double alpha);

/// Smallest acceleration factor preserving information losslessness:
/// 1 / ((1 + rho) xi_M(beta)). Values above 1 mean no acceleration is lossless.
double alpha_min(int subcarriers, double beta, double rolloff);

struct LosslessReport {
  bool lossless = false;
  double margin = 0.0;  // min/max of the folded squared magnitude spectrum
};

/// Numerically evaluates sum_i |F(j (omega + 2 pi i) / Ts)|^2 over a frequency
/// grid and tests strict positivity. The margin is normalized by the folded
/// spectrum's maximum; the truncated pulse never reaches exact zero, so the
/// 1e-6 threshold separates the lossless and lossy regimes.
LosslessReport lossless_check(const SampledPulse& pulse, double sampling_time, int grid_points = 4096);

/// Minimum guard-interval length for backward-IBI-free transmission: ceil(delta / 2).
int min_redundancy(const DelaySplit& split);

/// Efficient transmission test: strictly more data than redundancy, M > R.
bool efficiency_check(int subcarriers, int redundancy);

}  // namespace ftnslp
