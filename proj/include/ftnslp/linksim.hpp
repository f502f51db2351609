#pragma once

#include <cstdint>
#include <vector>

#include "ftnslp/channel.hpp"
#include "ftnslp/constellation.hpp"
#include "ftnslp/interference.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/precoder.hpp"
#include "ftnslp/pulse.hpp"
#include "ftnslp/qpsolver.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

enum class PrecoderKind { ZeroForcing, Slp };

struct NoiseModel {
  double variance = 1.0;
  bool colored = false;  // covariance from the receive-filter autocorrelation at Ts
};

struct StreamResult {
  VectorXd ser_per_user;
  double ser = 0.0;
  double sum_rate_bps = 0.0;
  double avg_power_w = 0.0;
  double spectral_eff = 0.0;   // bit/s/Hz
  double energy_ineff = 0.0;   // J/bit; +inf when SE = 0
  int n_blocks = 0;
  int warmup_excluded = 0;
  int qp_failures = 0;
  double qp_max_kkt = 0.0;
  double qp_mean_iterations = 0.0;
};

/// Everything one stream simulation needs, assembled once per (channel,
/// scheme) pair and shared read-only across trials of the same scenario.
struct LinkScenario {
  int users;
  int antennas;
  int symbols;      // M
  int redundancy;   // R of this scheme; block length P = M + R
  double sampling_time;
  double t1;
  double beta;
  double rolloff;
  double impedance;
  double qos;            // q = sqrt(gamma sigma^2)
  NoiseModel noise;
  int warmup;
  Constellation constellation;
  SampledPulse pulse;
  FrftModulator mod;
  RedundancyPair red;
  ToeplitzBlocks blocks;            // SLP sample-level interference model
  EffectiveOperators ops;           // SLP symbol-level operators
  MatrixXcd gamma;                  // SLP objective weight
  SolveOptions solver;
  std::vector<MatrixXcd> subcarrier;  // ZF per-subcarrier channels
};

/// Builds the scenario for one scheme. For the ZF baseline the redundancy is
/// the full channel order and the per-subcarrier diagonalized model is used;
/// for the SLP the Toeplitz/effective operators and Gamma are assembled.
LinkScenario make_scenario(const DiscreteChannelSet& ch, const SampledPulse& pulse,
                           PrecoderKind kind, int symbols, int redundancy, double t1, double beta,
                           const Constellation& constellation, double gamma_db,
                           const NoiseModel& noise, double impedance,
                           const SolveOptions& solver = {}, int warmup = -1);

/// Noise-free received blocks through the sequential block model: for each
/// user, y[l] = sum_n (ISI x_n[l] + forward IBI from past blocks + backward
/// IBI from future blocks). Missing neighbors are zero.
std::vector<std::vector<VectorXcd>> receive_blocks(
    const ToeplitzBlocks& blocks, const std::vector<std::vector<VectorXcd>>& tx);

/// Nearest-point detection of a received block against the constellation
/// scaled by q; returns symbol indices.
std::vector<int> detect_block(const VectorXcd& y, const Constellation& c, double qos);

/// Time-averaged transmit power of concatenated per-antenna sample streams,
/// through the pulse-correlation quadratic form (cross-block terms included).
double stream_power(const std::vector<VectorXcd>& antenna_streams, const SampledPulse& pulse,
                    double sampling_time, double impedance);

struct StreamCounts {
  VectorXi errors_per_user;
  Index symbols_per_user = 0;
  double power_w = 0.0;
  int n_blocks = 0;
  int warmup_excluded = 0;
  int qp_failures = 0;
  double qp_max_kkt = 0.0;
  double qp_mean_iterations = 0.0;
};

/// Figures of merit from raw counts:
///   SR = K (M/P) (b/Ts) (1 - SER),  SE = SR / BW with BW = 2 (1+rho)/T_beta,
///   EI = P_t / SE.
StreamResult metrics(const StreamCounts& counts, const LinkScenario& sc);

/// Runs one sequential stream: precode every block (SLP keeps its forward
/// history; backward IBI is realized in a second pass over the finished
/// stream), add noise, zero-jam, detect, and accumulate the figures of merit.
StreamResult run_stream(const LinkScenario& sc, PrecoderKind kind, int n_blocks,
                        std::uint64_t symbol_seed, std::uint64_t noise_seed);

}  // namespace ftnslp
