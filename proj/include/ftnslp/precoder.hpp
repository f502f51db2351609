#pragma once

#include <deque>
#include <vector>

#include "ftnslp/channel.hpp"
#include "ftnslp/constellation.hpp"
#include "ftnslp/interference.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/pulse.hpp"
#include "ftnslp/qpsolver.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

/// Per-subcarrier frequency responses H^(m) in C^{K x N}: the DFT of the tap
/// vectors, evaluated on the M-point subcarrier grid.
std::vector<MatrixXcd> subcarrier_channels(const DiscreteChannelSet& ch, int subcarriers);

/// Per-subcarrier zero-forcing precoder: d^(m) = H^H (H H^H)^{-1} s^(m).
/// `targets` stacks users first (s = [s_0; ...; s_{K-1}], M entries each);
/// the result stacks antennas the same way. Throws on a rank-deficient
/// subcarrier matrix, naming the subcarrier.
VectorXcd zf_precode(const std::vector<MatrixXcd>& subcarrier, const VectorXcd& targets);

/// Transmit-energy weight of the symbol-level problem:
/// Gamma = I_N (x) (W_beta Sigma* A^T C_f A Sigma W_beta^H), Hermitian PD.
MatrixXcd build_gamma(const FrftModulator& mod, const RedundancyPair& red,
                      const CorrelationMatrix& corr, int antennas);

/// Sequential symbol-level precoder state: the ring of past precoded vectors
/// feeding the forward-IBI offset, plus the per-symbol quality targets.
struct SlpState {
  std::deque<VectorXcd> history;  // history[b-1] = d[l - b]
  VectorXd qos;
};

/// Space-time-frequency symbol-level precoder: per block solves
///   min d^H Gamma d  s.t.  H_isi d + known forward IBI  in  CI(q . s)
/// as a real-embedded strictly convex QP.
class SlpPrecoder {
 public:
  SlpPrecoder(const EffectiveOperators& ops, const MatrixXcd& gamma, Constellation constellation,
              VectorXd qos, SolveOptions solver = {});

  struct Result {
    VectorXcd d;
    QPSolution report;
  };

  /// Precodes one block and pushes it into the history.
  Result precode(const VectorXcd& symbols);

  void reset_history();
  const SlpState& state() const { return state_; }
  int history_depth() const { return depth_; }

 private:
  const EffectiveOperators& ops_;
  MatrixXcd gamma_;
  MatrixXd q_embedded_;
  Constellation constellation_;
  SlpState state_;
  SolveOptions solver_;
  int depth_ = 0;
};

}  // namespace ftnslp
