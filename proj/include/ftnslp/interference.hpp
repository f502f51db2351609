#pragma once

#include <map>
#include <vector>

#include "ftnslp/channel.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/theory.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

/// P x P Toeplitz block [B]_{r,c} = h[r - c + offset] when the tap index lies
/// in [0, nu], else 0. Stored as the generating taps plus the diagonal offset;
/// dense form materialized on demand.
class ToeplitzOperator {
 public:
  ToeplitzOperator(const VectorXcd& taps, int offset, int dim)
      : taps_(taps), offset_(offset), dim_(dim) {}

  cplx coeff(int r, int c) const {
    const int k = r - c + offset_;
    return (k >= 0 && k < taps_.size()) ? taps_[k] : cplx(0.0, 0.0);
  }

  MatrixXcd dense() const;

  /// y += B x without materializing the matrix.
  void apply_add(const VectorXcd& x, VectorXcd& y) const;

  bool is_zero() const;

  int dim() const { return dim_; }
  int offset() const { return offset_; }

 private:
  VectorXcd taps_;
  int offset_ = 0;
  int dim_ = 0;
};

/// ISI and forward/backward IBI Toeplitz blocks for every (user, antenna)
/// link, for all indices in the Proposition-4 sets (matrices for indices
/// outside the truly-nonzero range come out exactly zero).
struct ToeplitzBlocks {
  int users = 0;
  int antennas = 0;
  int block_len = 0;
  DelaySplit split;
  IbiIndexSets sets;
  std::vector<ToeplitzOperator> isi;                       // row-major (k, n)
  std::map<int, std::vector<ToeplitzOperator>> forward;    // b -> blocks
  std::map<int, std::vector<ToeplitzOperator>> backward;   // b -> blocks

  const ToeplitzOperator& isi_block(int k, int n) const { return isi[size_t(k) * antennas + n]; }
};

ToeplitzBlocks build_toeplitz(const DiscreteChannelSet& ch, int block_len,
                              const DelaySplit& split, const IbiIndexSets& sets);

/// Post ZP/ZJ stacked operators: KM x NM matrices whose (k, n) block is
/// R H A Sigma_beta W_beta^H for the respective Toeplitz block H. Backward
/// operators are kept for residual-IBI diagnostics only.
struct EffectiveOperators {
  int users = 0;
  int antennas = 0;
  int symbols = 0;  // M
  MatrixXcd isi;
  std::map<int, MatrixXcd> forward;
  std::map<int, MatrixXcd> backward;
};

EffectiveOperators build_effective(const ToeplitzBlocks& blocks, const FrftModulator& mod,
                                   const RedundancyPair& red);

}  // namespace ftnslp
