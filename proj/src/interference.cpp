#include "ftnslp/interference.hpp"

#include <stdexcept>

namespace ftnslp {

MatrixXcd ToeplitzOperator::dense() const {
  MatrixXcd out(dim_, dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = coeff(r, c);
  return out;
}

void ToeplitzOperator::apply_add(const VectorXcd& x, VectorXcd& y) const {
  for (int r = 0; r < dim_; ++r) {
    // tap index k = r - c + offset in [0, nu]
    const int c_lo = std::max(0, r + offset_ - int(taps_.size()) + 1);
    const int c_hi = std::min(dim_ - 1, r + offset_);
    cplx acc{0.0, 0.0};
    for (int c = c_lo; c <= c_hi; ++c) acc += taps_[r - c + offset_] * x[c];
    y[r] += acc;
  }
}

bool ToeplitzOperator::is_zero() const {
  // Some diagonal admits a tap index in [0, nu] iff the index ranges overlap.
  const int lo = -(dim_ - 1) + offset_;
  const int hi = (dim_ - 1) + offset_;
  if (hi < 0 || lo > int(taps_.size()) - 1) return true;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (coeff(r, c) != cplx(0.0, 0.0)) return false;
  return true;
}

ToeplitzBlocks build_toeplitz(const DiscreteChannelSet& ch, int block_len,
                              const DelaySplit& split, const IbiIndexSets& sets) {
  if (block_len < 1) throw std::invalid_argument("build_toeplitz: block length must be >= 1");
  if (split.block_len != block_len) throw std::invalid_argument("build_toeplitz: split/block length mismatch");

  ToeplitzBlocks blocks;
  blocks.users = ch.users;
  blocks.antennas = ch.antennas;
  blocks.block_len = block_len;
  blocks.split = split;
  blocks.sets = sets;

  const int links = ch.users * ch.antennas;
  blocks.isi.reserve(links);
  for (int l = 0; l < links; ++l)
    blocks.isi.emplace_back(ch.taps[l], split.delta, block_len);
  for (int b : sets.forward) {
    auto& vec = blocks.forward[b];
    vec.reserve(links);
    for (int l = 0; l < links; ++l)
      vec.emplace_back(ch.taps[l], b * block_len + split.delta, block_len);
  }
  for (int b : sets.backward) {
    auto& vec = blocks.backward[b];
    vec.reserve(links);
    for (int l = 0; l < links; ++l)
      vec.emplace_back(ch.taps[l], -b * block_len + split.delta, block_len);
  }
  return blocks;
}

namespace {

MatrixXcd stack_effective(const std::vector<ToeplitzOperator>& ops, int users, int antennas,
                          const MatrixXcd& synthesis, int symbols) {
  const int p = int(synthesis.rows());
  MatrixXcd out(users * symbols, antennas * symbols);
  for (int k = 0; k < users; ++k)
    for (int n = 0; n < antennas; ++n) {
      const auto& block = ops[size_t(k) * antennas + n];
      // R H A Sigma W^H: the zero-jamming keeps the first M rows of H * T.
      MatrixXcd ht = MatrixXcd::Zero(symbols, symbols);
      for (int r = 0; r < symbols; ++r)
        for (int c = 0; c < p; ++c) {
          const cplx v = block.coeff(r, c);
          if (v != cplx(0.0, 0.0)) ht.row(r) += v * synthesis.row(c);
        }
      out.block(k * symbols, n * symbols, symbols, symbols) = ht;
    }
  return out;
}

}  // namespace

EffectiveOperators build_effective(const ToeplitzBlocks& blocks, const FrftModulator& mod,
                                   const RedundancyPair& red) {
  const int symbols = mod.subcarriers;
  if (symbols + red.guard_len != blocks.block_len)
    throw std::invalid_argument("build_effective: M + R must equal the block length");

  const MatrixXcd synthesis = synthesis_matrix(mod, red);
  EffectiveOperators ops;
  ops.users = blocks.users;
  ops.antennas = blocks.antennas;
  ops.symbols = symbols;
  ops.isi = stack_effective(blocks.isi, blocks.users, blocks.antennas, synthesis, symbols);
  for (const auto& [b, vec] : blocks.forward)
    ops.forward[b] = stack_effective(vec, blocks.users, blocks.antennas, synthesis, symbols);
  for (const auto& [b, vec] : blocks.backward)
    ops.backward[b] = stack_effective(vec, blocks.users, blocks.antennas, synthesis, symbols);
  return ops;
}

}  // namespace ftnslp
