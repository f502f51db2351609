#include "ftnslp/multicarrier.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace ftnslp {

double xi(int subcarriers, double packing) {
  if (subcarriers < 1) throw std::invalid_argument("xi: need at least one subcarrier");
  if (packing <= 0.0 || packing > 1.0) throw std::invalid_argument("xi: packing must lie in (0, 1]");
  return ((subcarriers - 1) * packing + 1.0) / subcarriers;
}

double t_beta(double t1, int subcarriers, double packing) {
  if (t1 <= 0.0) throw std::invalid_argument("t_beta: T1 must be positive");
  return t1 / xi(subcarriers, packing);
}

FrftModulator make_frft_modulator(int subcarriers, double packing) {
  if (subcarriers < 1) throw std::invalid_argument("frft: need at least one subcarrier");
  if (packing <= 0.0 || packing > 1.0) throw std::invalid_argument("frft: packing must lie in (0, 1]");
  FrftModulator mod;
  mod.subcarriers = subcarriers;
  mod.packing = packing;
  const int m = subcarriers;
  mod.ifrft.resize(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      mod.ifrft(r, c) = std::exp(kJ * (2.0 * kPi * packing * r * c / m));
  mod.shift.resize(m);
  const double w = 1.0 / std::sqrt(double(m));
  for (int r = 0; r < m; ++r)
    mod.shift[r] = w * std::exp(-kJ * (kPi * packing * (double(m - 1) / m) * r));
  return mod;
}

RedundancyPair make_redundancy(int symbols, int guard_len) {
  if (symbols < 1) throw std::invalid_argument("redundancy: need at least one symbol");
  if (guard_len < 0) throw std::invalid_argument("redundancy: guard length must be non-negative");
  RedundancyPair red;
  red.guard_len = guard_len;
  const int p = symbols + guard_len;
  red.add = MatrixXd::Zero(p, symbols);
  red.add.bottomRows(symbols).setIdentity();
  red.remove = MatrixXd::Zero(symbols, p);
  red.remove.leftCols(symbols).setIdentity();
  return red;
}

VectorXcd modulate(const FrftModulator& mod, const RedundancyPair& red, const VectorXcd& d) {
  if (d.size() != mod.subcarriers || red.add.cols() != mod.subcarriers)
    throw std::invalid_argument("modulate: dimension mismatch");
  const VectorXcd core = mod.shift.asDiagonal() * (mod.ifrft * d);
  VectorXcd x = VectorXcd::Zero(red.add.rows());
  x.tail(mod.subcarriers) = core;
  return x;
}

MatrixXcd synthesis_matrix(const FrftModulator& mod, const RedundancyPair& red) {
  if (red.add.cols() != mod.subcarriers)
    throw std::invalid_argument("synthesis_matrix: dimension mismatch");
  MatrixXcd t = MatrixXcd::Zero(red.add.rows(), mod.subcarriers);
  t.bottomRows(mod.subcarriers) = mod.shift.asDiagonal() * mod.ifrft;
  return t;
}

double modulator_condition(const FrftModulator& mod) {
  const MatrixXcd core = mod.shift.asDiagonal() * mod.ifrft;
  Eigen::JacobiSVD<MatrixXcd> svd(core);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

}  // namespace ftnslp
