#include "ftnslp/precoder.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace ftnslp {

std::vector<MatrixXcd> subcarrier_channels(const DiscreteChannelSet& ch, int subcarriers) {
  std::vector<MatrixXcd> stack(static_cast<size_t>(subcarriers));
  for (int m = 0; m < subcarriers; ++m) {
    MatrixXcd hm(ch.users, ch.antennas);
    for (int k = 0; k < ch.users; ++k)
      for (int n = 0; n < ch.antennas; ++n) {
        cplx acc{0.0, 0.0};
        const auto& taps = ch.tap(k, n);
        for (Index p = 0; p < taps.size(); ++p)
          acc += taps[p] * std::exp(-kJ * (2.0 * kPi * m * double(p) / subcarriers));
        hm(k, n) = acc;
      }
    stack[size_t(m)] = std::move(hm);
  }
  return stack;
}

VectorXcd zf_precode(const std::vector<MatrixXcd>& subcarrier, const VectorXcd& targets) {
  const int m_count = int(subcarrier.size());
  if (m_count == 0) throw std::invalid_argument("zf_precode: empty subcarrier stack");
  const int users = int(subcarrier[0].rows());
  const int antennas = int(subcarrier[0].cols());
  if (antennas < users) throw std::invalid_argument("zf_precode: need N >= K");
  if (targets.size() != Index(users) * m_count)
    throw std::invalid_argument("zf_precode: target dimension mismatch");

  VectorXcd d = VectorXcd::Zero(Index(antennas) * m_count);
  for (int m = 0; m < m_count; ++m) {
    const MatrixXcd& hm = subcarrier[size_t(m)];
    Eigen::JacobiSVD<MatrixXcd> svd(hm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv[users - 1] < 1e-12 * sv[0])
      throw std::runtime_error("zf_precode: rank-deficient channel at subcarrier " + std::to_string(m));
    VectorXcd sm(users);
    for (int k = 0; k < users; ++k) sm[k] = targets[Index(k) * m_count + m];
    const VectorXcd gram_inv_s = (hm * hm.adjoint()).llt().solve(sm);
    const VectorXcd dm = hm.adjoint() * gram_inv_s;
    for (int n = 0; n < antennas; ++n) d[Index(n) * m_count + m] = dm[n];
  }
  return d;
}

MatrixXcd build_gamma(const FrftModulator& mod, const RedundancyPair& red,
                      const CorrelationMatrix& corr, int antennas) {
  const int m = mod.subcarriers;
  const int p = m + red.guard_len;
  if (corr.entries.rows() != p)
    throw std::invalid_argument("build_gamma: correlation matrix must be (M+R) x (M+R)");
  if (antennas < 1) throw std::invalid_argument("build_gamma: need at least one antenna");

  const MatrixXcd synthesis = synthesis_matrix(mod, red);  // A Sigma W^H
  MatrixXcd core = synthesis.adjoint() * corr.entries * synthesis;
  core = 0.5 * (core + core.adjoint()).eval();
  Eigen::LLT<MatrixXcd> llt(core);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "build_gamma: pulse Gram block is not positive definite; increase the pulse span");

  MatrixXcd gamma = MatrixXcd::Zero(Index(antennas) * m, Index(antennas) * m);
  for (int n = 0; n < antennas; ++n) gamma.block(Index(n) * m, Index(n) * m, m, m) = core;
  return gamma;
}

SlpPrecoder::SlpPrecoder(const EffectiveOperators& ops, const MatrixXcd& gamma,
                         Constellation constellation, VectorXd qos, SolveOptions solver)
    : ops_(ops), gamma_(gamma), constellation_(std::move(constellation)),
      solver_(solver) {
  const Index nm = Index(ops.antennas) * ops.symbols;
  if (gamma_.rows() != nm || gamma_.cols() != nm)
    throw std::invalid_argument("slp: Gamma dimension mismatch");
  if (qos.size() != Index(ops.users) * ops.symbols)
    throw std::invalid_argument("slp: qos dimension mismatch");
  state_.qos = std::move(qos);
  for (const auto& [b, mat] : ops_.forward) depth_ = std::max(depth_, b);
  reset_history();
  // The quadratic form is block-shared across precodes; embed it once.
  q_embedded_ = embed_complex(gamma_, {}).Q;
}

void SlpPrecoder::reset_history() {
  state_.history.assign(size_t(depth_), VectorXcd::Zero(Index(ops_.antennas) * ops_.symbols));
}

SlpPrecoder::Result SlpPrecoder::precode(const VectorXcd& symbols) {
  const Index km = Index(ops_.users) * ops_.symbols;
  const Index nm = Index(ops_.antennas) * ops_.symbols;
  if (symbols.size() != km) throw std::invalid_argument("slp: symbol dimension mismatch");

  VectorXcd known_ibi = VectorXcd::Zero(km);
  for (const auto& [b, mat] : ops_.forward)
    known_ibi += mat * state_.history[size_t(b - 1)];

  const auto rows = ci_constraints(symbols, state_.qos, constellation_);
  MatrixXd g(Index(rows.size()), 2 * nm);
  VectorXd h(Index(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    // Re(conj(w) (H d + ibi)_e) >= bound; as a plane on d the complex row is
    // conj(w) H_e, shifted by the known forward-IBI offset.
    const VectorXcd r = std::conj(row.normal) * ops_.isi.row(row.entry).transpose();
    g.row(Index(i)).head(nm) = -r.real().transpose();
    g.row(Index(i)).tail(nm) = r.imag().transpose();
    h[Index(i)] = -(row.bound - (std::conj(row.normal) * known_ibi[row.entry]).real());
  }

  QPProblem qp{q_embedded_, VectorXd::Zero(2 * nm), std::move(g), std::move(h)};
  Result res;
  res.report = solve(qp, solver_);
  res.d = res.report.x.head(nm) + kJ * res.report.x.tail(nm);

  if (depth_ > 0) {
    state_.history.push_front(res.d);
    state_.history.pop_back();
  }
  return res;
}

}  // namespace ftnslp
