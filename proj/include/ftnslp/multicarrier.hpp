#pragma once

#include "ftnslp/types.hpp"

namespace ftnslp {

/// Effective bandwidth fraction xi_M(beta) = ((M-1) beta + 1) / M of the
/// frequency-packed multicarrier signal.
double xi(int subcarriers, double packing);

/// Nyquist period of the packed pulse, T_beta = T1 / xi_M(beta).
double t_beta(double t1, int subcarriers, double packing);

/// Inverse fractional Fourier modulator: W_beta^H with entries
/// exp(j 2 pi beta m m' / M), followed by the frequency-centering diagonal
/// Sigma_beta with entries (1/sqrt(M)) exp(-j pi beta ((M-1)/M) m).
struct FrftModulator {
  int subcarriers = 0;
  double packing = 1.0;
  MatrixXcd ifrft;    // W_beta^H, M x M
  VectorXcd shift;    // diagonal of Sigma_beta
};

FrftModulator make_frft_modulator(int subcarriers, double packing);

/// Zero-padding / zero-jamming pair: `add` prepends guard_len zero samples,
/// `remove` keeps the first M samples. remove * add = I exactly.
struct RedundancyPair {
  MatrixXd add;      // (M + R) x M
  MatrixXd remove;   // M x (M + R)
  int guard_len = 0;
};

RedundancyPair make_redundancy(int symbols, int guard_len);

/// One transmitted block: x = A Sigma_beta W_beta^H d, length M + R.
VectorXcd modulate(const FrftModulator& mod, const RedundancyPair& red, const VectorXcd& d);

/// The (M + R) x M synthesis matrix A Sigma_beta W_beta^H applied by modulate.
MatrixXcd synthesis_matrix(const FrftModulator& mod, const RedundancyPair& red);

/// Condition number of Sigma_beta W_beta^H; finite but growing as beta < 1
/// shrinks. Reported in diagnostics, never inverted anywhere downstream.
double modulator_condition(const FrftModulator& mod);

}  // namespace ftnslp
