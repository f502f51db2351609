#include <doctest.h>

#include <random>

#include "ftnslp/pulse.hpp"
#include "support/oracles.hpp"

using namespace ftnslp;

TEST_SUITE_BEGIN("pulse");

TEST_CASE("srrc autocorrelation is T-Nyquist") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(pulse.autocorrelation(double(k))) < 1e-6);
  CHECK(pulse.autocorrelation(0.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("truncated pulse has unit energy") {
  for (double rho : {0.25, 0.5, 1.0}) {
    const auto pulse = make_srrc(1.0, rho, 16);
    const double e = oracles::simpson([&](double t) { return pulse(t) * pulse(t); }, -16.0, 16.0, 1 << 15);
    CHECK(e == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("even symmetry") {
  const auto pulse = make_srrc(1.0, 0.3, 16);
  for (double t : {0.13, 0.77, 1.9, 3.001, 7.5, 15.2}) CHECK(pulse(t) == doctest::Approx(pulse(-t)).epsilon(1e-14));
}

TEST_CASE("removable singularity at T/(4 rho) is continuous") {
  // rho = 1: the singular point sits at T/4.
  const auto pulse = make_srrc(1.0, 1.0, 16);
  const double at = pulse(0.25);
  const double left = pulse(0.25 - 1e-7);
  const double right = pulse(0.25 + 1e-7);
  CHECK(std::isfinite(at));
  CHECK(std::abs(at - left) < 1e-5);
  CHECK(std::abs(at - right) < 1e-5);
  // analytic limit value of the closed form
  const double rho = 1.0;
  const double limit = rho / std::sqrt(2.0) *
                       ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * rho)) +
                        (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * rho)));
  CHECK(at == doctest::Approx(pulse.norm_factor() * limit).epsilon(1e-9));
}

TEST_CASE("autocorrelation singularity at T/(2 rho) is continuous") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const double y0 = 1.0 / (2.0 * 0.25);
  const double at = pulse.autocorrelation(y0);
  CHECK(std::isfinite(at));
  CHECK(std::abs(at - pulse.autocorrelation(y0 - 1e-7)) < 1e-6);
  CHECK(std::abs(at - pulse.autocorrelation(y0 + 1e-7)) < 1e-6);
}

TEST_CASE("closed-form autocorrelation matches the convolution integral") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  // (f*f)(tau) = int f(t) f(t - tau) dt over a window wide enough that the
  // pulse tail contributes below the tolerance.
  auto autocorr = [&](double tau) {
    return oracles::simpson(
        [&](double t) { return srrc_amplitude(t, 1.0, 0.25) * srrc_amplitude(t - tau, 1.0, 0.25); },
        -64.0, 64.0 + tau, 1 << 17);
  };
  for (double tau : {0.0, 0.8, 1.6, 2.4, 0.5, 3.3}) {
    CHECK(pulse.autocorrelation(tau) == doctest::Approx(autocorr(tau)).epsilon(1e-6));
  }
}

TEST_CASE("correlation matrix at Nyquist sampling is the identity") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto corr = correlation_matrix(pulse, 1.0, 6);
  CHECK((corr.entries - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("correlation matrix off-diagonal at faster-than-Nyquist sampling") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto corr = correlation_matrix(pulse, 0.8, 4);
  CHECK(corr.entries(0, 1) != 0.0);
  const double direct = oracles::simpson(
      [&](double t) { return srrc_amplitude(t, 1.0, 0.25) * srrc_amplitude(t - 0.8, 1.0, 0.25); },
      -64.0, 64.8, 1 << 17);
  CHECK(corr.entries(0, 1) == doctest::Approx(direct).epsilon(1e-6));
  // symmetric Toeplitz with unit diagonal
  CHECK(corr.entries(1, 0) == corr.entries(0, 1));
  CHECK(corr.entries(2, 3) == corr.entries(0, 1));
  CHECK(corr.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("correlation matrix positive definite in the lossless regime") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  for (double ts : {1.0, 0.9, 0.85}) {  // alpha_min = 0.8 at beta = 1
    const auto corr = correlation_matrix(pulse, ts, 12);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(corr.entries);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("block energy of a unit impulse") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto corr = correlation_matrix(pulse, 1.0, 5);
  VectorXcd x = VectorXcd::Zero(5);
  x[0] = 1.0;
  CHECK(block_energy(x, corr, 50.0) == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(block_energy(VectorXcd::Zero(5), corr, 50.0) == 0.0);
}

TEST_CASE("block energy equals waveform quadrature for random blocks") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double ts : {0.8, 1.0}) {
    const int p = 6;
    const auto corr = correlation_matrix(pulse, ts, p);
    for (int rep = 0; rep < 20; ++rep) {
      VectorXcd x(p);
      for (int i = 0; i < p; ++i) x[i] = cplx(g(rng), g(rng));
      const double direct = block_energy(x, corr, 50.0);
      auto wave = [&](double t) {
        cplx v{0.0, 0.0};
        for (int i = 0; i < p; ++i) v += x[i] * pulse(t - i * ts);
        return std::norm(v) / 50.0;
      };
      const double quad = oracles::simpson(wave, -16.0, 16.0 + p * ts, 1 << 14);
      CHECK(direct == doctest::Approx(quad).epsilon(0.01));
    }
  }
}

TEST_CASE("dimension and domain errors") {
  CHECK_THROWS(make_srrc(1.0, 0.0, 16));
  CHECK_THROWS(make_srrc(1.0, 1.5, 16));
  CHECK_THROWS(make_srrc(-1.0, 0.5, 16));
  CHECK_THROWS(make_srrc(1.0, 0.5, 2));
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto corr = correlation_matrix(pulse, 1.0, 4);
  CHECK_THROWS(block_energy(VectorXcd::Zero(5), corr, 50.0));
}

TEST_SUITE_END();
