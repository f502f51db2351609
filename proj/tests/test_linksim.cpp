#include <doctest.h>

#include <random>

#include "ftnslp/linksim.hpp"
#include "ftnslp/runner.hpp"
#include "support/oracles.hpp"

using namespace ftnslp;

TEST_SUITE_BEGIN("linksim");

namespace {

DiscreteChannelSet multipath_channel(int users, int antennas, const SampledPulse& pulse,
                                     double ts, std::uint64_t seed) {
  // Compact delay spread and a coarse tap threshold keep the channel order
  // near the data length, the regime the block sizes below are meant for.
  ChannelProfile profile{6, 1.0, 1.5};
  const auto grid = draw_channels(users, antennas, profile, seed);
  return effective_channel(grid, pulse, ts, 1e-3);
}

LinkScenario scenario_for(const DiscreteChannelSet& ch, const SampledPulse& pulse,
                          PrecoderKind kind, int m, int r, const Constellation& c,
                          double gamma_db, double noise_var) {
  NoiseModel noise{noise_var, false};
  return make_scenario(ch, pulse, kind, m, r, 1.0, 1.0, c, gamma_db, noise, 50.0);
}

}  // namespace

TEST_CASE("noiseless ZF on random multipath channels reconstructs exactly") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  for (int rep = 0; rep < 5; ++rep) {
    const auto ch = multipath_channel(2, 3, pulse, 1.0, 900 + rep);
    const auto sc = scenario_for(ch, pulse, PrecoderKind::ZeroForcing, 8, ch.order,
                                 Constellation::qam16(), 15.0, 0.0);
    const auto res = run_stream(sc, PrecoderKind::ZeroForcing, 6, 1, 2);
    CHECK(res.ser == 0.0);
    CHECK(res.ser_per_user.maxCoeff() == 0.0);
  }
}

TEST_CASE("noiseless SLP with half-delay redundancy reconstructs exactly") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  for (int rep = 0; rep < 4; ++rep) {
    const auto ch = multipath_channel(2, 2, pulse, 0.9, 1200 + rep);
    const int r = min_redundancy(make_delay_split(ch.split.delta, std::max(ch.order, 1), ch.order));
    const auto sc =
        scenario_for(ch, pulse, PrecoderKind::Slp, 8, r, Constellation::qpsk(), 6.0, 0.0);
    const auto res = run_stream(sc, PrecoderKind::Slp, 6, 3, 4);
    CHECK(res.ser == 0.0);
    CHECK(res.qp_failures == 0);
  }
}

TEST_CASE("residual backward perturbation matches the effective operators") {
  // R = 0 with delta >= 1: the ZJ'd receive block minus the known terms of the
  // symbol-level model equals the backward effective products exactly.
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const int m = 6;
  DiscreteChannelSet ch;
  for (int rep = 0;; ++rep) {
    ch = multipath_channel(1, 2, pulse, 0.85, 2200 + rep);
    if (ch.split.delta >= 1) break;
  }
  const auto sc = scenario_for(ch, pulse, PrecoderKind::Slp, m, 0, Constellation::qpsk(), 6.0, 0.0);

  const int n_blocks = 5;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 3);
  const auto qpsk = Constellation::qpsk();
  VectorXd qos = VectorXd::Constant(sc.users * m, sc.qos);
  SlpPrecoder slp(sc.ops, sc.gamma, qpsk, qos, sc.solver);
  std::vector<VectorXcd> d(n_blocks);
  std::vector<std::vector<VectorXcd>> tx(size_t(sc.antennas));
  for (int l = 0; l < n_blocks; ++l) {
    VectorXcd s(sc.users * m);
    for (Index i = 0; i < s.size(); ++i) s[i] = qpsk.point(pick(rng));
    d[size_t(l)] = slp.precode(s).d;
    for (int n = 0; n < sc.antennas; ++n)
      tx[size_t(n)].push_back(modulate(sc.mod, sc.red, d[size_t(l)].segment(Index(n) * m, m)));
  }
  const auto rx = receive_blocks(sc.blocks, tx);
  for (int l = 0; l < n_blocks; ++l) {
    VectorXcd zj = rx[0][size_t(l)].head(m);
    VectorXcd known = sc.ops.isi * d[size_t(l)];
    for (const auto& [b, mat] : sc.ops.forward)
      if (l - b >= 0) known += mat * d[size_t(l - b)];
    VectorXcd backward = VectorXcd::Zero(m);
    for (const auto& [b, mat] : sc.ops.backward)
      if (l + b < n_blocks) backward += mat * d[size_t(l + b)];
    CHECK((zj - known - backward).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("stream power: impulse and Nyquist-sampling identities") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const int p = 8;
  {
    std::vector<VectorXcd> streams(1, VectorXcd::Zero(p));
    streams[0][0] = 1.0;
    const double power = stream_power(streams, pulse, 1.0, 50.0);
    CHECK(power == doctest::Approx(1.0 / 50.0 / (p * 1.0)).epsilon(1e-9));
  }
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<VectorXcd> streams(2, VectorXcd::Zero(p));
    for (auto& s : streams)
      for (int i = 0; i < p; ++i) s[i] = cplx(g(rng), g(rng));
    const double power = stream_power(streams, pulse, 1.0, 50.0);
    double direct = 0.0;
    for (const auto& s : streams) direct += s.squaredNorm();
    CHECK(power == doctest::Approx(direct / 50.0 / (p * 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("stream power: distant blocks decouple") {
  const auto pulse = make_srrc(1.0, 0.25, 8);
  const int gap = 64;
  std::vector<VectorXcd> one(1, VectorXcd::Zero(gap));
  one[0][0] = 1.0;
  const double p_one = stream_power(one, pulse, 1.0, 50.0) * gap;  // energy
  std::vector<VectorXcd> two(1, VectorXcd::Zero(2 * gap));
  two[0][0] = 1.0;
  two[0][gap] = 1.0;
  const double p_two = stream_power(two, pulse, 1.0, 50.0) * 2 * gap;
  CHECK(p_two == doctest::Approx(2.0 * p_one).epsilon(1e-6));
}

TEST_CASE("stream power matches waveform quadrature under FTN") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  const int len = 12;
  const double ts = 0.8;
  std::vector<VectorXcd> streams(1, VectorXcd::Zero(len));
  for (int i = 0; i < len; ++i) streams[0][i] = cplx(g(rng), g(rng));
  const double power = stream_power(streams, pulse, ts, 50.0);
  auto wave = [&](double t) {
    cplx v{0.0, 0.0};
    for (int i = 0; i < len; ++i) v += streams[0][i] * pulse(t - i * ts);
    return std::norm(v) / 50.0;
  };
  const double energy = oracles::simpson(wave, -16.0, 16.0 + len * ts, 1 << 14);
  CHECK(power == doctest::Approx(energy / (len * ts)).epsilon(0.01));
}

TEST_CASE("detection helper") {
  const auto qpsk = Constellation::qpsk();
  VectorXcd y(2);
  y << 2.0 * qpsk.point(3), 2.0 * qpsk.point(1);
  const auto idx = detect_block(y, qpsk, 2.0);
  CHECK(idx[0] == 3);
  CHECK(idx[1] == 1);
  CHECK_THROWS(detect_block(y, qpsk, 0.0));
}

TEST_CASE("metric formulas") {
  const auto pulse = make_srrc(100e-9, 0.25, 16);
  // K=4, M=16, R=0, b=2 (qpsk), Ts=100ns: SR = 4 * 1 * 2/1e-7 * (1-0) = 80 Mbit/s
  DiscreteChannelSet ch;
  ch.users = 4;
  ch.antennas = 4;
  ch.order = 0;
  ch.sampling_time = 100e-9;
  ch.taps.assign(16, VectorXcd::Ones(1));
  ch.split = make_delay_split(0, 16, 0);
  const auto sc = make_scenario(ch, pulse, PrecoderKind::ZeroForcing, 16, 0, 100e-9, 1.0,
                                Constellation::qpsk(), 15.0, NoiseModel{1.0, false}, 50.0);
  StreamCounts counts;
  counts.errors_per_user = VectorXi::Zero(4);
  counts.symbols_per_user = 160;
  counts.power_w = 2.5;
  counts.n_blocks = 10;
  const auto res = metrics(counts, sc);
  CHECK(res.sum_rate_bps == doctest::Approx(80e6).epsilon(1e-12));
  // BW = 2(1+rho)/T_beta = 2*1.25/100ns = 25 MHz
  CHECK(res.spectral_eff == doctest::Approx(80e6 / 25e6).epsilon(1e-12));
  CHECK(res.energy_ineff == doctest::Approx(2.5 / 3.2).epsilon(1e-12));

  // SER = 1 collapses the rate and sends EI to the +inf sentinel
  counts.errors_per_user = VectorXi::Constant(4, 160);
  const auto dead = metrics(counts, sc);
  CHECK(dead.sum_rate_bps == 0.0);
  CHECK(std::isinf(dead.energy_ineff));
}

TEST_CASE("metric self-consistency identity") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto ch = multipath_channel(2, 3, pulse, 1.0, 3100);
  const auto sc = scenario_for(ch, pulse, PrecoderKind::ZeroForcing, 8, ch.order,
                               Constellation::qam16(), 15.0, 1.0);
  const auto res = run_stream(sc, PrecoderKind::ZeroForcing, 8, 11, 12);
  const double p_len = sc.symbols + sc.redundancy;
  const double recompute = sc.users * (sc.symbols / p_len) *
                           (sc.constellation.bits_per_symbol() / sc.sampling_time) *
                           (1.0 - res.ser);
  CHECK(res.sum_rate_bps == doctest::Approx(recompute).epsilon(1e-12));
  CHECK(res.spectral_eff == doctest::Approx(res.sum_rate_bps / (2.0 * 1.25 / 1.0)).epsilon(1e-12));
}

TEST_CASE("fixed seeds reproduce the stream result exactly") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto ch = multipath_channel(2, 2, pulse, 0.9, 3300);
  const int r = min_redundancy(make_delay_split(ch.split.delta, std::max(ch.order, 1), ch.order));
  const auto sc = scenario_for(ch, pulse, PrecoderKind::Slp, 6, r, Constellation::qpsk(), 6.0, 1.0);
  const auto a = run_stream(sc, PrecoderKind::Slp, 6, 21, 22);
  const auto b = run_stream(sc, PrecoderKind::Slp, 6, 21, 22);
  CHECK(a.ser == b.ser);
  CHECK(a.sum_rate_bps == b.sum_rate_bps);
  CHECK(a.avg_power_w == b.avg_power_w);
  CHECK(a.spectral_eff == b.spectral_eff);
  const auto c = run_stream(sc, PrecoderKind::Slp, 6, 23, 22);
  CHECK(a.avg_power_w != c.avg_power_w);
}

TEST_CASE("colored noise path runs and stays finite") {
  const auto pulse = make_srrc(1.0, 0.25, 16);
  const auto ch = multipath_channel(1, 2, pulse, 0.9, 3400);
  NoiseModel noise{1.0, true};
  const auto sc = make_scenario(ch, pulse, PrecoderKind::Slp, 6,
                                min_redundancy(make_delay_split(ch.split.delta, std::max(ch.order, 1), ch.order)),
                                1.0, 1.0, Constellation::qpsk(), 6.0, noise, 50.0);
  const auto res = run_stream(sc, PrecoderKind::Slp, 5, 31, 32);
  CHECK(std::isfinite(res.ser));
  CHECK(res.ser >= 0.0);
  CHECK(res.ser <= 1.0);
}

TEST_SUITE_END();
