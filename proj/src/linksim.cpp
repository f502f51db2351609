#include "ftnslp/linksim.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace ftnslp {

LinkScenario make_scenario(const DiscreteChannelSet& ch, const SampledPulse& pulse,
                           PrecoderKind kind, int symbols, int redundancy, double t1, double beta,
                           const Constellation& constellation, double gamma_db,
                           const NoiseModel& noise, double impedance,
                           const SolveOptions& solver, int warmup) {
  if (symbols < 1) throw std::invalid_argument("make_scenario: need at least one subcarrier");
  if (redundancy < 0) throw std::invalid_argument("make_scenario: redundancy must be non-negative");

  const double gamma_lin = std::pow(10.0, gamma_db / 10.0);
  // a noise-free run (variance 0) keeps the unit-variance design target
  const double qos = std::sqrt(gamma_lin * (noise.variance > 0.0 ? noise.variance : 1.0));
  const int block_len = symbols + redundancy;

  FrftModulator mod = make_frft_modulator(symbols, beta);
  RedundancyPair red = make_redundancy(symbols, redundancy);

  ToeplitzBlocks blocks;
  EffectiveOperators ops;
  MatrixXcd gamma;
  std::vector<MatrixXcd> subcarrier;
  int default_warmup = 0;

  if (kind == PrecoderKind::Slp) {
    const DelaySplit split = make_delay_split(ch.split.delta, block_len, ch.order);
    const IbiIndexSets sets = ibi_index_sets(ch.order, block_len, split);
    blocks = build_toeplitz(ch, block_len, split, sets);
    ops = build_effective(blocks, mod, red);
    const CorrelationMatrix corr = correlation_matrix(pulse, ch.sampling_time, block_len);
    gamma = build_gamma(mod, red, corr, ch.antennas);
    default_warmup = sets.forward.empty() ? 0 : sets.forward.back();
  } else {
    subcarrier = subcarrier_channels(ch, symbols);
  }

  return LinkScenario{ch.users,
                      ch.antennas,
                      symbols,
                      redundancy,
                      ch.sampling_time,
                      t1,
                      beta,
                      pulse.rolloff(),
                      impedance,
                      qos,
                      noise,
                      warmup >= 0 ? warmup : default_warmup,
                      constellation,
                      pulse,
                      std::move(mod),
                      std::move(red),
                      std::move(blocks),
                      std::move(ops),
                      std::move(gamma),
                      solver,
                      std::move(subcarrier)};
}

std::vector<std::vector<VectorXcd>> receive_blocks(
    const ToeplitzBlocks& blocks, const std::vector<std::vector<VectorXcd>>& tx) {
  const int antennas = blocks.antennas;
  const int users = blocks.users;
  if (int(tx.size()) != antennas) throw std::invalid_argument("receive_blocks: antenna count mismatch");
  const int n_blocks = int(tx[0].size());
  const int p = blocks.block_len;

  std::vector<std::vector<VectorXcd>> y(static_cast<size_t>(users));
  for (int k = 0; k < users; ++k) {
    y[size_t(k)].assign(size_t(n_blocks), VectorXcd::Zero(p));
    for (int l = 0; l < n_blocks; ++l) {
      VectorXcd& yl = y[size_t(k)][size_t(l)];
      for (int n = 0; n < antennas; ++n) {
        blocks.isi_block(k, n).apply_add(tx[size_t(n)][size_t(l)], yl);
        for (const auto& [b, vec] : blocks.forward)
          if (l - b >= 0) vec[size_t(k) * antennas + n].apply_add(tx[size_t(n)][size_t(l - b)], yl);
        for (const auto& [b, vec] : blocks.backward)
          if (l + b < n_blocks) vec[size_t(k) * antennas + n].apply_add(tx[size_t(n)][size_t(l + b)], yl);
      }
    }
  }
  return y;
}

std::vector<int> detect_block(const VectorXcd& y, const Constellation& c, double qos) {
  if (qos <= 0.0) throw std::invalid_argument("detect_block: qos must be positive");
  std::vector<int> out(size_t(y.size()));
  for (Index i = 0; i < y.size(); ++i) out[size_t(i)] = c.detect(y[i] / qos);
  return out;
}

double stream_power(const std::vector<VectorXcd>& antenna_streams, const SampledPulse& pulse,
                    double sampling_time, double impedance) {
  if (antenna_streams.empty() || antenna_streams[0].size() == 0)
    throw std::invalid_argument("stream_power: empty stream");
  const Index len = antenna_streams[0].size();
  const int band = int(std::ceil(2.0 * pulse.span() * pulse.nyquist_period() / sampling_time));

  VectorXd corr(std::min<Index>(band + 1, len));
  for (Index d = 0; d < corr.size(); ++d) corr[d] = pulse.autocorrelation(double(d) * sampling_time);

  double energy = 0.0;
  for (const auto& x : antenna_streams) {
    if (x.size() != len) throw std::invalid_argument("stream_power: stream length mismatch");
    energy += corr[0] * x.squaredNorm();
    for (Index d = 1; d < corr.size(); ++d) {
      if (corr[d] == 0.0) continue;
      const cplx lag = x.head(len - d).dot(x.tail(len - d));  // sum conj(x_i) x_{i+d}
      energy += 2.0 * corr[d] * lag.real();
    }
  }
  return energy / impedance / (double(len) * sampling_time);
}

StreamResult metrics(const StreamCounts& counts, const LinkScenario& sc) {
  StreamResult res;
  const int users = sc.users;
  res.ser_per_user.resize(users);
  for (int k = 0; k < users; ++k)
    res.ser_per_user[k] =
        counts.symbols_per_user > 0 ? double(counts.errors_per_user[k]) / double(counts.symbols_per_user) : 0.0;
  res.ser = res.ser_per_user.mean();

  const double p_len = sc.symbols + sc.redundancy;
  const double t_b = t_beta(sc.t1, sc.symbols, sc.beta);
  const double bw = 2.0 * (1.0 + sc.rolloff) / t_b;
  res.sum_rate_bps = users * (sc.symbols / p_len) *
                     (double(sc.constellation.bits_per_symbol()) / sc.sampling_time) * (1.0 - res.ser);
  res.avg_power_w = counts.power_w;
  res.spectral_eff = res.sum_rate_bps / bw;
  res.energy_ineff = res.spectral_eff > 0.0 ? res.avg_power_w / res.spectral_eff
                                            : std::numeric_limits<double>::infinity();
  res.n_blocks = counts.n_blocks;
  res.warmup_excluded = counts.warmup_excluded;
  res.qp_failures = counts.qp_failures;
  res.qp_max_kkt = counts.qp_max_kkt;
  res.qp_mean_iterations = counts.qp_mean_iterations;
  return res;
}

namespace {

VectorXcd white_noise(std::mt19937_64& rng, Index len, double variance) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
  VectorXcd v(len);
  for (Index i = 0; i < len; ++i) v[i] = cplx(gauss(rng), gauss(rng));
  return v;
}

StreamResult run_slp_stream(const LinkScenario& sc, int n_blocks, std::uint64_t symbol_seed,
                            std::uint64_t noise_seed) {
  const int users = sc.users, antennas = sc.antennas, m = sc.symbols;
  const Index km = Index(users) * m;
  const int p = m + sc.redundancy;

  std::mt19937_64 sym_rng(symbol_seed);
  std::uniform_int_distribution<int> pick(0, sc.constellation.order() - 1);

  VectorXd qos_vec = VectorXd::Constant(km, sc.qos);
  SlpPrecoder slp(sc.ops, sc.gamma, sc.constellation, qos_vec, sc.solver);

  // Pass 1: precode sequentially; the precoder sees only past blocks.
  std::vector<std::vector<int>> sent(static_cast<size_t>(n_blocks));
  std::vector<std::vector<VectorXcd>> tx(static_cast<size_t>(antennas));
  for (auto& stream : tx) stream.reserve(size_t(n_blocks));
  StreamCounts counts;
  counts.errors_per_user = VectorXi::Zero(users);
  double iter_sum = 0.0;
  for (int l = 0; l < n_blocks; ++l) {
    auto& idx = sent[size_t(l)];
    idx.resize(size_t(km));
    VectorXcd symbols(km);
    for (Index i = 0; i < km; ++i) {
      idx[size_t(i)] = pick(sym_rng);
      symbols[i] = sc.constellation.point(idx[size_t(i)]);
    }
    auto res = slp.precode(symbols);
    if (res.report.status != SolveStatus::Optimal) ++counts.qp_failures;
    counts.qp_max_kkt = std::max(counts.qp_max_kkt, res.report.kkt.worst());
    iter_sum += res.report.iterations;
    for (int n = 0; n < antennas; ++n)
      tx[size_t(n)].push_back(modulate(sc.mod, sc.red, res.d.segment(Index(n) * m, m)));
  }
  counts.qp_mean_iterations = n_blocks > 0 ? iter_sum / n_blocks : 0.0;

  // Pass 2: assemble what each user actually receives, future blocks included.
  auto rx = receive_blocks(sc.blocks, tx);

  std::mt19937_64 noise_rng(noise_seed);
  Eigen::LLT<MatrixXd> noise_chol;
  if (sc.noise.colored && sc.noise.variance > 0.0) {
    CorrelationMatrix cg = correlation_matrix(sc.pulse, sc.sampling_time, Index(n_blocks) * p);
    MatrixXd cov = sc.noise.variance * cg.entries;
    cov.diagonal().array() += 1e-12 * sc.noise.variance;
    noise_chol.compute(cov);
  }

  for (int k = 0; k < users; ++k) {
    VectorXcd noise_stream;
    if (sc.noise.variance > 0.0) {
      noise_stream = white_noise(noise_rng, Index(n_blocks) * p, sc.noise.variance);
      if (sc.noise.colored) {
        VectorXcd tmp(noise_stream.size());
        tmp.real() = noise_chol.matrixL() * noise_stream.real() / std::sqrt(sc.noise.variance);
        tmp.imag() = noise_chol.matrixL() * noise_stream.imag() / std::sqrt(sc.noise.variance);
        noise_stream = tmp;
      }
    }
    for (int l = sc.warmup; l < n_blocks; ++l) {
      VectorXcd y = rx[size_t(k)][size_t(l)];
      if (sc.noise.variance > 0.0) y += noise_stream.segment(Index(l) * p, p);
      const VectorXcd kept = y.head(m);  // zero jamming
      const auto detected = detect_block(kept, sc.constellation, sc.qos);
      for (int i = 0; i < m; ++i)
        if (detected[size_t(i)] != sent[size_t(l)][size_t(k) * m + i]) ++counts.errors_per_user[k];
    }
  }

  std::vector<VectorXcd> flat(static_cast<size_t>(antennas));
  for (int n = 0; n < antennas; ++n) {
    VectorXcd s(Index(n_blocks) * p);
    for (int l = 0; l < n_blocks; ++l) s.segment(Index(l) * p, p) = tx[size_t(n)][size_t(l)];
    flat[size_t(n)] = std::move(s);
  }
  counts.power_w = stream_power(flat, sc.pulse, sc.sampling_time, sc.impedance);
  counts.symbols_per_user = Index(n_blocks - sc.warmup) * m;
  counts.n_blocks = n_blocks;
  counts.warmup_excluded = sc.warmup;
  return metrics(counts, sc);
}

StreamResult run_zf_stream(const LinkScenario& sc, int n_blocks, std::uint64_t symbol_seed,
                           std::uint64_t noise_seed) {
  const int users = sc.users, antennas = sc.antennas, m = sc.symbols;
  const Index km = Index(users) * m;
  const int p = m + sc.redundancy;

  std::mt19937_64 sym_rng(symbol_seed);
  std::mt19937_64 noise_rng(noise_seed);
  std::uniform_int_distribution<int> pick(0, sc.constellation.order() - 1);

  // Unitary IDFT for the conventional multicarrier baseline.
  MatrixXcd idft(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      idft(r, c) = std::exp(kJ * (2.0 * kPi * r * c / m)) / std::sqrt(double(m));

  StreamCounts counts;
  counts.errors_per_user = VectorXi::Zero(users);
  std::vector<VectorXcd> flat(size_t(antennas), VectorXcd::Zero(Index(n_blocks) * p));

  for (int l = 0; l < n_blocks; ++l) {
    std::vector<int> idx(static_cast<size_t>(km));
    VectorXcd targets(km);
    for (Index i = 0; i < km; ++i) {
      idx[size_t(i)] = pick(sym_rng);
      targets[i] = sc.qos * sc.constellation.point(idx[size_t(i)]);
    }
    const VectorXcd d = zf_precode(sc.subcarrier, targets);

    // Per-subcarrier reception: s_hat^(m) = H^(m) d^(m) + z^(m).
    VectorXcd shat(km);
    for (int sub = 0; sub < m; ++sub) {
      VectorXcd dm(antennas);
      for (int n = 0; n < antennas; ++n) dm[n] = d[Index(n) * m + sub];
      const VectorXcd ym = sc.subcarrier[size_t(sub)] * dm;
      for (int k = 0; k < users; ++k) shat[Index(k) * m + sub] = ym[k];
    }
    if (sc.noise.variance > 0.0) shat += white_noise(noise_rng, km, sc.noise.variance);

    if (l >= sc.warmup)
      for (int k = 0; k < users; ++k) {
        const auto detected = detect_block(shat.segment(Index(k) * m, m), sc.constellation, sc.qos);
        for (int i = 0; i < m; ++i)
          if (detected[size_t(i)] != idx[size_t(k) * m + i]) ++counts.errors_per_user[k];
      }

    // Cyclic-prefix time samples of this block, for the shared power meter.
    for (int n = 0; n < antennas; ++n) {
      VectorXcd dn(m);
      for (int sub = 0; sub < m; ++sub) dn[sub] = d[Index(n) * m + sub];
      const VectorXcd u = idft * dn;
      VectorXcd x(p);
      for (int i = 0; i < p; ++i) x[i] = u[((i - sc.redundancy) % m + m) % m];
      flat[size_t(n)].segment(Index(l) * p, p) = x;
    }
  }

  counts.power_w = stream_power(flat, sc.pulse, sc.sampling_time, sc.impedance);
  counts.symbols_per_user = Index(n_blocks - sc.warmup) * m;
  counts.n_blocks = n_blocks;
  counts.warmup_excluded = sc.warmup;
  return metrics(counts, sc);
}

}  // namespace

StreamResult run_stream(const LinkScenario& sc, PrecoderKind kind, int n_blocks,
                        std::uint64_t symbol_seed, std::uint64_t noise_seed) {
  if (n_blocks <= sc.warmup) throw std::invalid_argument("run_stream: need more blocks than warm-up");
  return kind == PrecoderKind::Slp ? run_slp_stream(sc, n_blocks, symbol_seed, noise_seed)
                                   : run_zf_stream(sc, n_blocks, symbol_seed, noise_seed);
}

}  // namespace ftnslp
