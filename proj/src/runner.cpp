#include "ftnslp/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ftnslp/channel.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/theory.hpp"

namespace ftnslp {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 over the packed identifiers
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1) +
                    0x94d049bb133111ebULL * (c + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string run_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<RunPoint> expand_points(const std::string& preset, const SystemConfig& base,
                                    const std::set<std::string>& overridden,
                                    const std::optional<SweepSpec>& custom_sweep) {
  auto pinned = [&](const std::string& f) { return overridden.count(f) > 0; };
  auto label_num = [](const std::string& axis, double v) {
    char buf[64];
    if (axis == "users" || axis == "delta" || axis == "redundancy" || axis == "n_blocks" ||
        axis == "subcarriers" || axis == "antennas")
      std::snprintf(buf, sizeof(buf), "%s=%d", axis.c_str(), int(std::lround(v)));
    else
      std::snprintf(buf, sizeof(buf), "%s=%.4g", axis.c_str(), v);
    return std::string(buf);
  };

  std::vector<RunPoint> points;
  auto push_sweep = [&](const SystemConfig& cfg, const SweepSpec& sweep, const std::string& prefix) {
    if (pinned(sweep.axis)) {
      points.push_back({prefix.empty() ? "base" : prefix, cfg});
      return;
    }
    for (double v : sweep.values) {
      SystemConfig varied = apply_axis(cfg, sweep.axis, v);
      std::string label = label_num(sweep.axis, v);
      if (!prefix.empty()) label = prefix + "/" + label;
      points.push_back({label, varied});
    }
  };

  if (custom_sweep.has_value()) {
    push_sweep(base, *custom_sweep, "");
    return points;
  }
  if (preset == "exp1" || preset == "custom" || preset.empty()) {
    auto sweeps = preset_sweeps(preset == "custom" || preset.empty() ? "exp1" : preset, base);
    if (preset == "custom" || preset.empty()) {
      points.push_back({"base", base});
    } else {
      push_sweep(base, sweeps[0], "");
    }
    return points;
  }
  if (preset == "exp2") {
    struct Pair { double alpha, beta; };
    std::vector<Pair> pairs = {{0.90, 0.88}, {0.80, 1.0}, {1.0, 0.79}, {1.0, 1.0}};
    if (pinned("alpha") || pinned("beta")) pairs = {{base.alpha, base.beta}};
    std::vector<std::string> constellations = {"qpsk", "8psk"};
    if (pinned("constellation")) constellations = {base.constellation};
    for (const auto& pr : pairs)
      for (const auto& con : constellations) {
        SystemConfig cfg = base;
        cfg.alpha = pr.alpha;
        cfg.beta = pr.beta;
        cfg.constellation = con;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "alpha=%.2f/beta=%.2f/%s", pr.alpha, pr.beta, con.c_str());
        push_sweep(cfg, preset_sweeps("exp2", cfg)[0], buf);
      }
    return points;
  }
  if (preset == "exp3") {
    std::vector<double> betas = {0.80, 0.90, 1.0};
    if (pinned("beta")) betas = {base.beta};
    for (double b : betas) {
      SystemConfig cfg = base;
      cfg.beta = b;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "beta=%.2f", b);
      push_sweep(cfg, preset_sweeps("exp3", cfg)[0], buf);
    }
    return points;
  }
  throw std::invalid_argument("unknown preset: " + preset);
}

std::vector<TrialRecord> run_trial(const SystemConfig& cfg, const std::string& label, int trial) {
  const double tb = t_beta(cfg.t1, cfg.subcarriers, cfg.beta);
  const double ts = cfg.alpha * cfg.t1;
  const SampledPulse pulse = make_srrc(tb, cfg.rolloff, cfg.pulse_span);

  ChannelProfile profile;
  profile.n_paths = cfg.n_paths;
  profile.tau_decay = cfg.tau_decay_t1 * cfg.t1;
  profile.tau_max = cfg.tau_max_t1 * cfg.t1;

  const std::uint64_t label_h = std::hash<std::string>{}(label);
  const std::uint64_t chan_seed = mix_seed(cfg.seed, label_h, std::uint64_t(trial), 1);
  const std::uint64_t sym_seed = mix_seed(cfg.seed, label_h, std::uint64_t(trial), 2);
  const std::uint64_t noise_seed0 = mix_seed(cfg.seed, label_h, std::uint64_t(trial), 3);

  const ChannelGrid grid = draw_channels(cfg.users, cfg.antennas, profile, chan_seed);
  DiscreteChannelSet ch = effective_channel(grid, pulse, ts, cfg.epsilon);
  if (cfg.delta >= 0) ch = with_group_delay(std::move(ch), cfg.delta);

  NoiseModel noise{cfg.noise_variance, cfg.colored_noise};
  std::vector<TrialRecord> rows;
  for (size_t si = 0; si < cfg.schemes.size(); ++si) {
    const auto& scheme = cfg.schemes[si];
    const int r = resolve_redundancy(scheme, ch.split.delta, ch.order);
    const PrecoderKind kind = scheme.slp ? PrecoderKind::Slp : PrecoderKind::ZeroForcing;
    const LinkScenario sc =
        make_scenario(ch, pulse, kind, cfg.subcarriers, r, cfg.t1, cfg.beta,
                      Constellation::from_name(cfg.constellation), cfg.gamma_db, noise,
                      cfg.impedance, SolveOptions{}, cfg.warmup);
    const std::uint64_t noise_seed = mix_seed(noise_seed0, si, 0, 4);
    TrialRecord rec;
    rec.point = label;
    rec.trial = trial;
    rec.scheme = scheme.label;
    rec.users = cfg.users;
    rec.antennas = cfg.antennas;
    rec.subcarriers = cfg.subcarriers;
    rec.redundancy = r;
    rec.alpha = cfg.alpha;
    rec.beta = cfg.beta;
    rec.gamma_db = cfg.gamma_db;
    rec.order = ch.order;
    rec.delta = ch.split.delta;
    rec.seed = chan_seed;
    rec.result = run_stream(sc, kind, cfg.n_blocks, sym_seed, noise_seed);
    rows.push_back(std::move(rec));
  }
  return rows;
}

void write_csv(const std::string& path, const std::vector<TrialRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "trial,K,N,M,R,alpha,beta,gamma_db,precoder,ser,sum_rate_bps,power_w,se_bps_hz,"
         "ei_j_per_bit,seed\n";
  char buf[512];
  auto emit = [&](int trial, const TrialRecord& r, const StreamResult& res, std::uint64_t seed) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%d,%.10g,%.10g,%.10g,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%llu\n",
                  trial, r.users, r.antennas, r.subcarriers, r.redundancy, r.alpha, r.beta,
                  r.gamma_db, r.scheme.c_str(), res.ser, res.sum_rate_bps, res.avg_power_w,
                  res.spectral_eff, res.energy_ineff, static_cast<unsigned long long>(seed));
    out << buf;
  };
  for (const auto& r : rows) emit(r.trial, r, r.result, r.seed);

  // Aggregate rows (trial = -1): per (point, scheme) means.
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : rows) groups[{r.point, r.scheme}].push_back(&r);
  for (const auto& [key, group] : groups) {
    TrialRecord agg = *group.front();
    StreamResult mean{};
    mean.ser_per_user = VectorXd::Zero(agg.users);
    for (const auto* r : group) {
      mean.ser += r->result.ser;
      mean.sum_rate_bps += r->result.sum_rate_bps;
      mean.avg_power_w += r->result.avg_power_w;
      mean.spectral_eff += r->result.spectral_eff;
      mean.energy_ineff += r->result.energy_ineff;
    }
    const double n = double(group.size());
    mean.ser /= n;
    mean.sum_rate_bps /= n;
    mean.avg_power_w /= n;
    mean.spectral_eff /= n;
    mean.energy_ineff /= n;
    emit(-1, agg, mean, 0);
  }
}

ExperimentOutput run_experiment(const std::vector<RunPoint>& points, const std::string& out_dir,
                                bool dump_channels) {
  ExperimentOutput output;
  std::mutex mtx;

  for (const auto& point : points) {
    const auto rep = validate_config(point.cfg);
    if (!rep.ok()) {
      std::string msg = "invalid config at point " + point.label + ":";
      for (const auto& e : rep.errors) msg += "\n  " + e;
      throw std::invalid_argument(msg);
    }
  }

  for (const auto& point : points) {
    const int n_trials = point.cfg.n_trials;
    std::vector<std::vector<TrialRecord>> per_trial(static_cast<size_t>(n_trials));
    unsigned n_threads = point.cfg.threads > 0 ? unsigned(point.cfg.threads)
                                               : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, unsigned(n_trials));
    std::atomic<int> next{0};
    std::vector<std::string> failures;
    auto worker = [&]() {
      for (int t = next.fetch_add(1); t < n_trials; t = next.fetch_add(1)) {
        try {
          per_trial[size_t(t)] = run_trial(point.cfg, point.label, t);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(mtx);
          failures.push_back(point.label + " trial " + std::to_string(t) + ": " + e.what());
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!failures.empty()) throw std::runtime_error("trial failures:\n  " + failures.front());
    for (auto& rows : per_trial)
      for (auto& r : rows) output.rows.push_back(std::move(r));
  }

  // Summary: per (point, scheme) mean and standard error of each metric.
  nlohmann::json summary;
  summary["points"] = nlohmann::json::array();
  std::map<std::string, std::map<std::string, std::vector<const TrialRecord*>>> by_point;
  for (const auto& r : output.rows) by_point[r.point][r.scheme].push_back(&r);
  for (const auto& [label, schemes] : by_point) {
    nlohmann::json jp;
    jp["label"] = label;
    for (const auto& [scheme, group] : schemes) {
      auto stat = [&](auto getter) {
        double mean = 0.0, var = 0.0;
        for (const auto* r : group) mean += getter(r->result);
        mean /= double(group.size());
        for (const auto* r : group) {
          const double d = getter(r->result) - mean;
          var += d * d;
        }
        var = group.size() > 1 ? var / double(group.size() - 1) : 0.0;
        return std::pair<double, double>(mean, std::sqrt(var / double(group.size())));
      };
      nlohmann::json js;
      const auto inf_safe = [](double v) { return std::isfinite(v) ? v : -1.0; };
      auto [ser_m, ser_se] = stat([](const StreamResult& s) { return s.ser; });
      auto [sr_m, sr_se] = stat([](const StreamResult& s) { return s.sum_rate_bps; });
      auto [pw_m, pw_se] = stat([](const StreamResult& s) { return s.avg_power_w; });
      auto [se_m, se_se] = stat([](const StreamResult& s) { return s.spectral_eff; });
      js["ser"] = {{"mean", ser_m}, {"stderr", ser_se}};
      js["sum_rate_bps"] = {{"mean", sr_m}, {"stderr", sr_se}};
      js["power_w"] = {{"mean", pw_m}, {"stderr", pw_se}};
      js["se_bps_hz"] = {{"mean", se_m}, {"stderr", se_se}};
      double ei_sum = 0.0;
      int ei_n = 0;
      for (const auto* r : group)
        if (std::isfinite(r->result.energy_ineff)) {
          ei_sum += r->result.energy_ineff;
          ++ei_n;
        }
      js["ei_j_per_bit"] = {{"mean", ei_n ? inf_safe(ei_sum / ei_n) : -1.0}, {"finite_trials", ei_n}};
      double nu = 0.0, delta = 0.0;
      for (const auto* r : group) {
        nu += r->order;
        delta += r->delta;
      }
      js["mean_order"] = nu / double(group.size());
      js["mean_delta"] = delta / double(group.size());
      jp["schemes"][scheme] = std::move(js);
    }
    summary["points"].push_back(std::move(jp));
  }
  if (!points.empty()) {
    const std::string cfg_json = config_to_json(points.front().cfg);
    summary["config_echo"] = nlohmann::json::parse(cfg_json);
    summary["run_hash"] = run_hash(cfg_json);
    summary["modulator_condition"] =
        modulator_condition(make_frft_modulator(points.front().cfg.subcarriers, points.front().cfg.beta));
  }
  output.summary_json = summary.dump(2);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_csv(out_dir + "/results.csv", output.rows);
    std::ofstream js(out_dir + "/summary.json");
    js << output.summary_json << '\n';
    if (dump_channels && !points.empty()) {
      const auto& cfg = points.front().cfg;
      const double tb = t_beta(cfg.t1, cfg.subcarriers, cfg.beta);
      const SampledPulse pulse = make_srrc(tb, cfg.rolloff, cfg.pulse_span);
      ChannelProfile profile{cfg.n_paths, cfg.tau_decay_t1 * cfg.t1, cfg.tau_max_t1 * cfg.t1};
      const std::uint64_t label_h = std::hash<std::string>{}(points.front().label);
      const auto grid = draw_channels(cfg.users, cfg.antennas, profile, mix_seed(cfg.seed, label_h, 0, 1));
      const auto ch = effective_channel(grid, pulse, cfg.alpha * cfg.t1, cfg.epsilon);
      std::ofstream cj(out_dir + "/channels.json");
      cj << channel_to_json(ch) << '\n';
    }
  }
  return output;
}

}  // namespace ftnslp
