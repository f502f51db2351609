#include "ftnslp/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ftnslp/constellation.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/theory.hpp"

namespace ftnslp {

std::string to_string(RedundancyRule rule) {
  switch (rule) {
    case RedundancyRule::None: return "none";
    case RedundancyRule::QuarterDelay: return "quarter-delay";
    case RedundancyRule::HalfDelay: return "half-delay";
    case RedundancyRule::Full: return "full";
    case RedundancyRule::Explicit: return "explicit";
  }
  return "none";
}

RedundancyRule redundancy_rule_from_string(const std::string& s) {
  if (s == "none") return RedundancyRule::None;
  if (s == "quarter-delay") return RedundancyRule::QuarterDelay;
  if (s == "half-delay") return RedundancyRule::HalfDelay;
  if (s == "full") return RedundancyRule::Full;
  if (s == "explicit") return RedundancyRule::Explicit;
  throw std::invalid_argument("unknown redundancy rule: " + s);
}

namespace {

nlohmann::json scheme_to_json(const SchemeSpec& s) {
  return {{"label", s.label},
          {"precoder", s.slp ? "slp" : "zf"},
          {"rule", to_string(s.rule)},
          {"explicit_r", s.explicit_r}};
}

SchemeSpec scheme_from_json(const nlohmann::json& j) {
  SchemeSpec s;
  s.label = j.at("label").get<std::string>();
  s.slp = j.at("precoder").get<std::string>() == "slp";
  s.rule = redundancy_rule_from_string(j.at("rule").get<std::string>());
  s.explicit_r = j.value("explicit_r", 0);
  return s;
}

}  // namespace

std::string config_to_json(const SystemConfig& cfg) {
  nlohmann::json j;
  j["subcarriers"] = cfg.subcarriers;
  j["antennas"] = cfg.antennas;
  j["users"] = cfg.users;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["rolloff"] = cfg.rolloff;
  j["t1"] = cfg.t1;
  j["delta"] = cfg.delta;
  j["constellation"] = cfg.constellation;
  j["gamma_db"] = cfg.gamma_db;
  j["noise_variance"] = cfg.noise_variance;
  j["impedance"] = cfg.impedance;
  j["code_rate"] = cfg.code_rate;
  j["epsilon"] = cfg.epsilon;
  j["pulse_span"] = cfg.pulse_span;
  j["n_paths"] = cfg.n_paths;
  j["tau_decay_t1"] = cfg.tau_decay_t1;
  j["tau_max_t1"] = cfg.tau_max_t1;
  j["n_blocks"] = cfg.n_blocks;
  j["n_trials"] = cfg.n_trials;
  j["seed"] = cfg.seed;
  j["colored_noise"] = cfg.colored_noise;
  j["warmup"] = cfg.warmup;
  j["threads"] = cfg.threads;
  auto& schemes = j["schemes"] = nlohmann::json::array();
  for (const auto& s : cfg.schemes) schemes.push_back(scheme_to_json(s));
  return j.dump(2);
}

SystemConfig config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SystemConfig cfg;
  cfg.subcarriers = j.value("subcarriers", cfg.subcarriers);
  cfg.antennas = j.value("antennas", cfg.antennas);
  cfg.users = j.value("users", cfg.users);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.rolloff = j.value("rolloff", cfg.rolloff);
  cfg.t1 = j.value("t1", cfg.t1);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.constellation = j.value("constellation", cfg.constellation);
  cfg.gamma_db = j.value("gamma_db", cfg.gamma_db);
  cfg.noise_variance = j.value("noise_variance", cfg.noise_variance);
  cfg.impedance = j.value("impedance", cfg.impedance);
  cfg.code_rate = j.value("code_rate", cfg.code_rate);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.pulse_span = j.value("pulse_span", cfg.pulse_span);
  cfg.n_paths = j.value("n_paths", cfg.n_paths);
  cfg.tau_decay_t1 = j.value("tau_decay_t1", cfg.tau_decay_t1);
  cfg.tau_max_t1 = j.value("tau_max_t1", cfg.tau_max_t1);
  cfg.n_blocks = j.value("n_blocks", cfg.n_blocks);
  cfg.n_trials = j.value("n_trials", cfg.n_trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.colored_noise = j.value("colored_noise", cfg.colored_noise);
  cfg.warmup = j.value("warmup", cfg.warmup);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("schemes")) {
    cfg.schemes.clear();
    for (const auto& s : j["schemes"]) cfg.schemes.push_back(scheme_from_json(s));
  }
  return cfg;
}

ValidationReport validate_config(const SystemConfig& cfg) {
  ValidationReport rep;
  rep.normalized = cfg;
  auto err = [&](const std::string& m) { rep.errors.push_back(m); };
  auto warn = [&](const std::string& m) { rep.warnings.push_back(m); };

  if (cfg.users < 1) err("users must be >= 1");
  if (cfg.antennas < cfg.users) err("antenna count must satisfy N >= K");
  if (cfg.subcarriers < 1) err("subcarriers must be >= 1");
  if (cfg.alpha <= 0.0 || cfg.alpha > 1.0) err("alpha must lie in (0, 1]");
  if (cfg.beta <= 0.0 || cfg.beta > 1.0) err("beta must lie in (0, 1]");
  if (cfg.rolloff <= 0.0 || cfg.rolloff > 1.0) err("rolloff must lie in (0, 1]");
  if (cfg.t1 <= 0.0) err("t1 must be positive");
  if (cfg.gamma_db < -40.0 || cfg.gamma_db > 60.0) err("gamma_db outside a sane range");
  if (cfg.noise_variance <= 0.0) err("noise variance must be positive");
  if (cfg.impedance <= 0.0) err("impedance must be positive");
  if (cfg.code_rate <= 0.0 || cfg.code_rate > 1.0) err("code rate must lie in (0, 1]");
  if (cfg.epsilon < 0.0) err("epsilon must be non-negative");
  if (cfg.pulse_span < 4) err("pulse span must be >= 4");
  if (cfg.n_paths < 1) err("need at least one path");
  if (cfg.tau_decay_t1 <= 0.0 || cfg.tau_max_t1 < 0.0) err("bad delay profile");
  if (cfg.n_trials < 1) err("need at least one trial");
  if (cfg.n_blocks < 1) err("need at least one block");
  if (cfg.warmup >= cfg.n_blocks) err("warm-up must leave measured blocks");
  if (cfg.schemes.empty()) err("no schemes configured");
  try {
    (void)redundancy_rule_from_string("none");
    for (const auto& s : cfg.schemes)
      if (s.rule == RedundancyRule::Explicit && s.explicit_r < 0) err("explicit redundancy must be >= 0");
  } catch (const std::exception& e) {
    err(e.what());
  }
  try {
    (void)Constellation::from_name(cfg.constellation);
  } catch (const std::exception& e) {
    err(e.what());
  }

  if (rep.ok()) {
    const double amin = alpha_min(cfg.subcarriers, cfg.beta, cfg.rolloff);
    if (cfg.alpha < amin) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "alpha=%.4f below alpha_min=%.4f: information losslessness violated",
                    cfg.alpha, amin);
      warn(buf);
    }
    if (cfg.delta >= 0) {
      const int half = (cfg.delta + 1) / 2;
      if (!efficiency_check(cfg.subcarriers, half))
        warn("half-delay redundancy for the configured delta is not an efficient transmission (M <= R)");
    }
  }
  return rep;
}

int resolve_redundancy(const SchemeSpec& scheme, int delta, int order) {
  switch (scheme.rule) {
    case RedundancyRule::None: return 0;
    case RedundancyRule::QuarterDelay: return (delta + 3) / 4;
    case RedundancyRule::HalfDelay: return (delta + 1) / 2;
    case RedundancyRule::Full: return order;
    case RedundancyRule::Explicit: return scheme.explicit_r;
  }
  return 0;
}

int aligned_group_delay(int peak, const SchemeSpec& scheme, int order) {
  const int cap = std::max(order - 1, 0);
  for (int delta = peak; delta <= cap; ++delta)
    if (delta - resolve_redundancy(scheme, delta, order) >= peak) return delta;
  return cap;
}

SystemConfig preset_config(const std::string& preset) {
  SystemConfig cfg;
  if (preset == "exp1") {
    cfg.subcarriers = 64;
    cfg.antennas = 8;
    cfg.users = 4;
    cfg.alpha = 1.0;
    cfg.beta = 1.0;
    cfg.constellation = "16qam";
    cfg.gamma_db = 15.0;
    cfg.schemes = {{"zf-full", false, RedundancyRule::Full, 0},
                   {"slp-r0", true, RedundancyRule::None, 0}};
  } else if (preset == "exp2") {
    cfg.subcarriers = 16;
    cfg.antennas = 4;
    cfg.users = 4;
    cfg.constellation = "qpsk";
    cfg.n_paths = 1;  // flat physical fading
    cfg.tau_max_t1 = 0.0;
    cfg.schemes = {{"slp-r0", true, RedundancyRule::None, 0}};
  } else if (preset == "exp3") {
    cfg.subcarriers = 32;
    cfg.antennas = 4;
    cfg.users = 4;
    cfg.constellation = "qpsk";
    cfg.gamma_db = 6.0;
    cfg.schemes = {{"zf-full", false, RedundancyRule::Full, 0},
                   {"slp-quarter", true, RedundancyRule::QuarterDelay, 0},
                   {"slp-half", true, RedundancyRule::HalfDelay, 0}};
  } else if (preset != "custom") {
    throw std::invalid_argument("unknown preset: " + preset);
  }
  return cfg;
}

SystemConfig apply_axis(SystemConfig cfg, const std::string& axis, double value) {
  if (axis == "users") cfg.users = int(std::lround(value));
  else if (axis == "antennas") cfg.antennas = int(std::lround(value));
  else if (axis == "subcarriers") cfg.subcarriers = int(std::lround(value));
  else if (axis == "alpha") cfg.alpha = value;
  else if (axis == "beta") cfg.beta = value;
  else if (axis == "gamma_db") cfg.gamma_db = value;
  else if (axis == "rolloff") cfg.rolloff = value;
  else if (axis == "delta") cfg.delta = int(std::lround(value));
  else if (axis == "n_blocks") cfg.n_blocks = int(std::lround(value));
  else if (axis == "redundancy") {
    for (auto& s : cfg.schemes)
      if (s.slp) {
        s.rule = RedundancyRule::Explicit;
        s.explicit_r = int(std::lround(value));
        s.label = "slp-r" + std::to_string(s.explicit_r);
      }
  } else {
    throw std::invalid_argument("unknown sweep axis: " + axis);
  }
  return cfg;
}

std::vector<SweepSpec> preset_sweeps(const std::string& preset, const SystemConfig& cfg) {
  std::vector<SweepSpec> sweeps;
  if (preset == "exp1") {
    SweepSpec s;
    s.axis = "users";
    s.preset = preset;
    for (int k = 4; k <= cfg.antennas; ++k) s.values.push_back(k);
    sweeps.push_back(std::move(s));
  } else if (preset == "exp2") {
    SweepSpec s;
    s.axis = "gamma_db";
    s.preset = preset;
    for (double g = -2.0; g <= 12.0 + 1e-9; g += 2.0) s.values.push_back(g);
    sweeps.push_back(std::move(s));
  } else if (preset == "exp3") {
    SweepSpec s;
    s.axis = "alpha";
    s.preset = preset;
    const double amin = alpha_min(cfg.subcarriers, cfg.beta, cfg.rolloff);
    for (double off : {-0.06, -0.03, 0.0, 0.03, 0.06}) {
      const double a = amin + off;
      if (a > 0.3 && a <= 1.0 + 1e-12) s.values.push_back(std::min(a, 1.0));
    }
    sweeps.push_back(std::move(s));
  }
  return sweeps;
}

}  // namespace ftnslp
