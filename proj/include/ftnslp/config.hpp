#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftnslp/types.hpp"

namespace ftnslp {

enum class RedundancyRule { None, QuarterDelay, HalfDelay, Full, Explicit };

std::string to_string(RedundancyRule rule);
RedundancyRule redundancy_rule_from_string(const std::string& s);

/// One precoding scheme of a run: which precoder and how much redundancy.
struct SchemeSpec {
  std::string label;
  bool slp = true;  // false -> zero-forcing baseline
  RedundancyRule rule = RedundancyRule::None;
  int explicit_r = 0;
};

/// Every scenario parameter of the simulator. Defaults correspond to the
/// desk-scale Experiment-1 configuration.
struct SystemConfig {
  int subcarriers = 16;       // M
  int antennas = 8;           // N
  int users = 4;              // K
  double alpha = 1.0;
  double beta = 1.0;
  double rolloff = 0.25;
  double t1 = 100e-9;         // seconds
  int delta = -1;             // group delay; -1 = auto (total-power peak)
  std::string constellation = "16qam";
  double gamma_db = 15.0;     // target SINR
  double noise_variance = 1.0;
  double impedance = 50.0;
  double code_rate = 1.0;
  double epsilon = 1e-4;      // tap threshold, relative to the peak tap
  int pulse_span = 16;
  int n_paths = 12;
  double tau_decay_t1 = 4.0;  // decay constant, in units of T1
  double tau_max_t1 = 12.0;   // maximum path delay, in units of T1
  int n_blocks = 50;
  int n_trials = 200;
  std::uint64_t seed = 1;
  bool colored_noise = false;
  int warmup = -1;            // -1 = automatic (forward-IBI depth)
  int threads = 0;            // 0 = hardware concurrency
  std::vector<SchemeSpec> schemes = {{"slp-r0", true, RedundancyRule::None, 0},
                                     {"zf-full", false, RedundancyRule::Full, 0}};
};

std::string config_to_json(const SystemConfig& cfg);
SystemConfig config_from_json(const std::string& text);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  SystemConfig normalized;
  bool ok() const { return errors.empty(); }
};

/// Checks domains and cross-field constraints; warns (per the closed-form
/// results) when alpha violates losslessness or a scheme cannot be efficient.
ValidationReport validate_config(const SystemConfig& cfg);

/// Resolves a redundancy rule against a drawn channel (delta, nu).
int resolve_redundancy(const SchemeSpec& scheme, int delta, int order);

/// Smallest group delay that centers the zero-jammed receive window on the
/// channel's power peak for the scheme's redundancy rule: the effective
/// diagonal tap index is delta - R(delta), so delta solves
/// delta - R(delta) = peak. Clamped below the channel order. With no
/// redundancy this is the peak index itself.
int aligned_group_delay(int peak, const SchemeSpec& scheme, int order);

struct SweepSpec {
  std::string axis;             // SystemConfig field name
  std::vector<double> values;
  std::string preset = "custom";
};

/// Experiment presets. exp1 sweeps the user count at (alpha, beta) = (1, 1);
/// exp2 sweeps the target SINR over the four (alpha, beta) pairs with
/// alpha xi_M(beta) ~ 1/(1+rho); exp3 sweeps alpha around alpha_min per beta.
SystemConfig preset_config(const std::string& preset);
std::vector<SweepSpec> preset_sweeps(const std::string& preset, const SystemConfig& cfg);

/// Applies one sweep value to the named axis field.
SystemConfig apply_axis(SystemConfig cfg, const std::string& axis, double value);

}  // namespace ftnslp
