#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftnslp/config.hpp"
#include "ftnslp/linksim.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

/// One fully-resolved simulation point (all sweep axes applied).
struct RunPoint {
  std::string label;
  SystemConfig cfg;
};

/// Expands a preset (or a custom sweep) into run points. Fields listed in
/// `overridden` were set explicitly and pin the corresponding preset axis.
std::vector<RunPoint> expand_points(const std::string& preset, const SystemConfig& base,
                                    const std::set<std::string>& overridden,
                                    const std::optional<SweepSpec>& custom_sweep = std::nullopt);

struct TrialRecord {
  std::string point;
  int trial = 0;
  std::string scheme;
  int users = 0, antennas = 0, subcarriers = 0, redundancy = 0;
  double alpha = 0.0, beta = 0.0, gamma_db = 0.0;
  int order = 0, delta = 0;
  std::uint64_t seed = 0;
  StreamResult result;
};

struct ExperimentOutput {
  std::vector<TrialRecord> rows;
  std::string summary_json;
};

/// Runs every trial of every point, fanning trials over a worker pool.
/// Results are deterministic in (seed, config) and independent of the
/// worker count. Writes <out_dir>/results.csv and <out_dir>/summary.json
/// when out_dir is non-empty; dumps the first trial's channel set when
/// dump_channels is set.
ExperimentOutput run_experiment(const std::vector<RunPoint>& points, const std::string& out_dir,
                                bool dump_channels = false);

/// Runs all schemes of one configured point on one drawn channel.
std::vector<TrialRecord> run_trial(const SystemConfig& cfg, const std::string& label, int trial);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// FNV-1a content hash used to stamp output files with their configuration.
std::string run_hash(const std::string& text);

void write_csv(const std::string& path, const std::vector<TrialRecord>& rows);

}  // namespace ftnslp
