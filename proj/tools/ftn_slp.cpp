#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ftnslp/channel.hpp"
#include "ftnslp/config.hpp"
#include "ftnslp/interference.hpp"
#include "ftnslp/linksim.hpp"
#include "ftnslp/multicarrier.hpp"
#include "ftnslp/qpsolver.hpp"
#include "ftnslp/runner.hpp"
#include "ftnslp/theory.hpp"

namespace {

using namespace ftnslp;

int check_theory() {
  int failures = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };

  // alpha_min values behind Experiment 3.
  report(std::abs(alpha_min(32, 0.80, 0.25) - 0.99224806201550386) < 1e-12 &&
             std::abs(alpha_min(32, 0.90, 0.25) - 0.88581314878892730) < 1e-12 &&
             std::abs(alpha_min(64, 1.0, 0.25) - 0.8) < 1e-15,
         "alpha_min closed form at (M, beta) = (32, 0.80), (32, 0.90), (*, 1.0)");

  // SE0 monotone in alpha with scaled redundancy, and in beta at fixed R.
  bool mono = true;
  for (int m : {8, 16, 64})
    for (double beta : {0.7, 0.9, 1.0}) {
      double prev = -1.0;
      for (double a : {1.0, 0.9, 0.8, 0.7, 0.6}) {
        const int r = redundancy_scaling(6, 1.0, a);
        const double v = se0(m, r, a, beta, 2, 1.0, 0.25);
        if (prev >= 0.0 && v <= prev) mono = false;
        prev = v;
      }
    }
  report(mono, "SE0 strictly increases when alpha decreases (redundancy rescaled)");

  mono = true;
  for (int m : {8, 16, 64}) {
    double prev = -1.0;
    for (double b : {1.0, 0.9, 0.8, 0.7}) {
      const double v = se0(m, 4, 0.9, b, 2, 1.0, 0.25);
      if (prev >= 0.0 && v <= prev) mono = false;
      prev = v;
    }
  }
  report(mono, "SE0 strictly increases when beta decreases (fixed redundancy)");

  // IBI index sets contain the brute-force nonzero scan (small exhaustive cut).
  bool contained = true;
  for (int p = 1; p <= 8 && contained; ++p)
    for (int nu = p + 1; nu <= 24 && contained; ++nu)
      for (int delta = 0; delta < nu && contained; ++delta) {
        const auto split = make_delay_split(delta, p, nu);
        const auto sets = ibi_index_sets(nu, p, split);
        int count = 1;
        for (int b = 1; b <= nu / p + 2; ++b) {
          const bool nz_f = b * p + delta - (p - 1) <= nu;
          const bool nz_b = -b * p + (p - 1) + delta >= 0;
          if (nz_f) {
            ++count;
            if (std::find(sets.forward.begin(), sets.forward.end(), b) == sets.forward.end())
              contained = false;
          }
          if (nz_b) {
            ++count;
            if (std::find(sets.backward.begin(), sets.backward.end(), b) == sets.backward.end())
              contained = false;
          }
        }
        if (count > sets.max_affecting) contained = false;
      }
  report(contained, "brute-force nonzero IBI scan contained in the index sets, count within bound");

  // Lossless margin flips across alpha_min for an SRRC pulse.
  const SampledPulse pulse = make_srrc(1.0, 0.25, 16);
  const double amin = alpha_min(16, 1.0, 0.25);
  const auto above = lossless_check(pulse, 1.02 * amin * 1.0, 4096);
  const auto below = lossless_check(pulse, 0.90 * amin * 1.0, 4096);
  report(above.lossless && !below.lossless,
         "folded-spectrum losslessness flips across alpha_min (SRRC, beta = 1)");

  // Minimum redundancy zeroes the backward effective operators.
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    bool ok = true;
    for (int rep = 0; rep < 5 && ok; ++rep) {
      const int m = 6, nu = 11, delta = 5;
      DiscreteChannelSet ch;
      ch.users = 1;
      ch.antennas = 1;
      ch.order = nu;
      ch.sampling_time = 1.0;
      VectorXcd taps(nu + 1);
      for (Index i = 0; i < taps.size(); ++i) taps[i] = cplx(g(rng), g(rng));
      ch.taps = {taps};
      const int r = (delta + 1) / 2;
      const int p = m + r;
      ch.split = make_delay_split(delta, p, nu);
      const auto sets = ibi_index_sets(nu, p, ch.split);
      const auto blocks = build_toeplitz(ch, p, ch.split, sets);
      const auto mod = make_frft_modulator(m, 0.9);
      const auto red = make_redundancy(m, r);
      const auto ops = build_effective(blocks, mod, red);
      for (const auto& [b, mat] : ops.backward)
        if (mat.cwiseAbs().maxCoeff() != 0.0) ok = false;
    }
    report(ok, "half-delay redundancy leaves every backward effective operator exactly zero");
  }

  std::printf("%s\n", failures == 0 ? "theory checks passed" : "theory checks FAILED");
  return failures == 0 ? 0 : 1;
}

int solve_qp_file(const std::string& path, const std::string& out) {
  const QPProblem p = load_problem(path);
  const QPSolution sol = solve(p);
  const char* status = sol.status == SolveStatus::Optimal     ? "optimal"
                       : sol.status == SolveStatus::Infeasible ? "infeasible"
                                                               : "max_iter";
  std::printf("status: %s\n", status);
  std::printf("iterations: %d\n", sol.iterations);
  std::printf("objective: %.12g\n", sol.objective);
  std::printf("kkt: stationarity=%.3e primal=%.3e dual=%.3e complementarity=%.3e\n",
              sol.kkt.stationarity, sol.kkt.primal, sol.kkt.dual, sol.kkt.complementarity);
  if (!out.empty()) {
    save_problem(out, p, &sol);
    std::printf("archive written to %s\n", out.c_str());
  }
  return sol.status == SolveStatus::Optimal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-packed FTN symbol-level precoding simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment preset or a custom sweep");
  std::string preset = "custom", config_path, out_dir = "results", sweep_axis, sweep_values;
  bool dump_channels = false;
  SystemConfig cfg;
  std::uint64_t seed = 0;
  run->add_option("--preset", preset, "exp1 | exp2 | exp3 | custom");
  run->add_option("--config", config_path, "JSON config file (overrides preset defaults)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "master seed (required for reproducible runs)")->required();
  auto* om = run->add_option("--m", cfg.subcarriers, "subcarriers");
  auto* on = run->add_option("--n", cfg.antennas, "transmit antennas");
  auto* ok = run->add_option("--k", cfg.users, "users");
  auto* oa = run->add_option("--alpha", cfg.alpha, "acceleration factor");
  auto* ob = run->add_option("--beta", cfg.beta, "frequency-packing factor");
  auto* og = run->add_option("--gamma", cfg.gamma_db, "target SINR [dB]");
  auto* oc = run->add_option("--constellation", cfg.constellation, "qpsk | 8psk | 16qam");
  auto* ot = run->add_option("--trials", cfg.n_trials, "channel draws");
  auto* obl = run->add_option("--blocks", cfg.n_blocks, "blocks per stream");
  auto* od = run->add_option("--delta", cfg.delta, "group delay (-1 = auto)");
  auto* oth = run->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  run->add_option("--sweep", sweep_axis, "custom sweep axis (SystemConfig field)");
  run->add_option("--values", sweep_values, "comma-separated sweep values");
  run->add_flag("--dump-channels", dump_channels, "write the first channel set as JSON");

  auto* check = app.add_subcommand("check-theory", "Run the closed-form theory property suite");

  auto* solveqp = app.add_subcommand("solve-qp", "Solve a QP problem archive");
  std::string problem_path, solution_path;
  solveqp->add_option("--problem", problem_path, "problem JSON")->required();
  solveqp->add_option("--out", solution_path, "write problem + solution archive here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return check_theory();
    if (solveqp->parsed()) return solve_qp_file(problem_path, solution_path);

    SystemConfig base = preset_config(preset);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config file " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      base = config_from_json(ss.str());
    }
    std::set<std::string> overridden;
    auto apply = [&](CLI::Option* opt, const std::string& name, auto member) {
      if (opt->count() > 0) {
        base.*member = cfg.*member;
        overridden.insert(name);
      }
    };
    apply(om, "subcarriers", &SystemConfig::subcarriers);
    apply(on, "antennas", &SystemConfig::antennas);
    apply(ok, "users", &SystemConfig::users);
    apply(oa, "alpha", &SystemConfig::alpha);
    apply(ob, "beta", &SystemConfig::beta);
    apply(og, "gamma_db", &SystemConfig::gamma_db);
    apply(oc, "constellation", &SystemConfig::constellation);
    apply(ot, "n_trials", &SystemConfig::n_trials);
    apply(obl, "n_blocks", &SystemConfig::n_blocks);
    apply(od, "delta", &SystemConfig::delta);
    apply(oth, "threads", &SystemConfig::threads);
    base.seed = seed;

    const auto rep = validate_config(base);
    for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (!rep.ok()) {
      for (const auto& e : rep.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
      return 2;
    }

    std::optional<SweepSpec> custom;
    if (!sweep_axis.empty()) {
      SweepSpec spec;
      spec.axis = sweep_axis;
      std::stringstream ss(sweep_values);
      std::string tok;
      while (std::getline(ss, tok, ',')) spec.values.push_back(std::stod(tok));
      if (spec.values.empty()) throw std::invalid_argument("--sweep given without --values");
      custom = std::move(spec);
    }

    const auto points = expand_points(preset, base, overridden, custom);
    const auto output = run_experiment(points, out_dir, dump_channels);
    std::printf("wrote %zu trial rows to %s/results.csv\n", output.rows.size(), out_dir.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
