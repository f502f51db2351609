#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftnslp/pulse.hpp"
#include "ftnslp/theory.hpp"
#include "ftnslp/types.hpp"

namespace ftnslp {

struct PathComponent {
  double delay = 0.0;  // seconds
  cplx gain{0.0, 0.0};
};

/// Base-band physical link impulse response as a sum of discrete paths.
struct PhysicalChannel {
  std::vector<PathComponent> paths;
};

struct ChannelGrid {
  int users = 0;
  int antennas = 0;
  std::vector<PhysicalChannel> links;  // row-major (user, antenna)

  PhysicalChannel& at(int k, int n) { return links[size_t(k) * antennas + n]; }
  const PhysicalChannel& at(int k, int n) const { return links[size_t(k) * antennas + n]; }
};

/// Rayleigh profile: path delays uniform on [0, tau_max] (sorted), gains
/// circularly-symmetric Gaussian with power decaying as exp(-tau/tau_decay),
/// normalized to unit expected total power per link.
struct ChannelProfile {
  int n_paths = 8;
  double tau_decay = 4e-7;
  double tau_max = 1.2e-6;
};

ChannelGrid draw_channels(int users, int antennas, const ChannelProfile& profile, std::uint64_t seed);

/// Effective discrete-time MU-MISO channel: taps of (physical * g * f)(t)
/// sampled at Ts, trimmed to the above-threshold support common to all links.
struct DiscreteChannelSet {
  int users = 0;
  int antennas = 0;
  int order = 0;          // nu: taps run over indices 0..nu
  double sampling_time = 0.0;
  double threshold = 0.0;  // absolute tap magnitude threshold used
  int sample_offset = 0;   // stream sample index of tap 0
  std::vector<VectorXcd> taps;  // row-major (user, antenna), each length nu+1
  DelaySplit split;

  const VectorXcd& tap(int k, int n) const { return taps[size_t(k) * antennas + n]; }
};

/// Builds the tap set; threshold is relative to the peak tap magnitude.
/// The group delay defaults to the total-power peak (see default_group_delay)
/// and can be overridden with with_group_delay.
DiscreteChannelSet effective_channel(const ChannelGrid& grid, const SampledPulse& pulse,
                                     double sampling_time, double rel_threshold = 1e-4);

/// Delay split at the tap index maximizing sum_{k,n} |h_{k,n}[p]|^2,
/// clamped below the channel order.
DelaySplit default_group_delay(const DiscreteChannelSet& ch);

DiscreteChannelSet with_group_delay(DiscreteChannelSet ch, int delta);

/// JSON round trip for replaying a channel set across runs.
std::string channel_to_json(const DiscreteChannelSet& ch);
DiscreteChannelSet channel_from_json(const std::string& text);

}  // namespace ftnslp
