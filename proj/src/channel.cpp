#include "ftnslp/channel.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ftnslp {

ChannelGrid draw_channels(int users, int antennas, const ChannelProfile& profile, std::uint64_t seed) {
  if (users < 1 || antennas < 1) throw std::invalid_argument("draw_channels: need K, N >= 1");
  if (profile.n_paths < 1) throw std::invalid_argument("draw_channels: need at least one path");
  if (profile.tau_decay <= 0.0 || profile.tau_max < 0.0)
    throw std::invalid_argument("draw_channels: bad delay profile");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, profile.tau_max);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ChannelGrid grid;
  grid.users = users;
  grid.antennas = antennas;
  grid.links.resize(size_t(users) * antennas);
  for (auto& link : grid.links) {
    std::vector<double> delays(profile.n_paths);
    for (auto& d : delays) d = unif(rng);
    std::sort(delays.begin(), delays.end());
    // normalize relative to the earliest path so extreme decay constants
    // cannot underflow every weight
    double total = 0.0;
    for (double d : delays) total += std::exp(-(d - delays.front()) / profile.tau_decay);
    link.paths.resize(profile.n_paths);
    for (int i = 0; i < profile.n_paths; ++i) {
      const double power = std::exp(-(delays[i] - delays.front()) / profile.tau_decay) / total;
      const double sigma = std::sqrt(power / 2.0);
      link.paths[i].delay = delays[i];
      link.paths[i].gain = cplx(sigma * gauss(rng), sigma * gauss(rng));
    }
  }
  return grid;
}

DiscreteChannelSet effective_channel(const ChannelGrid& grid, const SampledPulse& pulse,
                                     double sampling_time, double rel_threshold) {
  if (sampling_time <= 0.0) throw std::invalid_argument("effective_channel: sampling time must be positive");
  if (rel_threshold < 0.0) throw std::invalid_argument("effective_channel: threshold must be non-negative");
  if (grid.links.empty()) throw std::invalid_argument("effective_channel: empty channel grid");

  const double support = 2.0 * pulse.span() * pulse.nyquist_period();
  double d_min = std::numeric_limits<double>::infinity(), d_max = 0.0;
  for (const auto& link : grid.links) {
    if (link.paths.empty()) throw std::invalid_argument("effective_channel: link with no paths");
    d_min = std::min(d_min, link.paths.front().delay);
    d_max = std::max(d_max, link.paths.back().delay);
  }
  const int p_lo = int(std::floor((d_min - support) / sampling_time));
  const int p_hi = int(std::ceil((d_max + support) / sampling_time));
  const int n_samples = p_hi - p_lo + 1;

  // h_{k,n}[p] = sum_i c_i (f*f)(p Ts - tau_i)
  std::vector<VectorXcd> raw(grid.links.size());
  double peak = 0.0;
  for (size_t l = 0; l < grid.links.size(); ++l) {
    VectorXcd h = VectorXcd::Zero(n_samples);
    for (int p = 0; p < n_samples; ++p) {
      const double t = (p_lo + p) * sampling_time;
      cplx v{0.0, 0.0};
      for (const auto& path : grid.links[l].paths)
        v += path.gain * pulse.autocorrelation(t - path.delay);
      h[p] = v;
    }
    peak = std::max(peak, h.cwiseAbs().maxCoeff());
    raw[l] = std::move(h);
  }
  const double eps = rel_threshold * peak;

  int first = n_samples, last = -1;
  for (const auto& h : raw)
    for (int p = 0; p < n_samples; ++p)
      if (std::abs(h[p]) > eps) {
        first = std::min(first, p);
        last = std::max(last, p);
      }
  if (last < first) throw std::runtime_error("effective_channel: all taps below threshold");

  DiscreteChannelSet ch;
  ch.users = grid.users;
  ch.antennas = grid.antennas;
  ch.order = last - first;
  ch.sampling_time = sampling_time;
  ch.threshold = eps;
  ch.sample_offset = p_lo + first;
  ch.taps.resize(raw.size());
  for (size_t l = 0; l < raw.size(); ++l) ch.taps[l] = raw[l].segment(first, ch.order + 1);
  ch.split = default_group_delay(ch);
  return ch;
}

DelaySplit default_group_delay(const DiscreteChannelSet& ch) {
  VectorXd power = VectorXd::Zero(ch.order + 1);
  for (const auto& h : ch.taps) power += h.cwiseAbs2();
  Index peak = 0;
  power.maxCoeff(&peak);
  int delta = int(peak);
  if (ch.order > 0) delta = std::min(delta, ch.order - 1);  // split requires delta < nu
  // Block length is assigned by the caller once P is known; the canonical
  // split here uses P = order + 1 as a placeholder.
  return make_delay_split(delta, std::max(ch.order, 1), ch.order);
}

DiscreteChannelSet with_group_delay(DiscreteChannelSet ch, int delta) {
  ch.split = make_delay_split(delta, ch.split.block_len, ch.order);
  return ch;
}

std::string channel_to_json(const DiscreteChannelSet& ch) {
  nlohmann::json j;
  j["users"] = ch.users;
  j["antennas"] = ch.antennas;
  j["order"] = ch.order;
  j["sampling_time"] = ch.sampling_time;
  j["threshold"] = ch.threshold;
  j["sample_offset"] = ch.sample_offset;
  j["delta"] = ch.split.delta;
  j["block_len"] = ch.split.block_len;
  auto& taps = j["taps"] = nlohmann::json::array();
  for (const auto& h : ch.taps) {
    nlohmann::json link = nlohmann::json::array();
    for (Index p = 0; p < h.size(); ++p) link.push_back({h[p].real(), h[p].imag()});
    taps.push_back(std::move(link));
  }
  return j.dump();
}

DiscreteChannelSet channel_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DiscreteChannelSet ch;
  ch.users = j.at("users").get<int>();
  ch.antennas = j.at("antennas").get<int>();
  ch.order = j.at("order").get<int>();
  ch.sampling_time = j.at("sampling_time").get<double>();
  ch.threshold = j.at("threshold").get<double>();
  ch.sample_offset = j.at("sample_offset").get<int>();
  for (const auto& link : j.at("taps")) {
    VectorXcd h(link.size());
    for (size_t p = 0; p < link.size(); ++p)
      h[Index(p)] = cplx(link[p][0].get<double>(), link[p][1].get<double>());
    if (h.size() != ch.order + 1) throw std::runtime_error("channel_from_json: tap length mismatch");
    ch.taps.push_back(std::move(h));
  }
  if (ch.taps.size() != size_t(ch.users) * ch.antennas)
    throw std::runtime_error("channel_from_json: link count mismatch");
  ch.split = make_delay_split(j.at("delta").get<int>(), j.at("block_len").get<int>(), ch.order);
  return ch;
}

}  // namespace ftnslp
