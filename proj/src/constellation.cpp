#include "ftnslp/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace ftnslp {

Constellation::Constellation(std::string name, ConstellationKind kind, int bits,
                             std::vector<cplx> points)
    : name_(std::move(name)), kind_(kind), bits_(bits), points_(std::move(points)) {
  points_vec_.resize(Index(points_.size()));
  for (size_t i = 0; i < points_.size(); ++i) points_vec_[Index(i)] = points_[i];
}

Constellation Constellation::qpsk() {
  std::vector<cplx> pts;
  for (int k = 0; k < 4; ++k) pts.push_back(std::exp(kJ * ((2.0 * k + 1.0) * kPi / 4.0)));
  return Constellation("qpsk", ConstellationKind::Psk, 2, std::move(pts));
}

Constellation Constellation::psk8() {
  std::vector<cplx> pts;
  for (int k = 0; k < 8; ++k) pts.push_back(std::exp(kJ * ((2.0 * k + 1.0) * kPi / 8.0)));
  return Constellation("8psk", ConstellationKind::Psk, 3, std::move(pts));
}

Constellation Constellation::qam16() {
  std::vector<cplx> pts;
  const double scale = 1.0 / std::sqrt(10.0);
  for (double re : {-3.0, -1.0, 1.0, 3.0})
    for (double im : {-3.0, -1.0, 1.0, 3.0}) pts.push_back(scale * cplx(re, im));
  return Constellation("16qam", ConstellationKind::Qam, 4, std::move(pts));
}

Constellation Constellation::from_name(std::string_view name) {
  if (name == "qpsk") return qpsk();
  if (name == "8psk") return psk8();
  if (name == "16qam") return qam16();
  throw std::invalid_argument("unknown constellation: " + std::string(name));
}

QamClass Constellation::qam_class(int index) const {
  if (kind_ != ConstellationKind::Qam) throw std::logic_error("qam_class: PSK constellation");
  const cplx p = point(index);
  const double m = points_vec_.cwiseAbs().maxCoeff() / std::sqrt(2.0);  // outermost coordinate
  const bool re_ext = std::abs(std::abs(p.real()) - m) < 1e-12;
  const bool im_ext = std::abs(std::abs(p.imag()) - m) < 1e-12;
  if (re_ext && im_ext) return QamClass::Corner;
  if (re_ext || im_ext) return QamClass::Edge;
  return QamClass::Inner;
}

int Constellation::detect(cplx y) const {
  int best = 0;
  double best_d = std::norm(y - points_[0]);
  for (size_t i = 1; i < points_.size(); ++i) {
    const double d = std::norm(y - points_[i]);
    // strict improvement with a relative margin keeps ties at the lowest index
    if (d < best_d - 1e-15 * (1.0 + best_d)) {
      best_d = d;
      best = int(i);
    }
  }
  return best;
}

int Constellation::index_of(cplx symbol) const {
  for (size_t i = 0; i < points_.size(); ++i)
    if (std::abs(symbol - points_[i]) < 1e-9) return int(i);
  throw std::invalid_argument("symbol not in constellation " + name_);
}

CiRegion ci_region(const Constellation& c, int symbol_index, double qos) {
  if (symbol_index < 0 || symbol_index >= c.order())
    throw std::invalid_argument("ci_region: symbol index out of range");
  if (qos <= 0.0) throw std::invalid_argument("ci_region: qos must be positive");
  const cplx s = c.point(symbol_index);
  CiRegion region;
  region.symbol = s;

  if (c.kind() == ConstellationKind::Psk) {
    // Cone with apex q s bounded by lines parallel to the decision sector
    // edges: Re(e^{-j(phi +/- (pi/2 - theta))} y) >= q sin(theta).
    const double phi = std::arg(s);
    const double theta = kPi / c.order();
    for (double sign : {+1.0, -1.0}) {
      Halfplane hp;
      hp.normal = std::exp(kJ * (phi + sign * (kPi / 2.0 - theta)));
      hp.bound = qos * std::sin(theta);
      region.halfplanes.push_back(hp);
    }
    return region;
  }

  // QAM: outward-extreme coordinates relax, interior coordinates pin.
  const double re = s.real(), im = s.imag();
  const double m = c.points().cwiseAbs().maxCoeff() / std::sqrt(2.0);
  const bool re_ext = std::abs(std::abs(re) - m) < 1e-12;
  const bool im_ext = std::abs(std::abs(im) - m) < 1e-12;
  const double sr = re >= 0.0 ? 1.0 : -1.0;
  const double si = im >= 0.0 ? 1.0 : -1.0;
  if (re_ext) {
    region.halfplanes.push_back({cplx(sr, 0.0), qos * std::abs(re)});
  } else {
    region.halfplanes.push_back({cplx(1.0, 0.0), qos * re});
    region.halfplanes.push_back({cplx(-1.0, 0.0), -qos * re});
  }
  if (im_ext) {
    region.halfplanes.push_back({cplx(0.0, si), qos * std::abs(im)});
  } else {
    region.halfplanes.push_back({cplx(0.0, 1.0), qos * im});
    region.halfplanes.push_back({cplx(0.0, -1.0), -qos * im});
  }
  return region;
}

std::vector<IndexedHalfplane> ci_constraints(const VectorXcd& symbols, const VectorXd& qos,
                                             const Constellation& c) {
  if (symbols.size() != qos.size()) throw std::invalid_argument("ci_constraints: dimension mismatch");
  std::vector<IndexedHalfplane> rows;
  rows.reserve(size_t(4 * symbols.size()));
  for (Index i = 0; i < symbols.size(); ++i) {
    const int idx = c.index_of(symbols[i]);
    const CiRegion region = ci_region(c, idx, qos[i]);
    for (const auto& hp : region.halfplanes) rows.push_back({i, hp.normal, hp.bound});
  }
  return rows;
}

}  // namespace ftnslp
