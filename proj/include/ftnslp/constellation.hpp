#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ftnslp/types.hpp"

namespace ftnslp {

enum class ConstellationKind { Psk, Qam };

/// QAM point classes by number of finite decision boundaries.
enum class QamClass { Inner, Edge, Corner };

/// Unit-average-energy constellation with ML detection and constructive
/// interference region construction. PSK points sit at phases (2k+1) pi / order.
class Constellation {
 public:
  static Constellation qpsk();
  static Constellation psk8();
  static Constellation qam16();
  static Constellation from_name(std::string_view name);

  const std::string& name() const { return name_; }
  ConstellationKind kind() const { return kind_; }
  int order() const { return int(points_.size()); }
  int bits_per_symbol() const { return bits_; }
  const VectorXcd& points() const { return points_vec_; }
  cplx point(int index) const { return points_[size_t(index)]; }
  QamClass qam_class(int index) const;

  /// Nearest constellation point in Euclidean distance; ties break to the
  /// lowest index.
  int detect(cplx y) const;

  /// Index of a constellation point given its value (1e-9 tolerance).
  int index_of(cplx symbol) const;

 private:
  Constellation(std::string name, ConstellationKind kind, int bits, std::vector<cplx> points);

  std::string name_;
  ConstellationKind kind_;
  int bits_;
  std::vector<cplx> points_;
  VectorXcd points_vec_;
};

/// Half-plane Re(conj(normal) y) >= bound in the received-signal plane.
struct Halfplane {
  cplx normal;
  double bound = 0.0;
};

/// Convex constructive-interference region anchored at q * s: any point inside
/// is detected as s with at least the nominal noise margin.
struct CiRegion {
  cplx symbol;
  std::vector<Halfplane> halfplanes;
};

CiRegion ci_region(const Constellation& c, int symbol_index, double qos);

/// Half-plane constraints for a whole received vector; entry i of the result
/// references component `entry` of y.
struct IndexedHalfplane {
  Index entry = 0;
  cplx normal;
  double bound = 0.0;
};

std::vector<IndexedHalfplane> ci_constraints(const VectorXcd& symbols, const VectorXd& qos,
                                             const Constellation& c);

}  // namespace ftnslp
