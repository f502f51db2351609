#include <doctest.h>

#include <algorithm>
#include <random>

#include "ftnslp/multicarrier.hpp"
#include "ftnslp/theory.hpp"
#include "support/oracles.hpp"

using namespace ftnslp;
using oracles::Rational;

TEST_SUITE_BEGIN("theory");

namespace {

// Independent scan of the interference predicates with dense taps: which
// block offsets admit at least one in-window tap index.
struct ScanResult {
  std::vector<int> forward, backward;
};

ScanResult scan_nonzero(int nu, int p, int delta) {
  ScanResult out;
  for (int b = 1; b <= nu / p + 3; ++b) {
    bool any_f = false, any_b = false;
    for (int pr = 0; pr < p && !(any_f && any_b); ++pr)
      for (int pc = 0; pc < p; ++pc) {
        const int kf = b * p + pr - pc + delta;
        const int kb = -b * p + pr - pc + delta;
        if (kf >= 0 && kf <= nu) any_f = true;
        if (kb >= 0 && kb <= nu) any_b = true;
      }
    if (any_f) out.forward.push_back(b);
    if (any_b) out.backward.push_back(b);
  }
  return out;
}

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](int v) { return std::find(b.begin(), b.end(), v) != b.end(); });
}

Rational se0_exact(int m, int r, const Rational& alpha, const Rational& beta, int bits,
                   const Rational& rho) {
  const Rational xi_r = (Rational(m - 1) * beta + Rational(1)) / Rational(m);
  return Rational(m) / Rational(m + r) / (alpha * xi_r) * Rational(bits) /
         ((Rational(1) + rho) * Rational(2));
}

}  // namespace

TEST_CASE("delay split decomposition") {
  const auto s = make_delay_split(11, 4, 20);
  CHECK(s.quotient == 2);
  CHECK(s.remainder == 3);
  CHECK(s.quotient * 4 + s.remainder == 11);
  CHECK_THROWS(make_delay_split(20, 4, 20));  // delta must stay below the order
  CHECK_NOTHROW(make_delay_split(0, 4, 0));   // memoryless channel
  CHECK_THROWS(make_delay_split(-1, 4, 8));
}

TEST_CASE("error-free spectral efficiency examples") {
  CHECK(se0(64, 0, 1.0, 1.0, 4, 1.0, 0.25) == doctest::Approx(1.6).epsilon(1e-14));
  // decreasing in alpha once the redundancy is rescaled
  const int r_ref = 6;
  const double a1 = 0.8, a2 = 1.0;
  const double v1 = se0(64, redundancy_scaling(r_ref, 1.0, a1), a1, 1.0, 4, 1.0, 0.25);
  const double v2 = se0(64, r_ref, a2, 1.0, 4, 1.0, 0.25);
  CHECK(v1 > v2);
  // decreasing in beta at constant redundancy
  CHECK(se0(64, 4, 1.0, 0.8, 4, 1.0, 0.25) > se0(64, 4, 1.0, 1.0, 4, 1.0, 0.25));
}

TEST_CASE("redundancy scaling") {
  CHECK(redundancy_scaling(4, 1.0, 0.5) == 8);
  CHECK(redundancy_scaling(5, 1.0, 0.8) == 6);
  CHECK(redundancy_scaling(0, 0.3, 0.9) == 0);
  CHECK(redundancy_scaling(7, 0.9, 0.9) == 7);
}

TEST_CASE("alpha_min closed form") {
  CHECK(alpha_min(32, 0.80, 0.25) == doctest::Approx(0.99224806).epsilon(1e-7));
  CHECK(alpha_min(32, 0.90, 0.25) == doctest::Approx(0.88581315).epsilon(1e-7));
  CHECK(alpha_min(16, 1.0, 0.25) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(alpha_min(1024, 1.0, 0.25) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("lossless check across the alpha_min boundary") {
  // The transition sharpness is set by the truncation span; 48 periods keep
  // the flip inside a +/- 2% window of alpha_min.
  const auto pulse = make_srrc(1.0, 0.25, 48);
  const double amin = alpha_min(16, 1.0, 0.25);  // T_beta = 1, so Ts = alpha
  const auto above = lossless_check(pulse, 1.02 * amin, 10000);
  CHECK(above.lossless);
  CHECK(above.margin > 1e-6);
  const auto far_below = lossless_check(pulse, 0.5 * amin, 10000);
  CHECK_FALSE(far_below.lossless);
  CHECK(far_below.margin < 1e-6);
  const auto below = lossless_check(pulse, 0.98 * amin, 10000);
  CHECK_FALSE(below.lossless);
}

TEST_CASE("lossless check: ideal sinc at Nyquist sampling") {
  const auto sinc = make_sinc(1.0, 16);
  const auto rep = lossless_check(sinc, 1.0, 2048);
  CHECK(rep.lossless);
  CHECK(rep.margin > 0.1);  // flat folded spectrum up to truncation ripple
}

TEST_CASE("ibi index sets: worked examples") {
  {
    const auto s = make_delay_split(2, 4, 5);
    const auto sets = ibi_index_sets(5, 4, s);
    CHECK(sets.total_blocks == 4);
    CHECK(sets.forward == std::vector<int>{1, 2});
    CHECK(sets.backward == std::vector<int>{1});
    CHECK(sets.max_affecting == 3);  // rho_delta = 2 outside {1..rho_nu = 0}
    const auto scan = scan_nonzero(5, 4, 2);
    CHECK(scan.forward == std::vector<int>{1});  // f[2] vanishes
    CHECK(scan.backward == std::vector<int>{1});
    CHECK(subset(scan.forward, sets.forward));
    CHECK(subset(scan.backward, sets.backward));
  }
  {
    const auto s = make_delay_split(10, 20, 24);
    const auto sets = ibi_index_sets(24, 20, s);
    CHECK(sets.total_blocks == 4);
    CHECK(sets.forward == std::vector<int>{1, 2});
    CHECK(sets.backward == std::vector<int>{1});
    CHECK(sets.max_affecting == 3);  // rho_nu = 3 < rho_delta = 10
    const auto scan = scan_nonzero(24, 20, 10);
    CHECK(scan.forward == std::vector<int>{1});
    CHECK(subset(scan.forward, sets.forward));
  }
  {
    const auto s = make_delay_split(1, 8, 3);
    const auto sets = ibi_index_sets(3, 8, s);
    CHECK(sets.total_blocks == 3);
    CHECK(sets.forward == std::vector<int>{1});
    CHECK(sets.backward == std::vector<int>{1});
  }
  CHECK_THROWS(ibi_index_sets(5, 8, make_delay_split(2, 4, 5)));  // block-length mismatch
}

TEST_CASE("ibi oracle containment on a small exhaustive range") {
  for (int p = 1; p <= 8; ++p)
    for (int nu = p + 1; nu <= 20; ++nu)
      for (int delta = 0; delta < nu; ++delta) {
        const auto split = make_delay_split(delta, p, nu);
        const auto sets = ibi_index_sets(nu, p, split);
        const auto scan = scan_nonzero(nu, p, delta);
        REQUIRE(subset(scan.forward, sets.forward));
        REQUIRE(subset(scan.backward, sets.backward));
        const int count = 1 + int(scan.forward.size()) + int(scan.backward.size());
        REQUIRE(count == sets.max_affecting);  // dense taps attain the bound
      }
}

TEST_CASE("minimum redundancy") {
  CHECK(min_redundancy(make_delay_split(0, 4, 1)) == 0);
  CHECK(min_redundancy(make_delay_split(10, 16, 20)) == 5);
  CHECK(min_redundancy(make_delay_split(11, 16, 20)) == 6);
}

TEST_CASE("efficiency") {
  CHECK(efficiency_check(16, 5));
  CHECK_FALSE(efficiency_check(4, 4));  // exactly 50% does not count
  // Half-delay redundancy for a delay beyond the data length is never efficient.
  CHECK_FALSE(efficiency_check(16, min_redundancy(make_delay_split(40, 60, 50))));
  // Backward-IBI-free plus efficient forces P > delta.
  for (int delta = 0; delta <= 30; ++delta)
    for (int m = 1; m <= 20; ++m) {
      const int r = (delta + 1) / 2;
      if (efficiency_check(m, r)) CHECK(m + r > delta);
    }
}

TEST_CASE("SE0 monotonicity in exact arithmetic (sampled)") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> m_pick(1, 256);
  std::uniform_int_distribution<int> r_pick(0, 24);
  std::uniform_int_distribution<long long> den(2, 40);
  const Rational rho(1, 4);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = m_pick(rng);
    const int r_ref = r_pick(rng);
    const long long bd = den(rng);
    const long long bn = std::uniform_int_distribution<long long>(1, bd)(rng);
    const Rational beta(bn, bd);
    // alpha < alpha_prime, both in (0, 1]
    long long ad = den(rng);
    long long an1 = std::uniform_int_distribution<long long>(1, ad - 1)(rng);
    long long an2 = std::uniform_int_distribution<long long>(an1 + 1, ad)(rng);
    const Rational alpha(an1, ad), alpha_p(an2, ad);

    // floor((alpha'/alpha) r_ref) in exact arithmetic
    const Rational ratio = alpha_p / alpha * Rational(r_ref);
    const long long r_scaled = ratio.floor_div();
    const Rational lhs = se0_exact(m, int(r_scaled), alpha, beta, 2, rho);
    const Rational rhs = se0_exact(m, r_ref, alpha_p, beta, 2, rho);
    REQUIRE(lhs > rhs);

    // relative gain bound from the proof of the alpha-monotonicity result
    const Rational gain = (lhs - rhs) / rhs;
    const Rational bound = (Rational(1) - alpha / alpha_p) * Rational(m) / Rational(m + r_ref);
    REQUIRE(gain >= bound);

    // beta-monotonicity at fixed redundancy
    if (m > 1 && !(beta == Rational(1))) {
      const Rational lhs_b = se0_exact(m, r_ref, alpha, beta, 2, rho);
      const Rational rhs_b = se0_exact(m, r_ref, alpha, Rational(1), 2, rho);
      REQUIRE(lhs_b > rhs_b);
    }

    // double path agrees with the exact path
    const double lhs_d = se0(m, int(r_scaled), alpha.value(), beta.value(), 2, 1.0, 0.25);
    REQUIRE(lhs_d == doctest::Approx(lhs.value()).epsilon(1e-12));
    REQUIRE(redundancy_scaling(r_ref, alpha_p.value(), alpha.value()) == r_scaled);
  }
}

TEST_SUITE_END();
