#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "aflx/ht.hpp"
#include "doctest.h"

using namespace aflx;

namespace {

const HtPair& pair09_02() {
  static HtPair p(Distribution(Vec{0.1, 0.9}), Distribution(Vec{0.8, 0.2}));
  return p;
}

}  // namespace

TEST_CASE("pair construction and divergences") {
  const HtPair& pair = pair09_02();
  CHECK(pair.llr[0] == -3.0);
  CHECK(pair.llr[1] == doctest::Approx(std::log2(4.5)).epsilon(1e-14));
  CHECK(pair.d12 == doctest::Approx(1.652932501298).epsilon(1e-9));
  CHECK(pair.d21 == doctest::Approx(1.966014999712).epsilon(1e-9));
  CHECK_THROWS_AS(HtPair(Distribution(Vec{0.5, 0.5}), Distribution::uniform(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(HtPair(Distribution(Vec{1.0, 0.0}), Distribution(Vec{0.0, 1.0})),
                  UnsupportedChannelError);
  CHECK_THROWS_AS(HtPair(Distribution(Vec{0.5, 0.5, 0.0}),
                         Distribution(Vec{0.0, 0.5, 0.5})),
                  UnsupportedChannelError);
}

TEST_CASE("tilt path endpoints and monotonicity") {
  const HtPair& pair = pair09_02();
  CHECK(ht_d1(pair, 0.0) == 0.0);
  CHECK(ht_d1(pair, 1.0) == pair.d21);
  CHECK(ht_d2(pair, 0.0) == pair.d12);
  CHECK(ht_d2(pair, 1.0) == 0.0);
  double prev1 = -1.0, prev2 = pair.d12 + 1.0;
  for (int i = 0; i <= 20; ++i) {
    double lam = i / 20.0;
    double v1 = ht_d1(pair, lam);
    double v2 = ht_d2(pair, lam);
    CHECK(v1 >= prev1 - 1e-12);
    CHECK(v2 <= prev2 + 1e-12);
    prev1 = v1;
    prev2 = v2;
  }
}

TEST_CASE("balanced point") {
  const HtPair& pair = pair09_02();
  ChernoffResult ch = chernoff_exponent(pair);
  CHECK(ch.exponent == doctest::Approx(0.501162870745).epsilon(1e-9));
  CHECK(ch.lambda == doctest::Approx(0.522755684077).epsilon(1e-7));
  CHECK(std::fabs(ht_d1(pair, ch.lambda) - ht_d2(pair, ch.lambda)) <= 1e-10);
  // Closed form for the balanced tilt mass on symbol 1.
  double q1 = 3.0 / (3.0 + std::log2(4.5));
  CHECK(std::fabs(ht_tilted(pair, ch.lambda)[1] - q1) <= 1e-10);

  HtPair same(Distribution(Vec{0.5, 0.5}), Distribution(Vec{0.5, 0.5}));
  ChernoffResult flat = chernoff_exponent(same);
  CHECK(flat.exponent == 0.0);
  CHECK(flat.lambda == 0.5);
  CHECK(std::isinf(k_star_ht(same)));
}

TEST_CASE("continuation exponent pairs") {
  const HtPair& pair = pair09_02();
  struct Row {
    double gamma, l1, l2, e1, e2;
  };
  const Row rows[] = {
      {0.1, 0.772925545, 0.272533334, 1.235495962, 1.092052999},
      {0.2, 0.689036154, 0.361430811, 0.964376821, 0.877711845},
      {0.3, 0.625587533, 0.425251185, 0.772647024, 0.723773295},
  };
  for (const Row& r : rows) {
    GammaExponents ge = gamma_exponents(pair, r.gamma);
    CHECK(std::fabs(ge.lambda1 - r.l1) <= 1e-8);
    CHECK(std::fabs(ge.lambda2 - r.l2) <= 1e-8);
    CHECK(std::fabs(ge.e1 - r.e1) <= 1e-8);
    CHECK(std::fabs(ge.e2 - r.e2) <= 1e-8);
    // The continuation budget binds at both tilts.
    CHECK(std::fabs(ht_d2(pair, ge.lambda1) - r.gamma) <= 1e-9);
    CHECK(std::fabs(ht_d1(pair, ge.lambda2) - r.gamma) <= 1e-9);
  }

  GammaExponents g0 = gamma_exponents(pair, 0.0);
  CHECK(g0.lambda1 == 1.0);
  CHECK(g0.lambda2 == 0.0);
  CHECK(g0.e1 == pair.d21);
  CHECK(g0.e2 == pair.d12);

  ChernoffResult ch = chernoff_exponent(pair);
  GammaExponents gc = gamma_exponents(pair, ch.exponent);
  CHECK(gc.e1 == doctest::Approx(ch.exponent).epsilon(1e-8));
  CHECK(gc.e2 == doctest::Approx(ch.exponent).epsilon(1e-8));
  CHECK(gc.lambda1 == doctest::Approx(ch.lambda).epsilon(1e-6));
  CHECK(gc.lambda2 == doctest::Approx(ch.lambda).epsilon(1e-6));

  // Budget between the two one-sided divergences: only one side survives.
  GammaExponents mid = gamma_exponents(pair, 1.8);
  CHECK(mid.lambda1 == 0.0);
  CHECK(mid.e1 == 0.0);
  CHECK(mid.e2 > 0.0);
  // Budget beyond both: everything degenerates.
  GammaExponents big = gamma_exponents(pair, 2.0);
  CHECK(big.lambda1 == 0.0);
  CHECK(big.lambda2 == 1.0);
  CHECK(big.e1 == 0.0);
  CHECK(big.e2 == 0.0);
  CHECK_THROWS_AS(gamma_exponents(pair, -0.01), std::invalid_argument);

  double p1 = 1e9, p2 = 1e9;
  for (double g : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}) {
    GammaExponents ge = gamma_exponents(pair, g);
    CHECK(ge.e1 <= p1 + 1e-12);
    CHECK(ge.e2 <= p2 + 1e-12);
    p1 = ge.e1;
    p2 = ge.e2;
  }
}

TEST_CASE("block-count scale of the pair") {
  const HtPair& pair = pair09_02();
  CHECK(k_star_ht(pair) == doctest::Approx(3.922906333401).epsilon(1e-6));
  CHECK(std::ceil(k_star_ht(pair)) == 4.0);
}

TEST_CASE("fixed-length tradeoff values") {
  const HtPair& pair = pair09_02();
  CHECK(fl_boundary_at(pair, 0.0) == pair.d12);
  CHECK(fl_boundary_at(pair, -0.5) == pair.d12);
  CHECK(fl_boundary_at(pair, pair.d21) == 0.0);
  CHECK(fl_boundary_at(pair, 5.0) == 0.0);
  CHECK(fl_boundary_at(pair, 0.449022500) ==
        doctest::Approx(0.550977500).epsilon(1e-7));
  CHECK(fl_boundary_at(pair, 1.0) == doctest::Approx(0.184343610).epsilon(1e-7));
  double prev = pair.d12 + 1.0;
  for (int i = 0; i <= 40; ++i) {
    double e1 = pair.d21 * i / 40.0;
    double v = fl_boundary_at(pair, e1);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  // Convexity along the curve.
  for (double a : {0.1, 0.5, 1.0, 1.4}) {
    double b = a + 0.4;
    double chord = 0.5 * (fl_boundary_at(pair, a) + fl_boundary_at(pair, b));
    CHECK(fl_boundary_at(pair, 0.5 * (a + b)) <= chord + 1e-9);
  }
}

TEST_CASE("fixed-length region sampling") {
  const HtPair& pair = pair09_02();
  ExponentRegion fl = fl_region_boundary(pair, 256);
  CHECK(fl.name == "fl");
  CHECK(fl.boundary.size() == 256);
  CHECK(fl.boundary.front().first == 0.0);
  CHECK(fl.boundary.front().second == pair.d12);
  CHECK(fl.boundary.back().first == pair.d21);
  CHECK(fl.boundary.back().second == 0.0);
  double pe1 = -1.0, pe2 = pair.d12 + 1.0;
  for (const auto& pt : fl.boundary) {
    CHECK(pt.first > pe1);
    CHECK(pt.second <= pe2 + 1e-15);
    CHECK(std::fabs(fl_boundary_at(pair, pt.first) - pt.second) <= 1e-10);
    pe1 = pt.first;
    pe2 = pt.second;
  }
  CHECK_THROWS_AS(fl_region_boundary(pair, 1), std::invalid_argument);
}

TEST_CASE("sequential region rectangle") {
  const HtPair& pair = pair09_02();
  ExponentRegion seq = seq_region(pair);
  CHECK(seq.name == "seq");
  REQUIRE(seq.boundary.size() == 2);
  CHECK(seq.boundary[0] == std::make_pair(0.0, pair.d12));
  CHECK(seq.boundary[1] == std::make_pair(pair.d21, pair.d12));
  CHECK(region_contains(seq, pair.d21 - 1e-9, pair.d12 - 1e-9));
  CHECK_FALSE(region_contains(seq, pair.d21 + 0.1, 0.05));
  CHECK(region_contains(seq, pair.d21 + 0.1, 0.0));
}

TEST_CASE("region nesting across budgets and block counts") {
  const HtPair& pair = pair09_02();
  for (double gamma : {0.0, 0.1, 0.3, 0.55}) {
    ExponentRegion rej = rejection_region(pair, gamma, 512);
    for (double k : {1.5, 2.0, 4.0}) {
      ExponentRegion afl = afl_region(pair, gamma, k, 512);
      REQUIRE(afl.boundary.size() == rej.boundary.size());
      double pe1 = -1.0, pe2 = 1e9;
      for (std::size_t i = 0; i < afl.boundary.size(); ++i) {
        double x = afl.boundary[i].first;
        double y = afl.boundary[i].second;
        CHECK(x == rej.boundary[i].first);
        CHECK(y <= rej.boundary[i].second + 1e-15);
        CHECK(y >= fl_boundary_at(pair, x) - 1e-12);
        CHECK(y <= k * fl_boundary_at(pair, x / k) + 1e-12);
        CHECK(x > pe1);
        CHECK(y <= pe2 + 1e-15);
        pe1 = x;
        pe2 = y;
      }
      // k above the pair scale: the budget factor never binds.
      if (k == 4.0) {
        for (std::size_t i = 0; i < afl.boundary.size(); ++i)
          CHECK(afl.boundary[i] == rej.boundary[i]);
      }
    }
  }
}

TEST_CASE("region composition extremes") {
  const HtPair& pair = pair09_02();
  // Zero budget with a large block count: the full rectangle.
  ExponentRegion box = afl_region(pair, 0.0, 4.0, 512);
  for (const auto& pt : box.boundary)
    CHECK(pt.second == doctest::Approx(pair.d12).epsilon(1e-12));
  CHECK(region_boundary_at(box, 0.7 * pair.d21) ==
        doctest::Approx(pair.d12).epsilon(1e-12));

  // Zero budget with k = 2: the budget factor clips hard at the far end.
  ExponentRegion two = afl_region(pair, 0.0, 2.0, 512);
  double clip_last = 2.0 * fl_boundary_at(pair, pair.d21 / 2.0);
  CHECK(two.boundary.back().second == doctest::Approx(clip_last).epsilon(1e-9));
  CHECK(two.boundary.back().second < box.boundary.back().second - 0.5);

  // Budget above the balanced exponent: the rectangle sinks under the curve.
  ExponentRegion tall = afl_region(pair, 0.55, 4.0, 512);
  for (const auto& pt : tall.boundary)
    CHECK(std::fabs(pt.second - fl_boundary_at(pair, pt.first)) <= 1e-10);

  // k = 1 reduces to the fixed-length curve at any budget.
  ExponentRegion one = afl_region(pair, 0.1, 1.0, 512);
  for (const auto& pt : one.boundary)
    CHECK(std::fabs(pt.second - fl_boundary_at(pair, pt.first)) <= 1e-10);

  CHECK_THROWS_AS(afl_region(pair, 0.1, 0.9, 512), std::invalid_argument);
  CHECK_THROWS_AS(afl_region(pair, -0.1, 2.0, 512), std::invalid_argument);
  CHECK_THROWS_AS(afl_region(pair, 0.1, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(rejection_region(pair, -0.1, 512), std::invalid_argument);

  // Budgets only shrink the rejection region.
  ExponentRegion prev = rejection_region(pair, 0.0, 512);
  for (double gamma : {0.1, 0.3, 0.55}) {
    ExponentRegion cur = rejection_region(pair, gamma, 512);
    for (int i = 0; i <= 20; ++i) {
      double x = pair.d21 * static_cast<double>(25 * i) / 511.0;
      CHECK(region_boundary_at(cur, x) <= region_boundary_at(prev, x) + 1e-12);
    }
    prev = cur;
  }

  // The budget corner itself is achievable.
  GammaExponents ge = gamma_exponents(pair, 0.2);
  ExponentRegion rej = rejection_region(pair, 0.2, 512);
  CHECK(region_boundary_at(rej, ge.e1) >= ge.e2 - 1e-12);
  CHECK(region_contains(rej, ge.e1 - 1e-9, ge.e2 - 1e-9));
}

TEST_CASE("membership sweep against the direct composition") {
  const HtPair& pair = pair09_02();
  const double gamma = 0.2;
  GammaExponents ge = gamma_exponents(pair, gamma);
  ExponentRegion rej = rejection_region(pair, gamma, 1024);
  ExponentRegion afl = afl_region(pair, gamma, 2.0, 1024);
  auto rej_cap = [&](double e1) {
    double b = fl_boundary_at(pair, e1);
    if (e1 <= ge.e1) b = std::max(b, ge.e2);
    return b;
  };
  int compared = 0;
  for (int i = 0; i <= 40; ++i) {
    double e1 = 1.1 * pair.d21 * i / 40.0;
    for (int j = 0; j <= 40; ++j) {
      double e2 = 1.1 * pair.d12 * j / 40.0;
      if (std::fabs(e1 - ge.e1) < 2e-3) continue;
      if (std::fabs(e1 - pair.d21) < 2e-3) continue;
      bool want_rej, want_afl;
      if (e1 > pair.d21) {
        want_rej = e2 <= 0.0;
        want_afl = e2 <= 0.0;
      } else {
        double cap = rej_cap(e1);
        double clip = 2.0 * fl_boundary_at(pair, e1 / 2.0);
        if (std::fabs(e2 - cap) < 2e-3) continue;
        if (std::fabs(e2 - clip) < 2e-3) continue;
        want_rej = e2 <= cap;
        want_afl = e2 <= std::min(cap, clip);
      }
      CHECK(region_contains(rej, e1, e2) == want_rej);
      CHECK(region_contains(afl, e1, e2) == want_afl);
      ++compared;
    }
  }
  CHECK(compared > 1200);
  CHECK_FALSE(region_contains(rej, -1e-9, 0.1));
  CHECK_FALSE(region_contains(rej, 0.1, -1e-9));
}

TEST_CASE("boundary interpolation lookups") {
  ExponentRegion r;
  r.name = "probe";
  r.boundary = {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.5}, {3.0, 0.0}};
  CHECK(region_boundary_at(r, -1.0) == 1.0);
  CHECK(region_boundary_at(r, 0.0) == 1.0);
  CHECK(region_boundary_at(r, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(region_boundary_at(r, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(region_boundary_at(r, 2.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(region_boundary_at(r, 3.0) == 0.0);
  CHECK(region_boundary_at(r, 3.1) == 0.0);
  ExponentRegion empty;
  CHECK(region_boundary_at(empty, 0.5) == 0.0);
  CHECK_FALSE(region_contains(empty, 0.0, 0.0));
}
