#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "aflx/dmc.hpp"
#include "aflx/rng.hpp"
#include "doctest.h"

using namespace aflx;

namespace {
double h2(double p) {
  return p * std::log2(1.0 / p) + (1.0 - p) * std::log2(1.0 / (1.0 - p));
}
}  // namespace

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({}), std::invalid_argument);
  Distribution b = Distribution::bernoulli(0.2);
  CHECK(b.size() == 2);
  CHECK(b[0] == 0.8);
  CHECK(b[1] == 0.2);
  Distribution u = Distribution::uniform(4);
  CHECK(u[2] == 0.25);
}

TEST_CASE("channel validation and constructors") {
  CHECK_THROWS_AS(Channel({{0.5, 0.5}}), std::invalid_argument);     // one row
  CHECK_THROWS_AS(Channel({{1.0}, {1.0}}), std::invalid_argument);   // one column
  CHECK_THROWS_AS(Channel({{0.5, 0.6}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Channel({{0.5, 0.5}, {0.5, 0.4, 0.1}}), std::invalid_argument);
  Channel bsc = Channel::bsc(0.2);
  CHECK(bsc.nx() == 2);
  CHECK(bsc.ny() == 2);
  CHECK(bsc.w(0, 0) == 0.8);
  CHECK(bsc.w(1, 0) == 0.2);
  Channel bec = Channel::bec(0.3);
  CHECK(bec.ny() == 3);
  CHECK(bec.w(0, 0) == 0.7);
  CHECK(bec.w(0, 1) == 0.3);
  CHECK(bec.w(0, 2) == 0.0);
  CHECK(bec.w(1, 2) == 0.7);
}

TEST_CASE("kl divergence values and conventions") {
  Vec p{0.9, 0.1}, q{0.2, 0.8};
  CHECK(kl_divergence(p, q) == doctest::Approx(1.652932501298).epsilon(1e-9));
  CHECK(kl_divergence(q, p) == doctest::Approx(1.966014999712).epsilon(1e-9));
  CHECK(kl_divergence(p, p) == 0.0);
  // A zero in p skips the term entirely.
  CHECK(kl_divergence({0.0, 1.0}, {0.5, 0.5}) == doctest::Approx(1.0));
  // Mass in p outside q's support diverges (sentinel, not an exception).
  CHECK(std::isinf(kl_divergence({0.5, 0.5}, {1.0, 0.0})));
}

TEST_CASE("tilted distribution endpoints and midpoint") {
  Distribution p = Distribution::bernoulli(0.9);
  Distribution q = Distribution::bernoulli(0.2);
  Distribution t0 = tilted_distribution(p, q, 0.0);
  CHECK(t0[0] == p[0]);
  CHECK(t0[1] == p[1]);
  Distribution t1 = tilted_distribution(p, q, 1.0);
  CHECK(t1[0] == q[0]);
  CHECK(t1[1] == q[1]);
  // Geometric midpoint of Ber(0.9) and Ber(0.2) is exactly Ber(0.6).
  Distribution tm = tilted_distribution(p, q, 0.5);
  CHECK(tm[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_THROWS_AS(tilted_distribution(p, q, 1.5), std::invalid_argument);
}

TEST_CASE("tilted path is monotone in both divergences") {
  std::mt19937_64 g = substream(11, 22, 33);
  for (int rep = 0; rep < 5; ++rep) {
    std::size_t n = 2 + rep % 3;
    Vec a(n), b(n);
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 0.05 + uniform01(g);
      b[i] = 0.05 + uniform01(g);
      sa += a[i];
      sb += b[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    Distribution p(a), q(b);
    double prev1 = -1.0, prev2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20; ++i) {
      double lam = i / 20.0;
      Distribution t = tilted_distribution(p, q, lam);
      double d1 = kl_divergence(t, p), d2 = kl_divergence(t, q);
      CHECK(d1 >= prev1 - 1e-12);
      CHECK(d2 <= prev2 + 1e-12);
      prev1 = d1;
      prev2 = d2;
    }
  }
}

TEST_CASE("tilting disjoint supports fails, partial overlap flagged") {
  Distribution p({1.0, 0.0});
  Distribution q({0.0, 1.0});
  CHECK_THROWS_AS(tilted_distribution(p, q, 0.5), UnsupportedChannelError);
  // One-sided zeros shrink the support but remain representable.
  Distribution a({0.0, 1.0});
  Distribution b({0.5, 0.5});
  TiltedPair tp = make_tilted_pair(a, b, 0.5);
  CHECK_FALSE(tp.shared_support);
  CHECK(tp.tilted[1] == 1.0);
}

TEST_CASE("capacity matches closed forms") {
  CHECK(capacity(Channel::bsc(0.2)) ==
        doctest::Approx(1.0 - h2(0.2)).epsilon(1e-10));
  CHECK(capacity(Channel::bsc(0.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(capacity(Channel::bsc(0.5)) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(capacity(Channel::bec(0.3)) == doctest::Approx(0.7).epsilon(1e-10));
  // All-identical rows carry nothing.
  CHECK(capacity(Channel({{0.5, 0.5}, {0.5, 0.5}})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Z-channel closed form: log2(1 + (1-s) s^(s/(1-s))) at s = 0.3.
  double s = 0.3;
  double closed = std::log2(1.0 + (1.0 - s) * std::pow(s, s / (1.0 - s)));
  CHECK(capacity(Channel({{1.0, 0.0}, {0.3, 0.7}})) ==
        doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("extremal input pair and its divergence") {
  C1Result r = c1_and_extremal_inputs(Channel::bsc(0.2));
  CHECK_FALSE(r.infinite);
  CHECK(r.value == doctest::Approx(1.2).epsilon(1e-12));
  // Symmetric tie resolves to the lexicographically first ordered pair.
  CHECK(r.x == 0);
  CHECK(r.x_prime == 1);

  C1Result weak = c1_and_extremal_inputs(Channel::bsc(0.45));
  double closed = 0.1 * std::log2(0.55 / 0.45);
  CHECK(weak.value == doctest::Approx(closed).epsilon(1e-12));

  // The Z-channel diverges in one direction only; the argmax is the ordered
  // pair whose divergence is infinite.
  C1Result z = c1_and_extremal_inputs(Channel({{1.0, 0.0}, {0.3, 0.7}}));
  CHECK(z.infinite);
  CHECK(z.x == 1);
  CHECK(z.x_prime == 0);
}

TEST_CASE("output-partition symmetry") {
  CHECK(is_symmetric(Channel::bsc(0.2)));
  CHECK(is_symmetric(Channel::bec(0.3)));
  CHECK_FALSE(is_symmetric(Channel({{1.0, 0.0}, {0.3, 0.7}})));
  CHECK_FALSE(is_symmetric(Channel({{0.7, 0.3}, {0.5, 0.5}})));
  // Classic partition-symmetric example: columns group into {0} and {1, 2}.
  double a = 1.0 / 3.0, b = 1.0 / 6.0, c = 1.0 / 2.0;
  CHECK(is_symmetric(Channel({{a, b, c}, {a, c, b}})));
}

TEST_CASE("cache key distinguishes matrices") {
  CHECK(Channel::bsc(0.2).cache_key() == Channel::bsc(0.2).cache_key());
  CHECK(Channel::bsc(0.2).cache_key() != Channel::bsc(0.3).cache_key());
  CHECK(Channel::bsc(0.2).cache_key() != Channel::bec(0.2).cache_key());
}
