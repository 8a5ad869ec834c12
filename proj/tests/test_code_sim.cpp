#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "aflx/code_sim.hpp"
#include "aflx/exponents.hpp"
#include "aflx/ht_sim.hpp"
#include "aflx/numerics.hpp"
#include "doctest.h"

using namespace aflx;

namespace {

const Channel& bsc02() {
  static Channel ch = Channel::bsc(0.2);
  return ch;
}

bool same_trial(const TrialResult& a, const TrialResult& b) {
  return a.error == b.error && a.retransmit == b.retransmit &&
         a.phase1_error == b.phase1_error && a.ack_given_wrong == b.ack_given_wrong &&
         a.nack_given_correct == b.nack_given_correct &&
         a.phase2_error == b.phase2_error && a.tau == b.tau;
}

void check_counter_identities(const CodeSimReport& rep, int ell, int k) {
  CHECK(rep.error_count == rep.ack_given_wrong_count + rep.phase2_error_count);
  CHECK(rep.phase2_error_count <= rep.retransmit_count);
  CHECK(rep.nack_given_correct_count <= rep.retransmit_count);
  CHECK(rep.ack_given_wrong_count <= rep.phase1_error_count);
  std::uint64_t uell = static_cast<std::uint64_t>(ell);
  std::uint64_t ukl = static_cast<std::uint64_t>(k) * uell;
  std::uint64_t retx = rep.retransmit_count;
  CHECK(rep.sum_tau == uell * (rep.trials - retx) + ukl * retx);
  CHECK(rep.sum_tau_sq == uell * uell * (rep.trials - retx) + ukl * ukl * retx);
  std::uint64_t mass = 0;
  for (const auto& [tau, cnt] : rep.tau_histogram) {
    CHECK((tau == ell || tau == static_cast<std::int64_t>(k) * ell));
    mass += cnt;
  }
  CHECK(mass == rep.trials);
  auto it = rep.tau_histogram.find(static_cast<std::int64_t>(k) * ell);
  CHECK((it == rep.tau_histogram.end() ? 0 : it->second) == retx);
}

}  // namespace

TEST_CASE("parameter selection") {
  double cap = er_cache(bsc02()).capacity_bits();
  SelectedParams free_budget = select_parameters(bsc02(), 0.05, 0.0);
  CHECK_FALSE(free_budget.degenerate);
  CHECK(free_budget.lambda == 0.0);
  CHECK(free_budget.alpha == doctest::Approx(0.05 / (0.99 * cap)).epsilon(1e-12));

  // Rate within 1% of capacity: the back-off would cross 1, use the midpoint.
  SelectedParams near_cap = select_parameters(bsc02(), 0.277, 0.0);
  CHECK_FALSE(near_cap.degenerate);
  CHECK(near_cap.alpha == doctest::Approx(0.5 * (1.0 + 0.277 / cap)).epsilon(1e-12));
  CHECK(near_cap.alpha < 1.0);

  // Budget at or above the one-shot exponent: plain fixed-length code.
  SelectedParams big = select_parameters(bsc02(), 0.1, 0.06);
  CHECK(big.degenerate);
  CHECK(big.alpha == 1.0);
  // Budget below the exponent but with an empty constraint window: same.
  SelectedParams empty = select_parameters(bsc02(), 0.1, 0.05);
  CHECK(empty.degenerate);
  CHECK(empty.alpha == 1.0);

  SelectedParams sel = select_parameters(bsc02(), 0.05, 0.05);
  CHECK_FALSE(sel.degenerate);
  CHECK(sel.alpha == doctest::Approx(0.657881).epsilon(2e-3));
  CHECK(sel.lambda == doctest::Approx(0.349).scale(1.0).epsilon(5e-3));
  AflfBound bound = aflf_lower_bound(bsc02(), 0.05, 0.05, 2);
  CHECK(sel.alpha == bound.alpha);
  CHECK(sel.lambda == bound.lambda);
  // The continuation budget binds at the selected tilt.
  Distribution row_a(bsc02().row(0)), row_n(bsc02().row(1));
  double d_fwd =
      kl_divergence(tilted_distribution(row_a, row_n, sel.lambda), row_a);
  CHECK((1.0 - sel.alpha) * d_fwd == doctest::Approx(0.05).epsilon(1e-6));

  CHECK_THROWS_AS(select_parameters(bsc02(), cap + 0.01, 0.0), std::domain_error);
  CHECK_THROWS_AS(select_parameters(bsc02(), 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(select_parameters(bsc02(), 0.05, -0.1), std::invalid_argument);
}

TEST_CASE("code configuration") {
  Distribution u = Distribution::uniform(2);
  CodeConfig a(bsc02(), 0.05, 20, 0.65, 0.35, 0.05, 2, u, 1ull);
  CHECK(a.message_count() == 2);
  CHECK(a.m1() == 13);
  CHECK(a.m2() == 7);
  CHECK(a.ack_input() == 0);
  CHECK(a.nack_input() == 1);
  CHECK(a.verify_llr()[0] == 2.0);
  CHECK(a.verify_llr()[1] == -2.0);

  CHECK(CodeConfig(bsc02(), 0.1, 20, 0.65, 0.35, 0.0, 2, u, 1ull).message_count() == 4);
  CHECK(CodeConfig(bsc02(), 0.3, 10, 0.65, 0.35, 0.0, 2, u, 1ull).message_count() == 8);
  // Bit count lands on an integer up to floating dust: no spurious round-up.
  CHECK(CodeConfig(bsc02(), 3.0 / 7.0, 7, 0.65, 0.35, 0.0, 2, u, 1ull).message_count() == 8);
  // At least two messages even at vanishing rate.
  CHECK(CodeConfig(bsc02(), 0.001, 2, 0.5, 0.0, 0.0, 2, u, 1ull).message_count() == 2);

  // Tilted verification thresholds between the extremal rows.
  CodeConfig lam0(bsc02(), 0.05, 20, 0.65, 0.0, 0.0, 2, u, 1ull);
  CHECK(lam0.verify_threshold() == doctest::Approx(1.2).epsilon(1e-12));
  CodeConfig lam1(bsc02(), 0.05, 20, 0.65, 1.0, 0.0, 2, u, 1ull);
  CHECK(lam1.verify_threshold() == doctest::Approx(-1.2).epsilon(1e-12));

  // Full-length phase one: no verification uses.
  CodeConfig flf(bsc02(), 0.1, 20, 1.0, 0.0, 0.0, 2, u, 1ull);
  CHECK(flf.m1() == 20);
  CHECK(flf.m2() == 0);

  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.1, 1, 0.6, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.1, 129, 0.6, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 2.0, 10, 0.6, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 10.0, 128, 0.6, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  // alpha so close to 1 that no verification use remains.
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.98, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.0, 0.0, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.6, 1.5, 0.0, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.6, 0.0, -0.1, 2, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.6, 0.0, 0.0, 1, u, 1ull),
                  std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(bsc02(), 0.05, 20, 0.6, 0.0, 0.0, 2,
                             Distribution::uniform(3), 1ull),
                  std::invalid_argument);

  // Disjoint extremal rows cannot carry an interior verification tilt.
  Channel ident({{1.0, 0.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(CodeConfig(ident, 0.3, 10, 0.6, 0.5, 0.0, 2,
                             Distribution::uniform(2), 1ull),
                  UnsupportedChannelError);
  // With alpha = 1 there is no verification phase to configure.
  CodeConfig ident_flf(ident, 0.3, 10, 1.0, 0.0, 0.0, 2, Distribution::uniform(2), 1ull);
  CHECK(ident_flf.m2() == 0);
}

TEST_CASE("trial determinism and stream separation") {
  Distribution u = Distribution::uniform(2);
  CodeConfig cfg(bsc02(), 0.05, 30, 0.65, 0.35, 0.05, 2, u, 20240816ull);
  for (std::uint64_t t : {0ull, 1ull, 17ull, 999ull}) {
    TrialResult first = run_code_trial(cfg, t);
    TrialResult second = run_code_trial(cfg, t);
    CHECK(same_trial(first, second));
    CHECK((first.tau == 30 || first.tau == 60));
    CHECK(first.error == (first.ack_given_wrong || first.phase2_error));
    CHECK(first.retransmit == (first.tau == 60));
  }
  bool any_diff = false;
  TrialResult base = run_code_trial(cfg, 0);
  for (std::uint64_t t = 1; t < 64 && !any_diff; ++t)
    any_diff = !same_trial(base, run_code_trial(cfg, t));
  CHECK(any_diff);
}

TEST_CASE("aggregation matches a manual loop and ignores thread count") {
  Distribution u = Distribution::uniform(2);
  CodeConfig cfg(bsc02(), 0.1, 20, 0.65, 0.35, 0.02, 2, u, 99ull);
  const std::uint64_t trials = 2000;
  std::uint64_t err = 0, retx = 0, p1e = 0, agw = 0, ngc = 0, p2e = 0, stau = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    TrialResult r = run_code_trial(cfg, t);
    err += r.error;
    retx += r.retransmit;
    p1e += r.phase1_error;
    agw += r.ack_given_wrong;
    ngc += r.nack_given_correct;
    p2e += r.phase2_error;
    stau += static_cast<std::uint64_t>(r.tau);
  }
  CodeSimReport rep = monte_carlo_code(cfg, trials);
  CHECK(rep.trials == trials);
  CHECK(rep.error_count == err);
  CHECK(rep.retransmit_count == retx);
  CHECK(rep.phase1_error_count == p1e);
  CHECK(rep.ack_given_wrong_count == agw);
  CHECK(rep.nack_given_correct_count == ngc);
  CHECK(rep.phase2_error_count == p2e);
  CHECK(rep.sum_tau == stau);
  check_counter_identities(rep, 20, 2);

  setenv("AFLX_THREADS", "4", 1);
  CodeSimReport threaded = monte_carlo_code(cfg, trials);
  unsetenv("AFLX_THREADS");
  CHECK(threaded.error_count == rep.error_count);
  CHECK(threaded.retransmit_count == rep.retransmit_count);
  CHECK(threaded.sum_tau == rep.sum_tau);
  CHECK(threaded.sum_tau_sq == rep.sum_tau_sq);
  CHECK(threaded.tau_histogram == rep.tau_histogram);
}

TEST_CASE("counter identities at k = 3 and the plain-code path") {
  Distribution u = Distribution::uniform(2);
  CodeConfig three(bsc02(), 0.05, 30, 0.65, 0.35, 0.05, 3, u, 5ull);
  CodeSimReport rep3 = monte_carlo_code(three, 3000);
  check_counter_identities(rep3, 30, 3);
  CHECK(rep3.retransmit_count > 0);

  CodeConfig plain(bsc02(), 0.1, 20, 1.0, 0.0, 0.0, 2, u, 5ull);
  CodeSimReport repp = monte_carlo_code(plain, 3000);
  CHECK(repp.retransmit_count == 0);
  CHECK(repp.error_count == repp.phase1_error_count);
  CHECK(repp.tau_histogram.size() == 1);
  CHECK(repp.tau_histogram.count(20) == 1);
  CHECK(repp.sum_tau == 3000ull * 20ull);
}

TEST_CASE("verification tail follows the extremal divergence") {
  // At lambda = 0 the acceptance rule under a nack transmission is a binomial
  // tail whose exponent is the reverse divergence between the extremal rows.
  Distribution u = Distribution::uniform(2);
  std::vector<std::pair<double, double>> pts;
  for (int m2 = 16; m2 <= 64; m2 += 8) {
    CodeConfig cfg(bsc02(), 0.02, 2 * m2, 0.5, 0.0, 0.0, 2, u, 1ull);
    REQUIRE(cfg.m2() == m2);
    double thr = cfg.verify_threshold();
    // Largest ones-count still accepted: mean llr 2(m2 - 2*ones)/m2 >= thr.
    int cut = -1;
    for (int ones = 0; ones <= m2; ++ones)
      if (2.0 * (m2 - 2.0 * ones) / m2 >= thr) cut = ones;
    REQUIRE(cut >= 0);
    // log2 P(Bin(m2, 0.8) <= cut): false acceptance of a wrong estimate.
    double lse = -std::numeric_limits<double>::infinity();
    for (int ones = 0; ones <= cut; ++ones) {
      double lp = (std::lgamma(m2 + 1.0) - std::lgamma(ones + 1.0) -
                   std::lgamma(m2 - ones + 1.0)) /
                      std::log(2.0) +
                  ones * std::log2(0.8) + (m2 - ones) * std::log2(0.2);
      double hi = std::max(lse, lp);
      lse = hi + std::log2(std::exp2(lse - hi) + std::exp2(lp - hi));
    }
    pts.emplace_back(m2, lse);
  }
  ExponentFit fit = empirical_exponent_log2(pts);
  double d_rev = kl_divergence(Vec{0.8, 0.2}, Vec{0.2, 0.8});
  CHECK(d_rev == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(fit.slope >= 0.9 * d_rev);
  CHECK(fit.slope <= 1.05 * d_rev);
}

TEST_CASE("baseline error decay and the paired comparison") {
  Distribution u = Distribution::uniform(2);
  std::vector<std::pair<double, double>> pts;
  CodeSimReport base40;
  for (int ell : {20, 40, 60, 80}) {
    CodeSimReport rep = run_flf_baseline(bsc02(), 0.05, ell, u, 20000, 31337ull);
    CHECK(rep.trials == 20000);
    CHECK(rep.retransmit_count == 0);
    CHECK(rep.error_count > 0);
    CHECK(rep.sum_tau == 20000ull * static_cast<std::uint64_t>(ell));
    pts.emplace_back(ell, rep.error_freq());
    if (ell == 40) base40 = rep;
  }
  ExponentFit fit = empirical_exponent(pts);
  CHECK(fit.dropped == 0);
  CHECK(fit.slope >= 0.5 * random_coding_exponent(bsc02(), 0.05));

  // Zero-budget two-phase code at ell = 40: the verification threshold sits
  // at the drift of the ack row, so retransmissions stay near a coin flip,
  // while the error rate must not degrade beyond noise.
  SelectedParams sel = select_parameters(bsc02(), 0.05, 0.0);
  CodeConfig cfg(bsc02(), 0.05, 40, sel.alpha, sel.lambda, 0.0, 2, u, 31337ull);
  CodeSimReport two = monte_carlo_code(cfg, 20000);
  check_counter_identities(two, 40, 2);
  CHECK(two.retransmit_freq() > 0.3);
  CHECK(two.retransmit_freq() < 0.7);
  double sigma = std::sqrt(base40.error_freq() * (1.0 - base40.error_freq()) / 20000.0 +
                           two.error_freq() * (1.0 - two.error_freq()) / 20000.0);
  CHECK(two.error_freq() <= base40.error_freq() + 4.0 * sigma + 1e-9);
}
