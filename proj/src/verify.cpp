#include "aflx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "aflx/cli.hpp"
#include "aflx/code_sim.hpp"
#include "aflx/dmc.hpp"
#include "aflx/exponents.hpp"
#include "aflx/ht.hpp"
#include "aflx/ht_sim.hpp"
#include "aflx/numerics.hpp"
#include "aflx/rng.hpp"

namespace aflx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

// Collects pass/fail conditions for one named check; failures accumulate
// their own messages so a failing line says what went wrong.
struct Checker {
  bool ok = true;
  std::string fail_detail;
  std::string note;

  void expect(bool cond, const std::string& msg) {
    if (cond) return;
    ok = false;
    if (!fail_detail.empty()) fail_detail += "; ";
    fail_detail += msg;
  }
  void expect_near(double got, double want, double tol, const char* what) {
    if (std::fabs(got - want) <= tol) return;
    expect(false, strf("%s: got %.12g, want %.12g (tol %.3g)", what, got, want, tol));
  }
  CheckResult result(const std::string& name) const {
    return {name, ok, ok ? note : fail_detail};
  }
};

// ---------------------------------------------------------------------------
// Local scalar oracle for the binary symmetric channel, kept deliberately
// separate from the library code paths: direct pow/log arithmetic, dense
// grids and plain bisections instead of golden sections and caches.
// ---------------------------------------------------------------------------

namespace oracle {

double xlog2_ratio(double a, double b) {
  if (a <= 0.0) return 0.0;
  if (b <= 0.0) return kInf;
  return a * std::log2(a / b);
}

// KL between Bernoulli(a) and Bernoulli(b), bits.
double kl2(double a, double b) {
  double t1 = xlog2_ratio(a, b);
  double t0 = xlog2_ratio(1.0 - a, 1.0 - b);
  return t1 + t0;
}

// Parameter of the normalized a^(1-lam) b^lam tilt between Bernoulli(a) and
// Bernoulli(b).
double tilt2(double a, double b, double lam) {
  double w1 = std::pow(a, 1.0 - lam) * std::pow(b, lam);
  double w0 = std::pow(1.0 - a, 1.0 - lam) * std::pow(1.0 - b, lam);
  return w1 / (w0 + w1);
}

double bsc_capacity(double p) {
  return 1.0 + p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p);
}

// Gallager function for the BSC under the uniform input.
double bsc_e0(double p, double rho) {
  double s = std::pow(1.0 - p, 1.0 / (1.0 + rho)) +
             std::pow(p, 1.0 / (1.0 + rho));
  return rho - (1.0 + rho) * std::log2(s);
}

// Random-coding curve by brute maximization on a dense rho grid.
struct ErGrid {
  double p;
  std::vector<double> rho, e0v;

  explicit ErGrid(double crossover, int points = 10001) : p(crossover) {
    rho.resize(points);
    e0v.resize(points);
    for (int i = 0; i < points; ++i) {
      rho[i] = static_cast<double>(i) / (points - 1);
      e0v[i] = bsc_e0(p, rho[i]);
    }
  }

  double er(double rate) const {
    double best = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      best = std::max(best, e0v[i] - rho[i] * rate);
    return best;
  }
};

// Two-phase lower bound replicated with local pieces only: row divergences by
// kl2, the feasibility window by plain bisections, a 1e-3 alpha sweep with
// the binding tilt solved per alpha.
double two_phase_bound(const ErGrid& g, double rate, double gamma, int k) {
  double er_rate = g.er(rate);
  if (gamma >= er_rate) return er_rate;

  // Transition rows of bsc(p) as probability-of-one values.
  double row_x = g.p;         // input 0
  double row_xp = 1.0 - g.p;  // input 1
  double d_back = kl2(row_xp, row_x);

  double cap = bsc_capacity(g.p);
  // alpha_lo: solve alpha * Er(rate/alpha) = gamma via the phase-one rate.
  double lo = 1e-9, hi = cap - 1e-12;
  double target = gamma / rate;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g.er(mid) / mid >= target)
      lo = mid;
    else
      hi = mid;
  }
  double alpha_lo = rate / (0.5 * (lo + hi));
  double alpha_hi = 1.0 - gamma / d_back;
  if (alpha_lo > alpha_hi + 1e-12) return er_rate;

  auto d_fwd = [&](double lam) { return kl2(tilt2(row_x, row_xp, lam), row_x); };
  auto d_rev = [&](double lam) { return kl2(tilt2(row_x, row_xp, lam), row_xp); };
  auto lambda_min = [&](double alpha) {
    double need = gamma / (1.0 - alpha);
    double llo = 0.0, lhi = 1.0;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (llo + lhi);
      if (d_fwd(mid) >= need)
        lhi = mid;
      else
        llo = mid;
    }
    return lhi;
  };

  double best = -kInf;
  std::vector<double> alphas;
  for (double a = alpha_lo; a < alpha_hi; a += 1e-3) alphas.push_back(a);
  alphas.push_back(alpha_hi);
  for (double a : alphas) {
    double need = gamma / (1.0 - a);
    if (d_fwd(1.0) < need - 1e-12) continue;  // no feasible tilt here
    double lam = lambda_min(a);
    double v = a * g.er(rate / a) + (1.0 - a) * d_rev(lam);
    best = std::max(best, v);
  }
  if (best == -kInf) return er_rate;

  double tail = (k - 1.0) * g.er(rate / (k - 1.0));
  double value = std::min(best, tail);
  return std::max(value, er_rate);
}

}  // namespace oracle

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// release checks
// ---------------------------------------------------------------------------

CheckResult check_closed_form_constants() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  double cap = capacity(ch);
  c.expect_near(cap, 0.278072, 1e-6, "capacity");
  C1Result c1 = c1_and_extremal_inputs(ch);
  c.expect(!c1.infinite, "c1 reported infinite");
  c.expect_near(c1.value, 1.2, 1e-9, "c1");
  c.expect(c1.x == 0 && c1.x_prime == 1,
           strf("extremal pair: got (%zu,%zu), want (0,1)", c1.x, c1.x_prime));
  double er0 = random_coding_exponent(ch, 0.0);
  c.expect_near(er0, 0.152003, 1e-6, "er(0)");
  double burn0 = burnashev_exponent(ch, 0.0);
  c.expect(std::fabs(burn0 - c1.value) <= 1e-15,
           strf("burn(0) = %.17g differs from c1 = %.17g", burn0, c1.value));
  double burn_cap = burnashev_exponent(ch, er_cache(ch).capacity_bits());
  c.expect(burn_cap == 0.0, strf("burn(capacity) = %.17g, want exact 0", burn_cap));
  c.note = strf("capacity %.9f, c1 %.12g, er(0) %.9f", cap, c1.value, er0);
  return c.result("closed-form constants (bsc 0.2)");
}

CheckResult check_feedback_collapse() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  double cap = er_cache(ch).capacity_bits();
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    double r = cap * i / 101.0;
    double a = aflf_lower_bound_gamma0(ch, r, 9);
    double b = burnashev_exponent(ch, r);
    worst = std::max(worst, std::fabs(a - b));
  }
  c.expect(worst <= 1e-9,
           strf("max |bound - feedback line| = %.3g over the rate grid", worst));
  c.note = strf("max gap %.3g across 100 rates", worst);
  return c.result("feedback-bound collapse at k = 9");
}

CheckResult check_exponent_ordering() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  double cap = er_cache(ch).capacity_bits();

  // Critical rate from the local closed form: slope of E0 at rho = 1.
  double h = 1e-6;
  double rc = (oracle::bsc_e0(0.2, 1.0 + h) - oracle::bsc_e0(0.2, 1.0 - h)) / (2.0 * h);
  c.expect_near(rc, 0.0817042, 1e-4, "critical rate");

  double max_er_minus_esp = -kInf;
  double max_above_gap = 0.0;
  bool strict_below = true;
  for (int i = 1; i <= 100; ++i) {
    double r = cap * i / 101.0;
    double er = random_coding_exponent(ch, r);
    double esp = sphere_packing_exponent(ch, r);
    double burn = burnashev_exponent(ch, r);
    max_er_minus_esp = std::max(max_er_minus_esp, er - esp);
    c.expect(esp <= burn - 1e-9,
             strf("sphere packing is not strictly below the feedback line at "
                  "rate %.6f (%.9g vs %.9g)",
                  r, esp, burn));
    if (r >= rc + 1e-3) max_above_gap = std::max(max_above_gap, std::fabs(er - esp));
    if (r <= rc * 0.6 && esp - er < 1e-5) strict_below = false;
  }
  c.expect(max_er_minus_esp <= 1e-9,
           strf("random coding exceeds sphere packing by %.3g", max_er_minus_esp));
  c.expect(max_above_gap <= 1e-6,
           strf("curves split above the critical rate by %.3g", max_above_gap));
  c.expect(strict_below, "curves failed to separate well below the critical rate");
  c.note = strf("critical rate %.7f, max gap above it %.2g", rc, max_above_gap);
  return c.result("exponent ordering and critical rate");
}

CheckResult check_two_phase_vs_oracle() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  oracle::ErGrid grid(0.2);
  const int k = 6;
  double worst = 0.0;
  for (double rate : {0.05, 0.1, 0.15}) {
    for (double gamma : {0.01, 0.02, 0.05}) {
      AflfBound b = aflf_lower_bound(ch, rate, gamma, k);
      double want = oracle::two_phase_bound(grid, rate, gamma, k);
      double gap = std::fabs(b.value - want);
      worst = std::max(worst, gap);
      c.expect(gap <= 1e-4,
               strf("rate %.2f gamma %.2f: module %.9f vs oracle %.9f", rate,
                    gamma, b.value, want));
    }
  }
  c.note = strf("max |module - oracle| = %.2g over 9 probes", worst);
  return c.result("two-phase bound vs grid oracle");
}

CheckResult check_balanced_test_constants() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  ChernoffResult cr = chernoff_exponent(pair);
  c.expect_near(cr.exponent, 0.501150, 1e-4, "balanced exponent");
  double residual = std::fabs(ht_d1(pair, cr.lambda) - ht_d2(pair, cr.lambda));
  c.expect(residual <= 1e-9, strf("balance residual %.3g", residual));
  double ks = k_star_ht(pair);
  c.expect_near(ks, 3.923, 1e-3, "k-star");
  c.expect(std::ceil(ks) == 4.0, strf("ceil(k-star) = %g, want 4", std::ceil(ks)));
  c.note = strf("exponent %.9f at tilt %.9f, k-star %.6f", cr.exponent,
                cr.lambda, ks);
  return c.result("balanced-test constants (ber 0.9 vs 0.2)");
}

CheckResult check_region_geometry() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  double dstar = chernoff_exponent(pair).exponent;
  const int grid = 512;

  std::vector<double> gammas{0.0, 0.1, 0.3, dstar};
  std::vector<double> ks{2.0, 4.0};

  for (double g : gammas) {
    for (double k : ks) {
      ExponentRegion afl = afl_region(pair, g, k, grid);
      ExponentRegion rej = rejection_region(pair, g, grid);
      // Ordering along the boundary.
      for (std::size_t i = 1; i < afl.boundary.size(); ++i) {
        c.expect(afl.boundary[i].first > afl.boundary[i - 1].first,
                 "boundary e1 not strictly increasing");
        c.expect(afl.boundary[i].second <= afl.boundary[i - 1].second + 1e-15,
                 "boundary e2 not non-increasing");
      }
      for (const auto& pt : afl.boundary) {
        // Contains the fixed-length curve, stays inside the sequential box.
        double flv = fl_boundary_at(pair, pt.first);
        c.expect(flv <= pt.second + 1e-12,
                 strf("gamma %.3f k %.1f: afl dips below the fixed-length "
                      "curve at e1 = %.6f",
                      g, k, pt.first));
        c.expect(pt.second <= pair.d12 + 1e-12 && pt.first <= pair.d21 + 1e-12,
                 "afl leaves the sequential box");
        // Never above the rejection region.
        c.expect(pt.second <=
                     region_boundary_at(rej, pt.first) + 1e-12,
                 "afl exceeds the rejection region");
      }
      // k = 4 >= ceil(k-star): the budget clip is inactive.
      if (k == 4.0) {
        double worst = 0.0;
        for (const auto& pt : afl.boundary)
          worst = std::max(
              worst, std::fabs(pt.second - region_boundary_at(rej, pt.first)));
        c.expect(worst <= 1e-9,
                 strf("gamma %.3f: afl(k=4) differs from rejection region by %.3g",
                      g, worst));
      }
    }
  }

  // Monotone shrinkage in gamma, compared at shared uniform grid points.
  for (double k : ks) {
    std::vector<ExponentRegion> regions;
    for (double g : gammas) regions.push_back(afl_region(pair, g, k, grid));
    for (std::size_t gi = 1; gi < regions.size(); ++gi) {
      for (int i = 0; i < grid; ++i) {
        double e1 = pair.d21 * i / (grid - 1.0);
        double lo = region_boundary_at(regions[gi], e1);
        double hi = region_boundary_at(regions[gi - 1], e1);
        c.expect(lo <= hi + 1e-12,
                 strf("region grew with gamma at k %.1f, e1 %.6f", k, e1));
      }
    }
  }

  // Monotone growth in k at fixed gamma (same sample abscissas).
  for (double g : gammas) {
    ExponentRegion small = afl_region(pair, g, 2.0, grid);
    ExponentRegion big = afl_region(pair, g, 4.0, grid);
    c.expect(small.boundary.size() == big.boundary.size(),
             "k = 2 and k = 4 boundaries sample different grids");
    for (std::size_t i = 0;
         i < std::min(small.boundary.size(), big.boundary.size()); ++i)
      c.expect(small.boundary[i].second <= big.boundary[i].second + 1e-12,
               strf("region shrank when k grew at gamma %.3f", g));
  }

  // Far above the balanced exponent the continuation budget buys nothing.
  ExponentRegion clipped = afl_region(pair, dstar + 0.05, 2.0, grid);
  double worst_fl = 0.0;
  for (const auto& pt : clipped.boundary)
    worst_fl = std::max(worst_fl,
                        std::fabs(pt.second - fl_boundary_at(pair, pt.first)));
  c.expect(worst_fl <= 1e-12,
           strf("gamma above the balanced exponent: afl differs from the "
                "fixed-length curve by %.3g",
                worst_fl));

  // Membership spot checks.
  ExponentRegion fl = fl_region_boundary(pair, grid);
  ExponentRegion seq = seq_region(pair);
  ExponentRegion afl01 = afl_region(pair, 0.1, 2.0, grid);
  c.expect(region_contains(fl, 0.0, 0.0) && region_contains(seq, 0.0, 0.0) &&
               region_contains(afl01, 0.0, 0.0),
           "(0,0) must lie in every region");
  c.expect(!region_contains(fl, 1.0, 1.0), "(1,1) must lie outside the "
                                           "fixed-length region");
  c.expect(region_contains(seq, pair.d21, pair.d12),
           "the sequential corner must lie in the sequential region");
  c.expect(!region_contains(seq, pair.d21 + 0.01, 0.01),
           "points past d21 with positive e2 must lie outside");
  c.expect(!region_contains(fl, -0.1, 0.0) && !region_contains(fl, 0.0, -0.1),
           "negative exponents are never members");
  c.note = strf("4 gammas x 2 ks on a %d-point grid", grid);
  return c.result("region geometry and nesting");
}

CheckResult check_mc_vs_exact() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  double lambda = chernoff_exponent(pair).lambda;
  TwoPhaseTestConfig cfg(pair, 10, 2, 0.2, lambda);
  ExactResult ex = exact_binary_oracle(cfg);
  const std::uint64_t trials = 1000000;
  HtSimReport rep = monte_carlo_ht(cfg, trials, kDefaultSeed);

  struct Row {
    const char* what;
    std::uint64_t count;
    double want;
  };
  Row rows[] = {
      {"h1 error", rep.h1.err_count, ex.p1_err},
      {"h1 continue", rep.h1.continue_count, ex.p1_continue},
      {"h2 error", rep.h2.err_count, ex.p2_err},
      {"h2 continue", rep.h2.continue_count, ex.p2_continue},
  };
  for (const Row& r : rows) {
    double freq = static_cast<double>(r.count) / trials;
    double rad = wilson_radius(r.count, trials, 1.0);
    c.expect(std::fabs(freq - r.want) <= 4.0 * rad,
             strf("%s: freq %.6g vs exact %.6g (4 sigma = %.2g)", r.what, freq,
                  r.want, 4.0 * rad));
  }
  c.note = strf("1e6 trials per hypothesis; exact p1_err %.6g, p2_err %.6g",
                ex.p1_err, ex.p2_err);
  return c.result("monte carlo matches the exact oracle");
}

CheckResult check_tail_slopes() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  double dstar = chernoff_exponent(pair).exponent;
  double lambda = chernoff_exponent(pair).lambda;
  const int k = 2;

  for (double gamma : {0.1, 0.3}) {
    GammaExponents ge = gamma_exponents(pair, gamma);
    std::vector<std::pair<double, double>> err1, err2, cont1, cont2;
    for (int n = 100; n <= 500; n += 25) {
      TwoPhaseTestConfig cfg(pair, n, k, gamma, lambda);
      ExactResult ex = exact_binary_oracle(cfg);
      err1.emplace_back(n, ex.log2_p1_err);
      err2.emplace_back(n, ex.log2_p2_err);
      cont1.emplace_back(n, ex.log2_p1_continue);
      cont2.emplace_back(n, ex.log2_p2_continue);
    }
    double s_c1 = empirical_exponent_log2(cont1).slope;
    double s_c2 = empirical_exponent_log2(cont2).slope;
    c.expect(std::fabs(s_c1 - gamma) <= 0.05 * gamma,
             strf("gamma %.2f: h1 continue slope %.6f off target", gamma, s_c1));
    c.expect(std::fabs(s_c2 - gamma) <= 0.05 * gamma,
             strf("gamma %.2f: h2 continue slope %.6f off target", gamma, s_c2));

    double s_e1 = empirical_exponent_log2(err1).slope;
    double s_e2 = empirical_exponent_log2(err2).slope;
    double pred1 = std::min(ge.e1, k * dstar);
    double pred2 = std::min(ge.e2, k * dstar);
    c.expect(s_e1 >= 0.95 * pred1,
             strf("gamma %.2f: h1 error slope %.6f below 0.95 x %.6f", gamma,
                  s_e1, pred1));
    c.expect(s_e2 >= 0.95 * pred2,
             strf("gamma %.2f: h2 error slope %.6f below 0.95 x %.6f", gamma,
                  s_e2, pred2));
  }
  c.note = "17-point n grids at gamma 0.1 and 0.3, exact tail slopes";
  return c.result("tail slopes track the targets");
}

CheckResult check_code_simulator() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  const double rate = 0.05, gamma = 0.05;
  const int k = 2;
  const std::uint64_t trials = 100000;
  SelectedParams sel = select_parameters(ch, rate, gamma);
  c.expect(!sel.degenerate, "selected parameters unexpectedly degenerate");

  Distribution q = Distribution::uniform(2);
  std::vector<int> ells{20, 40, 60, 80};
  std::vector<double> err_freqs, retx_freqs, err_se, retx_se;
  for (int ell : ells) {
    CodeConfig cfg(ch, rate, ell, sel.alpha, sel.lambda, gamma, k, q,
                   kDefaultSeed);
    CodeSimReport rep = monte_carlo_code(cfg, trials);

    for (const auto& kv : rep.tau_histogram)
      c.expect(kv.first == ell || kv.first == static_cast<std::int64_t>(k) * ell,
               strf("ell %d: stopping time %lld outside the two-point support",
                    ell, static_cast<long long>(kv.first)));
    std::uint64_t want_sum =
        static_cast<std::uint64_t>(ell) * (trials - rep.retransmit_count) +
        static_cast<std::uint64_t>(k) * ell * rep.retransmit_count;
    c.expect(rep.sum_tau == want_sum,
             strf("ell %d: stopping-time sum %llu, want %llu", ell,
                  static_cast<unsigned long long>(rep.sum_tau),
                  static_cast<unsigned long long>(want_sum)));
    c.expect(rep.error_count ==
                 rep.ack_given_wrong_count + rep.phase2_error_count,
             strf("ell %d: error count split violated", ell));

    err_freqs.push_back(rep.error_freq());
    retx_freqs.push_back(rep.retransmit_freq());
    err_se.push_back(wilson_radius(rep.error_count, trials, 1.0));
    retx_se.push_back(wilson_radius(rep.retransmit_count, trials, 1.0));
  }
  for (std::size_t i = 1; i < ells.size(); ++i) {
    double slack_e =
        4.0 * std::sqrt(err_se[i] * err_se[i] + err_se[i - 1] * err_se[i - 1]);
    c.expect(err_freqs[i] <= err_freqs[i - 1] + slack_e,
             strf("error frequency rose from ell %d to %d (%.3g -> %.3g)",
                  ells[i - 1], ells[i], err_freqs[i - 1], err_freqs[i]));
    double slack_r = 4.0 * std::sqrt(retx_se[i] * retx_se[i] +
                                     retx_se[i - 1] * retx_se[i - 1]);
    c.expect(retx_freqs[i] <= retx_freqs[i - 1] + slack_r,
             strf("retransmit frequency rose from ell %d to %d", ells[i - 1],
                  ells[i]));
  }

  // Fixed-length baseline decays at least at 0.7x the one-shot exponent.
  oracle::ErGrid grid(0.2);
  double er_target = grid.er(rate);
  std::vector<std::pair<double, double>> base_pts;
  for (int ell : ells) {
    CodeSimReport rep = run_flf_baseline(ch, rate, ell, q, trials, kDefaultSeed);
    c.expect(rep.error_count > 0,
             strf("baseline produced no errors at ell %d", ell));
    base_pts.emplace_back(ell, rep.error_freq());
  }
  double slope = 0.0;
  try {
    slope = empirical_exponent(base_pts).slope;
    c.expect(slope >= 0.7 * er_target,
             strf("baseline slope %.6f below 0.7 x %.6f", slope, er_target));
  } catch (const std::invalid_argument& e) {
    c.expect(false, strf("baseline slope fit unavailable: %s", e.what()));
  }
  c.note = strf("alpha %.4f lambda %.4f; baseline slope %.4f vs target %.4f",
                sel.alpha, sel.lambda, slope, er_target);
  return c.result("code simulator behaves along ell");
}

CheckResult check_byte_identical_reruns() {
  Checker c;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();

  struct Job {
    const char* what;
    std::vector<std::string> args;
  };
  std::vector<Job> jobs = {
      {"exponents",
       {"exponents", "--channel", "bsc:0.2", "--rates", "0.05,0.1,0.15",
        "--gammas", "0.02", "--k", "4"}},
      {"ht-sim",
       {"ht-sim", "--pair", "ber:0.9,0.2", "--gamma", "0.2", "--n-list",
        "6,8,10", "--trials", "2000"}},
      {"code-sim",
       {"code-sim", "--channel", "bsc:0.2", "--rate", "0.1", "--gamma", "0.02",
        "--ell-list", "10,14", "--trials", "2000"}},
  };
  int ji = 0;
  for (const Job& job : jobs) {
    std::string f1 = (dir / strf("aflx_rerun_%d_a.csv", ji)).string();
    std::string f2 = (dir / strf("aflx_rerun_%d_b.csv", ji)).string();
    ++ji;
    std::vector<std::string> a1 = job.args, a2 = job.args;
    a1.push_back("--output");
    a1.push_back(f1);
    a2.push_back("--output");
    a2.push_back(f2);
    int rc1 = cli_main(a1);
    int rc2 = cli_main(a2);
    c.expect(rc1 == 0 && rc2 == 0,
             strf("%s: exit codes %d and %d", job.what, rc1, rc2));
    std::string b1 = read_file_bytes(f1);
    std::string b2 = read_file_bytes(f2);
    c.expect(!b1.empty(), strf("%s: empty output", job.what));
    c.expect(b1 == b2, strf("%s: reruns differ", job.what));
    std::error_code ec;
    fs::remove(f1, ec);
    fs::remove(f2, ec);
  }
  c.note = "exponents, ht-sim, code-sim rerun byte-compared";
  return c.result("byte-identical reruns");
}

}  // namespace

std::vector<CheckResult> acceptance_checks() {
  std::vector<CheckResult> out;
  out.push_back(check_closed_form_constants());
  out.push_back(check_feedback_collapse());
  out.push_back(check_exponent_ordering());
  out.push_back(check_two_phase_vs_oracle());
  out.push_back(check_balanced_test_constants());
  out.push_back(check_region_geometry());
  out.push_back(check_mc_vs_exact());
  out.push_back(check_tail_slopes());
  out.push_back(check_code_simulator());
  out.push_back(check_byte_identical_reruns());
  return out;
}

// ---------------------------------------------------------------------------
// quick invariant sweeps
// ---------------------------------------------------------------------------

namespace {

CheckResult inv_tilt_paths() {
  Checker c;
  std::mt19937_64 g = substream(7, 77, 0);
  for (int rep = 0; rep < 5; ++rep) {
    std::size_t n = 2 + rep % 3;
    Vec a(n), b(n);
    double sa = 0, sb = 0;
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
    // Rebuild so the sums hit 1 exactly enough for the constructor.
    Distribution p(a), q(b);
    double prev_d1 = -1.0, prev_d2 = kInf;
    for (double lam = 0.0; lam <= 1.0 + 1e-12; lam += 0.05) {
      Distribution t = tilted_distribution(p, q, std::min(lam, 1.0));
      double d1 = kl_divergence(t, p), d2 = kl_divergence(t, q);
      c.expect(d1 >= prev_d1 - 1e-12, "divergence from p must rise with the tilt");
      c.expect(d2 <= prev_d2 + 1e-12, "divergence to q must fall with the tilt");
      prev_d1 = d1;
      prev_d2 = d2;
    }
  }
  c.note = "5 seeded pairs, 21-point tilt ladders";
  return c.result("tilt divergence monotone along the path");
}

CheckResult inv_capacity_closed_forms() {
  Checker c;
  double h2 = 0.2 * std::log2(1.0 / 0.2) + 0.8 * std::log2(1.0 / 0.8);
  c.expect_near(capacity(Channel::bsc(0.2)), 1.0 - h2, 1e-9, "bsc capacity");
  c.expect_near(capacity(Channel::bec(0.3)), 0.7, 1e-9, "bec capacity");
  c.expect_near(capacity(Channel::bsc(0.5)), 0.0, 1e-9, "useless channel");
  return c.result("capacity matches closed forms");
}

CheckResult inv_er_curve() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  const ErCache& cache = er_cache(ch);
  double cap = cache.capacity_bits();
  double prev = kInf;
  for (int i = 0; i <= 40; ++i) {
    double r = cap * i / 40.0;
    double exact = random_coding_exponent(ch, r);
    double interp = cache(r);
    c.expect(std::fabs(exact - interp) <= 1e-9,
             strf("cache drifts from the exact curve at rate %.5f", r));
    c.expect(exact <= prev + 1e-12, "random-coding curve must fall with rate");
    prev = exact;
  }
  return c.result("random-coding curve cached faithfully");
}

CheckResult inv_gamma_exponents() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  double prev_e1 = kInf, prev_e2 = kInf;
  for (double g : {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    GammaExponents ge = gamma_exponents(pair, g);
    c.expect(ge.e1 <= prev_e1 + 1e-12 && ge.e2 <= prev_e2 + 1e-12,
             strf("phase-one exponents must fall with gamma (gamma %.2f)", g));
    prev_e1 = ge.e1;
    prev_e2 = ge.e2;
    if (g > 0.0 && g < pair.d12) {
      c.expect(std::fabs(ht_d2(pair, ge.lambda1) - g) <= 1e-9,
               strf("lambda1 misses its budget at gamma %.2f", g));
    }
    if (g > 0.0 && g < pair.d21) {
      c.expect(std::fabs(ht_d1(pair, ge.lambda2) - g) <= 1e-9,
               strf("lambda2 misses its budget at gamma %.2f", g));
    }
  }
  return c.result("phase-one exponents respect the budget");
}

CheckResult inv_region_nesting() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  ExponentRegion afl = afl_region(pair, 0.1, 2.0, 256);
  for (const auto& pt : afl.boundary) {
    c.expect(fl_boundary_at(pair, pt.first) <= pt.second + 1e-12,
             "afl must contain the fixed-length region");
    c.expect(pt.second <= pair.d12 + 1e-12,
             "afl must stay inside the sequential box");
  }
  return c.result("region nesting at gamma 0.1");
}

CheckResult inv_ht_mc() {
  Checker c;
  HtPair pair(Distribution::bernoulli(0.9), Distribution::bernoulli(0.2));
  TwoPhaseTestConfig cfg(pair, 8, 2, 0.15, 0.5);
  ExactResult ex = exact_binary_oracle(cfg);
  const std::uint64_t trials = 20000;
  HtSimReport rep = monte_carlo_ht(cfg, trials, kDefaultSeed);
  auto close = [&](std::uint64_t count, double want, const char* what) {
    double freq = static_cast<double>(count) / trials;
    double rad = wilson_radius(count, trials, 1.0);
    c.expect(std::fabs(freq - want) <= 4.0 * rad,
             strf("%s: %.5g vs exact %.5g", what, freq, want));
  };
  close(rep.h1.err_count, ex.p1_err, "h1 error");
  close(rep.h2.err_count, ex.p2_err, "h2 error");
  close(rep.h1.continue_count, ex.p1_continue, "h1 continue");
  close(rep.h2.continue_count, ex.p2_continue, "h2 continue");
  std::uint64_t want_sum = 8ull * trials + 8ull * rep.h1.continue_count;
  c.expect(rep.h1.sum_tau == want_sum, "h1 stopping-time sum identity");
  return c.result("test simulator agrees with the exact oracle");
}

CheckResult inv_code_identities() {
  Checker c;
  Channel ch = Channel::bsc(0.2);
  CodeConfig cfg(ch, 0.05, 30, 0.65, 0.35, 0.05, 2, Distribution::uniform(2),
                 kDefaultSeed);
  CodeSimReport rep = monte_carlo_code(cfg, 20000);
  c.expect(rep.error_count == rep.ack_given_wrong_count + rep.phase2_error_count,
           "error split identity");
  std::uint64_t want_sum = 30ull * (rep.trials - rep.retransmit_count) +
                           60ull * rep.retransmit_count;
  c.expect(rep.sum_tau == want_sum, "stopping-time sum identity");
  for (const auto& kv : rep.tau_histogram)
    c.expect(kv.first == 30 || kv.first == 60, "two-point stopping support");
  return c.result("code counters satisfy their identities");
}

CheckResult inv_csv_determinism() {
  Checker c;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();
  std::string f1 = (dir / "aflx_quick_a.csv").string();
  std::string f2 = (dir / "aflx_quick_b.csv").string();
  std::vector<std::string> base = {"ht-sim",  "--pair",   "ber:0.9,0.2",
                                   "--n-list", "5,7",     "--trials",
                                   "1000",    "--gamma",  "0.1"};
  std::vector<std::string> a1 = base, a2 = base;
  a1.insert(a1.end(), {"--output", f1});
  a2.insert(a2.end(), {"--output", f2});
  int rc1 = cli_main(a1);
  int rc2 = cli_main(a2);
  c.expect(rc1 == 0 && rc2 == 0, strf("exit codes %d, %d", rc1, rc2));
  c.expect(read_file_bytes(f1) == read_file_bytes(f2) && !read_file_bytes(f1).empty(),
           "reruns differ");
  std::error_code ec;
  fs::remove(f1, ec);
  fs::remove(f2, ec);
  return c.result("csv output reruns identically");
}

}  // namespace

std::vector<CheckResult> invariant_checks() {
  std::vector<CheckResult> out;
  out.push_back(inv_tilt_paths());
  out.push_back(inv_capacity_closed_forms());
  out.push_back(inv_er_curve());
  out.push_back(inv_gamma_exponents());
  out.push_back(inv_region_nesting());
  out.push_back(inv_ht_mc());
  out.push_back(inv_code_identities());
  out.push_back(inv_csv_determinism());
  return out;
}

}  // namespace aflx
