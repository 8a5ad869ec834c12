#include "aflx/ht_sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aflx/numerics.hpp"
#include "aflx/rng.hpp"
#include "parallel.hpp"

namespace aflx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

double threshold_at(const HtPair& pair, double lambda) {
  Distribution t = ht_tilted(pair, lambda);
  return kl_divergence(t, pair.p2) - kl_divergence(t, pair.p1);
}

double mean_llr(const std::vector<std::uint64_t>& counts, const Vec& llr,
                std::int64_t total) {
  double sum = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s)
    sum += static_cast<double>(counts[s]) * llr[s];
  return sum / static_cast<double>(total);
}
}  // namespace

TwoPhaseTestConfig::TwoPhaseTestConfig(HtPair pr, int n_, int k_, double gamma_,
                                       double lambda_)
    : pair(std::move(pr)), n(n_), k(k_), gamma(gamma_), lambda(lambda_) {
  if (n < 1) throw std::invalid_argument("TwoPhaseTestConfig: n must be >= 1");
  if (k < 2) throw std::invalid_argument("TwoPhaseTestConfig: k must be >= 2");
  if (!(gamma >= 0.0))
    throw std::invalid_argument("TwoPhaseTestConfig: gamma must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("TwoPhaseTestConfig: lambda outside [0, 1]");
  GammaExponents ge = gamma_exponents(pair, gamma);
  alpha1 = threshold_at(pair, ge.lambda2);
  beta1 = threshold_at(pair, ge.lambda1);
  alpha = threshold_at(pair, lambda);
  if (beta1 > alpha1 + 1e-12) {
    // Continuation band is empty (gamma beyond the balanced exponent); the
    // test degrades to a fixed-length decision at the final threshold.
    alpha1 = alpha;
    beta1 = alpha;
  }
}

TestOutcome run_fixed_length_test(const HtPair& pair, int n, double threshold,
                                  const std::vector<int>& samples) {
  if (n < 1) throw std::invalid_argument("run_fixed_length_test: n must be >= 1");
  if (samples.size() < static_cast<std::size_t>(n))
    throw std::invalid_argument("run_fixed_length_test: not enough samples");
  std::vector<std::uint64_t> counts(pair.p1.size(), 0);
  for (int i = 0; i < n; ++i) {
    int s = samples[static_cast<std::size_t>(i)];
    if (s < 0 || s >= static_cast<int>(counts.size()))
      throw std::invalid_argument("run_fixed_length_test: symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  double mean = mean_llr(counts, pair.llr, n);
  return {mean >= threshold ? Decision::h1 : Decision::h2, n};
}

SprtOutcome run_sprt_thresholds(const HtPair& pair, double upper, double lower,
                                const std::function<int()>& next_sample,
                                std::int64_t cap) {
  if (cap < 1) throw std::invalid_argument("run_sprt_thresholds: cap must be >= 1");
  double cum = 0.0;
  for (std::int64_t t = 1; t <= cap; ++t) {
    int s = next_sample();
    if (s < 0 || s >= static_cast<int>(pair.llr.size()))
      throw std::invalid_argument("run_sprt_thresholds: symbol out of range");
    cum += pair.llr[static_cast<std::size_t>(s)];
    if (cum >= upper) return {Decision::h1, t, false};
    if (cum <= lower) return {Decision::h2, t, false};
  }
  return {cum >= 0.0 ? Decision::h1 : Decision::h2, cap, true};
}

SprtOutcome run_sprt(const HtPair& pair, int n, double delta,
                     const std::function<int()>& next_sample, std::int64_t cap) {
  if (n < 1) throw std::invalid_argument("run_sprt: n must be >= 1");
  double upper = (pair.d12 - delta) * static_cast<double>(n);
  double lower = -(pair.d21 - delta) * static_cast<double>(n);
  return run_sprt_thresholds(pair, upper, lower, next_sample, cap);
}

TestOutcome run_two_phase_test(const TwoPhaseTestConfig& config,
                               const std::function<int()>& next_sample) {
  const HtPair& pair = config.pair;
  std::vector<std::uint64_t> counts(pair.p1.size(), 0);
  for (int i = 0; i < config.n; ++i) {
    int s = next_sample();
    if (s < 0 || s >= static_cast<int>(counts.size()))
      throw std::invalid_argument("run_two_phase_test: symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  double mean1 = mean_llr(counts, pair.llr, config.n);
  if (mean1 >= config.alpha1) return {Decision::h1, config.n};
  if (mean1 <= config.beta1) return {Decision::h2, config.n};
  std::int64_t total = static_cast<std::int64_t>(config.k) * config.n;
  for (std::int64_t i = config.n; i < total; ++i) {
    int s = next_sample();
    if (s < 0 || s >= static_cast<int>(counts.size()))
      throw std::invalid_argument("run_two_phase_test: symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  double mean_all = mean_llr(counts, pair.llr, total);
  return {mean_all >= config.alpha ? Decision::h1 : Decision::h2, total};
}

namespace {

// log-pmf of Binomial(m, q) at every count, natural log.
std::vector<double> binomial_log_pmf(int m, double q) {
  std::vector<double> lp(static_cast<std::size_t>(m) + 1, -kInf);
  if (q <= 0.0) {
    lp[0] = 0.0;
    return lp;
  }
  if (q >= 1.0) {
    lp[static_cast<std::size_t>(m)] = 0.0;
    return lp;
  }
  double lq = std::log(q), l1q = std::log1p(-q);
  double lgm = std::lgamma(static_cast<double>(m) + 1.0);
  for (int c = 0; c <= m; ++c) {
    lp[static_cast<std::size_t>(c)] =
        lgm - std::lgamma(static_cast<double>(c) + 1.0) -
        std::lgamma(static_cast<double>(m - c) + 1.0) +
        static_cast<double>(c) * lq + static_cast<double>(m - c) * l1q;
  }
  return lp;
}

double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

ExactResult exact_binary_oracle(const TwoPhaseTestConfig& config) {
  const HtPair& pair = config.pair;
  if (pair.p1.size() != 2)
    throw std::invalid_argument("exact_binary_oracle: binary alphabets only");
  const int n = config.n;
  const int n2 = (config.k - 1) * n;
  const std::int64_t total = static_cast<std::int64_t>(config.k) * n;
  const double llr0 = pair.llr[0], llr1 = pair.llr[1];

  // Mean statistics written exactly as the simulator computes them, so the
  // oracle and the sampled test agree on every lattice point.
  auto mean_phase1 = [&](int ones) {
    double sum = static_cast<double>(n - ones) * llr0 + static_cast<double>(ones) * llr1;
    return sum / static_cast<double>(n);
  };
  auto mean_total = [&](std::int64_t ones) {
    double sum = static_cast<double>(total - ones) * llr0 +
                 static_cast<double>(ones) * llr1;
    return sum / static_cast<double>(total);
  };

  ExactResult out{};
  for (int hyp = 1; hyp <= 2; ++hyp) {
    double q = hyp == 1 ? pair.p1[1] : pair.p2[1];
    std::vector<double> lp1 = binomial_log_pmf(n, q);
    std::vector<double> lp2 = binomial_log_pmf(n2, q);
    // prefix[j] = log P(phase2 ones <= j), suffix[j] = log P(phase2 ones >= j)
    std::vector<double> prefix(static_cast<std::size_t>(n2) + 1, -kInf);
    std::vector<double> suffix(static_cast<std::size_t>(n2) + 2, -kInf);
    double acc = -kInf;
    for (int j = 0; j <= n2; ++j) {
      acc = log_add(acc, lp2[static_cast<std::size_t>(j)]);
      prefix[static_cast<std::size_t>(j)] = acc;
    }
    acc = -kInf;
    for (int j = n2; j >= 0; --j) {
      acc = log_add(acc, lp2[static_cast<std::size_t>(j)]);
      suffix[static_cast<std::size_t>(j)] = acc;
    }

    double lerr = -kInf, lcont = -kInf, lcorrect = -kInf;
    auto credit = [&](Decision d, double logp) {
      bool correct = (hyp == 1) == (d == Decision::h1);
      if (correct)
        lcorrect = log_add(lcorrect, logp);
      else
        lerr = log_add(lerr, logp);
    };
    for (int k1 = 0; k1 <= n; ++k1) {
      double lp = lp1[static_cast<std::size_t>(k1)];
      if (std::isinf(lp) && lp < 0) continue;
      double m1 = mean_phase1(k1);
      if (m1 >= config.alpha1) {
        credit(Decision::h1, lp);
        continue;
      }
      if (m1 <= config.beta1) {
        credit(Decision::h2, lp);
        continue;
      }
      lcont = log_add(lcont, lp);
      // Phase 2 over all k*n samples; the decision is monotone in the total
      // ones count, so a single cut j* splits the phase-2 binomial.
      double lh1 = -kInf, lh2 = -kInf;
      if (llr1 > llr0) {
        int lo = 0, hi = n2 + 1;  // first j with mean_total(k1 + j) >= alpha
        while (lo < hi) {
          int mid = lo + (hi - lo) / 2;
          if (mean_total(k1 + mid) >= config.alpha)
            hi = mid;
          else
            lo = mid + 1;
        }
        lh1 = lo <= n2 ? suffix[static_cast<std::size_t>(lo)] : -kInf;
        lh2 = lo >= 1 ? prefix[static_cast<std::size_t>(lo - 1)] : -kInf;
      } else if (llr1 < llr0) {
        int lo = 0, hi = n2 + 1;  // first j with mean_total(k1 + j) < alpha
        while (lo < hi) {
          int mid = lo + (hi - lo) / 2;
          if (mean_total(k1 + mid) < config.alpha)
            hi = mid;
          else
            lo = mid + 1;
        }
        lh1 = lo >= 1 ? prefix[static_cast<std::size_t>(lo - 1)] : -kInf;
        lh2 = lo <= n2 ? suffix[static_cast<std::size_t>(lo)] : -kInf;
      } else {
        if (mean_total(k1) >= config.alpha)
          lh1 = 0.0;
        else
          lh2 = 0.0;
      }
      if (!(std::isinf(lh1) && lh1 < 0)) credit(Decision::h1, lp + lh1);
      if (!(std::isinf(lh2) && lh2 < 0)) credit(Decision::h2, lp + lh2);
    }

    double lmass = log_add(lerr, lcorrect);
    if (std::abs(std::expm1(lmass)) > 1e-10)
      throw std::logic_error("exact_binary_oracle: probability mass check failed");

    double err_lin = std::exp(lerr);
    double cont_lin = std::exp(lcont);
    if (hyp == 1) {
      out.p1_err = err_lin;
      out.p1_continue = cont_lin;
      out.log2_p1_err = lerr / kLn2;
      out.log2_p1_continue = lcont / kLn2;
    } else {
      out.p2_err = err_lin;
      out.p2_continue = cont_lin;
      out.log2_p2_err = lerr / kLn2;
      out.log2_p2_continue = lcont / kLn2;
    }
  }
  return out;
}

double HtSimReport::err_freq(Hypothesis h) const {
  const HypothesisReport& r = per(h);
  return r.trials ? static_cast<double>(r.err_count) / static_cast<double>(r.trials) : 0.0;
}

double HtSimReport::continue_freq(Hypothesis h) const {
  const HypothesisReport& r = per(h);
  return r.trials ? static_cast<double>(r.continue_count) / static_cast<double>(r.trials)
                  : 0.0;
}

double HtSimReport::mean_tau(Hypothesis h) const {
  const HypothesisReport& r = per(h);
  return r.trials ? static_cast<double>(r.sum_tau) / static_cast<double>(r.trials) : 0.0;
}

HtSimReport monte_carlo_ht(const TwoPhaseTestConfig& config, std::uint64_t trials,
                           std::uint64_t seed) {
  HtSimReport report;
  report.seed = seed;
  const unsigned threads = detail::thread_count();
  for (int hyp = 1; hyp <= 2; ++hyp) {
    const Distribution& truth = hyp == 1 ? config.pair.p1 : config.pair.p2;
    std::vector<double> cdf = make_cdf(truth.probs());
    std::vector<HypothesisReport> partial(64);
    detail::run_chunked(trials, threads, [&](std::uint64_t b, std::uint64_t e, unsigned c) {
      HypothesisReport& acc = partial[c];
      for (std::uint64_t t = b; t < e; ++t) {
        auto eng = substream(seed, static_cast<std::uint64_t>(hyp), t);
        auto next = [&]() { return static_cast<int>(sample_cdf(eng, cdf)); };
        TestOutcome o = run_two_phase_test(config, next);
        ++acc.trials;
        bool correct = (hyp == 1) == (o.decision == Decision::h1);
        if (!correct) ++acc.err_count;
        if (o.tau > config.n) ++acc.continue_count;
        acc.sum_tau += static_cast<std::uint64_t>(o.tau);
        ++acc.tau_histogram[o.tau];
      }
    });
    HypothesisReport merged;
    for (const HypothesisReport& p : partial) {
      merged.trials += p.trials;
      merged.err_count += p.err_count;
      merged.continue_count += p.continue_count;
      merged.sum_tau += p.sum_tau;
      for (const auto& [tau, cnt] : p.tau_histogram) merged.tau_histogram[tau] += cnt;
    }
    (hyp == 1 ? report.h1 : report.h2) = std::move(merged);
  }
  return report;
}

namespace {
ExponentFit fit_from(const std::vector<double>& ns, const std::vector<double>& neglogs,
                     int dropped) {
  if (ns.size() < 3)
    throw std::invalid_argument("empirical_exponent: need at least 3 usable points");
  LineFit fit = least_squares(ns, neglogs);
  return {fit.slope, dropped};
}
}  // namespace

ExponentFit empirical_exponent(const std::vector<std::pair<double, double>>& n_vs_prob) {
  std::vector<double> ns, ys;
  int dropped = 0;
  for (const auto& [n, p] : n_vs_prob) {
    if (!(p > 0.0)) {
      ++dropped;
      continue;
    }
    ns.push_back(n);
    ys.push_back(-std::log2(p));
  }
  return fit_from(ns, ys, dropped);
}

ExponentFit empirical_exponent_log2(
    const std::vector<std::pair<double, double>>& n_vs_log2prob) {
  std::vector<double> ns, ys;
  int dropped = 0;
  for (const auto& [n, l2p] : n_vs_log2prob) {
    if (std::isinf(l2p) || std::isnan(l2p)) {
      ++dropped;
      continue;
    }
    ns.push_back(n);
    ys.push_back(-l2p);
  }
  return fit_from(ns, ys, dropped);
}

}  // namespace aflx
