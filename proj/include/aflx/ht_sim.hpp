#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "aflx/ht.hpp"

namespace aflx {

enum class Hypothesis : int { h1 = 1, h2 = 2 };
enum class Decision : int { h1 = 1, h2 = 2 };

// Two-phase test: n samples, thresholds alpha1/beta1 on the normalized LLR;
// the undecided band triggers a second phase of (k-1) n further samples and a
// final threshold alpha. Thresholds derive from gamma and the phase-two tilt.
struct TwoPhaseTestConfig {
  HtPair pair;
  int n;
  int k;
  double gamma;
  double lambda;  // phase-two tilt
  double alpha1;  // accept-H1 threshold after phase one
  double beta1;   // accept-H2 threshold after phase one
  double alpha;   // final threshold on all k*n samples

  TwoPhaseTestConfig(HtPair pair, int n, int k, double gamma, double lambda);
};

struct TestOutcome {
  Decision decision;
  std::int64_t tau;
};

// Decides against `threshold` on the mean LLR of the first n samples.
TestOutcome run_fixed_length_test(const HtPair& pair, int n, double threshold,
                                  const std::vector<int>& samples);

struct SprtOutcome {
  Decision decision;
  std::int64_t tau;
  bool capped;  // sample cap hit before either threshold
};

// Sequential ratio test on the cumulative (unnormalized) LLR in bits.
// Upper crossing decides H1, lower crossing decides H2; ties favor H1.
SprtOutcome run_sprt_thresholds(const HtPair& pair, double upper, double lower,
                                const std::function<int()>& next_sample,
                                std::int64_t cap = 1000000);

// Drift-margin parameterization: upper = (d12 - delta) n, lower = -(d21 - delta) n.
SprtOutcome run_sprt(const HtPair& pair, int n, double delta,
                     const std::function<int()>& next_sample,
                     std::int64_t cap = 1000000);

// Runs one two-phase test, drawing samples from next_sample.
TestOutcome run_two_phase_test(const TwoPhaseTestConfig& config,
                               const std::function<int()>& next_sample);

// Exact outcome probabilities for binary alphabets, computed by
// sufficient-statistic enumeration in the log domain. The log2 fields stay
// meaningful far below double underflow.
struct ExactResult {
  double p1_err, p2_err;
  double p1_continue, p2_continue;
  double log2_p1_err, log2_p2_err;
  double log2_p1_continue, log2_p2_continue;
};
ExactResult exact_binary_oracle(const TwoPhaseTestConfig& config);

struct HypothesisReport {
  std::uint64_t trials = 0;
  std::uint64_t err_count = 0;
  std::uint64_t continue_count = 0;
  std::uint64_t sum_tau = 0;
  std::map<std::int64_t, std::uint64_t> tau_histogram;
};

struct HtSimReport {
  HypothesisReport h1, h2;
  std::uint64_t seed = 0;

  const HypothesisReport& per(Hypothesis h) const {
    return h == Hypothesis::h1 ? h1 : h2;
  }
  double err_freq(Hypothesis h) const;
  double continue_freq(Hypothesis h) const;
  double mean_tau(Hypothesis h) const;
};

// Seeded Monte Carlo under both hypotheses. Each trial owns an RNG substream
// keyed by its index, so aggregates do not depend on thread count (set via
// the AFLX_THREADS environment variable).
HtSimReport monte_carlo_ht(const TwoPhaseTestConfig& config, std::uint64_t trials,
                           std::uint64_t seed);

struct ExponentFit {
  double slope;
  int dropped;  // zero-probability points removed before the fit
};

// Least-squares slope of -log2(p) against n; needs >= 3 usable points.
ExponentFit empirical_exponent(const std::vector<std::pair<double, double>>& n_vs_prob);
// Same fit with log2-probabilities supplied directly (deep-tail safe).
ExponentFit empirical_exponent_log2(
    const std::vector<std::pair<double, double>>& n_vs_log2prob);

}  // namespace aflx
