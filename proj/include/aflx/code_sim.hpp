#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "aflx/dmc.hpp"

namespace aflx {

// Parameter choice for the two-phase code at a target retransmission
// exponent. degenerate=true means a plain fixed-length code (alpha = 1, no
// verification phase) is the selected strategy.
struct SelectedParams {
  double alpha;
  double lambda;
  bool degenerate;
};
SelectedParams select_parameters(const Channel& ch, double rate, double gamma);

// Desk-scale two-phase code configuration. Phase one carries ceil(alpha*ell)
// channel uses of an i.i.d. random codebook; the remaining uses verify the
// decoder's estimate with the extremal input pair; a failed verification
// triggers a fresh (k-1)*ell-use retransmission, for k*ell uses total.
class CodeConfig {
 public:
  CodeConfig(Channel ch, double rate, int ell, double alpha, double lambda,
             double gamma, int k, Distribution input_dist, std::uint64_t seed);

  const Channel& channel() const { return ch_; }
  double rate() const { return rate_; }
  int ell() const { return ell_; }
  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }
  int k() const { return k_; }
  const Distribution& input_dist() const { return input_dist_; }
  std::uint64_t seed() const { return seed_; }

  int m1() const { return m1_; }
  int m2() const { return m2_; }
  int message_count() const { return message_count_; }
  std::size_t ack_input() const { return ack_input_; }
  std::size_t nack_input() const { return nack_input_; }
  double verify_threshold() const { return verify_threshold_; }
  // log2 W(y | x) table used by the maximum-likelihood decoder.
  const std::vector<Vec>& log_w() const { return log_w_; }
  // Per-output log2 W(y|ack) - log2 W(y|nack); +-inf marks one-sided support.
  const Vec& verify_llr() const { return verify_llr_; }

 private:
  Channel ch_;
  double rate_;
  int ell_;
  double alpha_;
  double lambda_;
  double gamma_;
  int k_;
  Distribution input_dist_;
  std::uint64_t seed_;
  int m1_, m2_, message_count_;
  std::size_t ack_input_ = 0, nack_input_ = 0;
  double verify_threshold_ = 0.0;
  std::vector<Vec> log_w_;
  Vec verify_llr_;
};

struct TrialResult {
  bool error = false;
  bool retransmit = false;
  bool phase1_error = false;
  bool ack_given_wrong = false;
  bool nack_given_correct = false;
  bool phase2_error = false;
  std::int64_t tau = 0;
};

// One independent trial: fresh codebooks, fresh noise, all drawn from the
// trial's own RNG substream.
TrialResult run_code_trial(const CodeConfig& config, std::uint64_t trial_index);

struct CodeSimReport {
  std::uint64_t trials = 0;
  std::uint64_t error_count = 0;
  std::uint64_t retransmit_count = 0;
  std::uint64_t phase1_error_count = 0;
  std::uint64_t ack_given_wrong_count = 0;
  std::uint64_t nack_given_correct_count = 0;
  std::uint64_t phase2_error_count = 0;
  std::uint64_t sum_tau = 0;
  std::uint64_t sum_tau_sq = 0;
  std::uint64_t seed = 0;
  std::map<std::int64_t, std::uint64_t> tau_histogram;

  double error_freq() const;
  double retransmit_freq() const;
  double mean_tau() const;
};

// Seeded Monte Carlo over independent trials; thread count comes from
// AFLX_THREADS and never changes the aggregate.
CodeSimReport monte_carlo_code(const CodeConfig& config, std::uint64_t trials);

// Fixed-length random-coding baseline at the same rate and block length:
// single phase, no verification, tau = ell always.
CodeSimReport run_flf_baseline(const Channel& ch, double rate, int ell,
                               const Distribution& input_dist, std::uint64_t trials,
                               std::uint64_t seed);

}  // namespace aflx
