#include "aflx/code_sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aflx/exponents.hpp"
#include "aflx/rng.hpp"
#include "parallel.hpp"

namespace aflx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kStreamCode = 0xC0DEu;
constexpr std::uint64_t kStreamFlf = 0xF1F0u;

// ceil(2^{ell * rate}) with a snap to the nearest integer exponent, so a rate
// like 3/ell does not round up to one extra message from floating dust.
int message_count_for(double rate, int ell) {
  double bits = rate * static_cast<double>(ell);
  double rounded = std::nearbyint(bits);
  if (std::abs(bits - rounded) < 1e-9) bits = rounded;
  double m = std::ceil(std::exp2(bits));
  if (m < 2.0) m = 2.0;
  // Reject before the int cast; huge rate*ell would overflow it.
  if (!(m <= 4096.0))
    throw std::invalid_argument("message count above the 4096 cap");
  return static_cast<int>(m);
}
}  // namespace

SelectedParams select_parameters(const Channel& ch, double rate, double gamma) {
  double cap = er_cache(ch).capacity_bits();
  if (!(rate > 0.0 && rate < cap))
    throw std::domain_error("select_parameters: rate outside (0, capacity)");
  if (!(gamma >= 0.0)) throw std::invalid_argument("select_parameters: gamma must be >= 0");
  if (gamma == 0.0) {
    // Any phase-one rate strictly inside (rate, capacity) works; back off 1%
    // from capacity, with a midpoint fallback for rates already that close.
    double alpha = rate / (0.99 * cap);
    if (alpha >= 1.0) alpha = 0.5 * (1.0 + rate / cap);
    return {alpha, 0.0, false};
  }
  double er_rate = random_coding_exponent(ch, rate);
  if (gamma >= er_rate) return {1.0, 0.0, true};
  AflfBound bound = aflf_lower_bound(ch, rate, gamma, 2);
  if (!bound.feasible) return {1.0, 0.0, true};
  return {bound.alpha, bound.lambda, false};
}

CodeConfig::CodeConfig(Channel ch, double rate, int ell, double alpha, double lambda,
                       double gamma, int k, Distribution input_dist,
                       std::uint64_t seed)
    : ch_(std::move(ch)),
      rate_(rate),
      ell_(ell),
      alpha_(alpha),
      lambda_(lambda),
      gamma_(gamma),
      k_(k),
      input_dist_(std::move(input_dist)),
      seed_(seed) {
  if (!(rate_ > 0.0)) throw std::invalid_argument("CodeConfig: rate must be > 0");
  if (ell_ < 2 || ell_ > 128)
    throw std::invalid_argument("CodeConfig: ell outside [2, 128]");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0))
    throw std::invalid_argument("CodeConfig: alpha outside (0, 1]");
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0))
    throw std::invalid_argument("CodeConfig: lambda outside [0, 1]");
  if (!(gamma_ >= 0.0)) throw std::invalid_argument("CodeConfig: gamma must be >= 0");
  if (k_ < 2) throw std::invalid_argument("CodeConfig: k must be >= 2");
  if (input_dist_.size() != ch_.nx())
    throw std::invalid_argument("CodeConfig: input distribution size mismatch");

  message_count_ = message_count_for(rate_, ell_);
  if (message_count_ > 4096)
    throw std::invalid_argument("CodeConfig: message count above the 4096 cap");

  if (alpha_ == 1.0) {
    m1_ = ell_;
    m2_ = 0;
  } else {
    m1_ = static_cast<int>(std::ceil(alpha_ * static_cast<double>(ell_)));
    if (m1_ < 1) m1_ = 1;
    m2_ = ell_ - m1_;
    if (m2_ < 1)
      throw std::invalid_argument(
          "CodeConfig: alpha leaves no verification uses at this ell");
  }

  log_w_.assign(ch_.nx(), Vec(ch_.ny(), -kInf));
  for (std::size_t x = 0; x < ch_.nx(); ++x)
    for (std::size_t y = 0; y < ch_.ny(); ++y)
      if (ch_.w(x, y) > 0.0) log_w_[x][y] = std::log2(ch_.w(x, y));

  C1Result c1 = c1_and_extremal_inputs(ch_);
  ack_input_ = c1.x;
  nack_input_ = c1.x_prime;
  verify_llr_.assign(ch_.ny(), 0.0);
  for (std::size_t y = 0; y < ch_.ny(); ++y) {
    double wa = ch_.w(ack_input_, y), wn = ch_.w(nack_input_, y);
    if (wa > 0.0 && wn > 0.0)
      verify_llr_[y] = std::log2(wa / wn);
    else if (wa > 0.0)
      verify_llr_[y] = kInf;
    else if (wn > 0.0)
      verify_llr_[y] = -kInf;
  }
  if (m2_ > 0) {
    // Verification threshold from the tilted family between the extremal
    // rows; disjoint rows cannot carry a finite threshold.
    Distribution row_a(ch_.row(ack_input_));
    Distribution row_n(ch_.row(nack_input_));
    Distribution tilt = tilted_distribution(row_a, row_n, lambda_);
    verify_threshold_ = kl_divergence(tilt, row_n) - kl_divergence(tilt, row_a);
  }
}

namespace {

// Draws a fresh i.i.d. codebook (message-major) and returns the ML estimate
// for the received block. Ties resolve to the smallest message index.
struct MlWorkspace {
  std::vector<std::size_t> codebook;  // message_count * block_len symbols
  std::vector<std::size_t> received;
};

std::size_t transmit_and_decode(const CodeConfig& cfg, std::mt19937_64& eng,
                                const std::vector<double>& input_cdf,
                                std::vector<std::vector<double>>& out_cdfs,
                                std::size_t message, int block_len,
                                MlWorkspace& ws) {
  const int m_count = cfg.message_count();
  ws.codebook.resize(static_cast<std::size_t>(m_count) * block_len);
  for (std::size_t i = 0; i < ws.codebook.size(); ++i)
    ws.codebook[i] = sample_cdf(eng, input_cdf);
  ws.received.resize(static_cast<std::size_t>(block_len));
  const std::size_t* truth = &ws.codebook[message * static_cast<std::size_t>(block_len)];
  for (int t = 0; t < block_len; ++t)
    ws.received[static_cast<std::size_t>(t)] =
        sample_cdf(eng, out_cdfs[truth[t]]);
  const auto& log_w = cfg.log_w();
  double best = -kInf;
  std::size_t best_m = 0;
  for (int m = 0; m < m_count; ++m) {
    const std::size_t* cw = &ws.codebook[static_cast<std::size_t>(m) * block_len];
    double ll = 0.0;
    for (int t = 0; t < block_len; ++t)
      ll += log_w[cw[t]][ws.received[static_cast<std::size_t>(t)]];
    if (ll > best) {
      best = ll;
      best_m = static_cast<std::size_t>(m);
    }
  }
  return best_m;
}

std::vector<std::vector<double>> output_cdfs(const Channel& ch) {
  std::vector<std::vector<double>> cdfs(ch.nx());
  for (std::size_t x = 0; x < ch.nx(); ++x) cdfs[x] = make_cdf(ch.row(x));
  return cdfs;
}

}  // namespace

TrialResult run_code_trial(const CodeConfig& cfg, std::uint64_t trial_index) {
  auto eng = substream(cfg.seed(), kStreamCode, trial_index);
  std::vector<double> input_cdf = make_cdf(cfg.input_dist().probs());
  auto out_cdfs = output_cdfs(cfg.channel());
  MlWorkspace ws;

  TrialResult res;
  std::size_t message = uniform_below(eng, static_cast<std::uint64_t>(cfg.message_count()));
  std::size_t est = transmit_and_decode(cfg, eng, input_cdf, out_cdfs, message,
                                        cfg.m1(), ws);
  res.phase1_error = est != message;

  if (cfg.m2() == 0) {  // plain fixed-length code
    res.error = res.phase1_error;
    res.tau = cfg.ell();
    return res;
  }

  // Verification: the encoder knows the decoder's estimate and sends the
  // ack input when it matches, the nack input otherwise.
  std::size_t sent = res.phase1_error ? cfg.nack_input() : cfg.ack_input();
  double sum = 0.0;
  int plus_inf = 0, minus_inf = 0;
  const Vec& vllr = cfg.verify_llr();
  for (int t = 0; t < cfg.m2(); ++t) {
    std::size_t y = sample_cdf(eng, out_cdfs[sent]);
    double v = vllr[y];
    if (std::isinf(v)) {
      if (v > 0.0)
        ++plus_inf;
      else
        ++minus_inf;
    } else {
      sum += v;
    }
  }
  bool ack;
  if (minus_inf > 0)
    ack = false;  // an output impossible under the ack input: certain nack
  else if (plus_inf > 0)
    ack = true;  // an output impossible under the nack input: certain ack
  else
    ack = sum / static_cast<double>(cfg.m2()) >= cfg.verify_threshold();

  if (ack) {
    res.error = res.phase1_error;
    res.ack_given_wrong = res.phase1_error;
    res.tau = cfg.ell();
    return res;
  }

  res.retransmit = true;
  res.nack_given_correct = !res.phase1_error;
  int block2 = (cfg.k() - 1) * cfg.ell();
  std::size_t est2 = transmit_and_decode(cfg, eng, input_cdf, out_cdfs, message,
                                         block2, ws);
  res.phase2_error = est2 != message;
  res.error = res.phase2_error;
  res.tau = static_cast<std::int64_t>(cfg.k()) * cfg.ell();
  return res;
}

double CodeSimReport::error_freq() const {
  return trials ? static_cast<double>(error_count) / static_cast<double>(trials) : 0.0;
}
double CodeSimReport::retransmit_freq() const {
  return trials ? static_cast<double>(retransmit_count) / static_cast<double>(trials)
                : 0.0;
}
double CodeSimReport::mean_tau() const {
  return trials ? static_cast<double>(sum_tau) / static_cast<double>(trials) : 0.0;
}

namespace {
CodeSimReport accumulate_trials(std::uint64_t trials, std::uint64_t seed,
                                const std::function<TrialResult(std::uint64_t)>& one) {
  CodeSimReport report;
  report.seed = seed;
  std::vector<CodeSimReport> partial(64);
  detail::run_chunked(trials, detail::thread_count(),
                      [&](std::uint64_t b, std::uint64_t e, unsigned c) {
                        CodeSimReport& acc = partial[c];
                        for (std::uint64_t t = b; t < e; ++t) {
                          TrialResult r = one(t);
                          ++acc.trials;
                          acc.error_count += r.error;
                          acc.retransmit_count += r.retransmit;
                          acc.phase1_error_count += r.phase1_error;
                          acc.ack_given_wrong_count += r.ack_given_wrong;
                          acc.nack_given_correct_count += r.nack_given_correct;
                          acc.phase2_error_count += r.phase2_error;
                          std::uint64_t tau = static_cast<std::uint64_t>(r.tau);
                          acc.sum_tau += tau;
                          acc.sum_tau_sq += tau * tau;
                          ++acc.tau_histogram[r.tau];
                        }
                      });
  for (const CodeSimReport& p : partial) {
    report.trials += p.trials;
    report.error_count += p.error_count;
    report.retransmit_count += p.retransmit_count;
    report.phase1_error_count += p.phase1_error_count;
    report.ack_given_wrong_count += p.ack_given_wrong_count;
    report.nack_given_correct_count += p.nack_given_correct_count;
    report.phase2_error_count += p.phase2_error_count;
    report.sum_tau += p.sum_tau;
    report.sum_tau_sq += p.sum_tau_sq;
    for (const auto& [tau, cnt] : p.tau_histogram) report.tau_histogram[tau] += cnt;
  }
  return report;
}
}  // namespace

CodeSimReport monte_carlo_code(const CodeConfig& config, std::uint64_t trials) {
  CodeSimReport report = accumulate_trials(
      trials, config.seed(),
      [&config](std::uint64_t t) { return run_code_trial(config, t); });
  for (const auto& [tau, cnt] : report.tau_histogram) {
    (void)cnt;
    if (tau != config.ell() &&
        tau != static_cast<std::int64_t>(config.k()) * config.ell())
      throw std::logic_error("monte_carlo_code: stopping time off the two-point support");
  }
  return report;
}

CodeSimReport run_flf_baseline(const Channel& ch, double rate, int ell,
                               const Distribution& input_dist, std::uint64_t trials,
                               std::uint64_t seed) {
  if (!(rate > 0.0)) throw std::invalid_argument("run_flf_baseline: rate must be > 0");
  if (ell < 2 || ell > 128)
    throw std::invalid_argument("run_flf_baseline: ell outside [2, 128]");
  if (input_dist.size() != ch.nx())
    throw std::invalid_argument("run_flf_baseline: input distribution size mismatch");
  int m_count = message_count_for(rate, ell);
  if (m_count > 4096)
    throw std::invalid_argument("run_flf_baseline: message count above the 4096 cap");
  std::vector<Vec> log_w(ch.nx(), Vec(ch.ny(), -kInf));
  for (std::size_t x = 0; x < ch.nx(); ++x)
    for (std::size_t y = 0; y < ch.ny(); ++y)
      if (ch.w(x, y) > 0.0) log_w[x][y] = std::log2(ch.w(x, y));
  std::vector<double> input_cdf = make_cdf(input_dist.probs());
  auto out_cdfs = output_cdfs(ch);

  auto one = [&](std::uint64_t trial) {
    auto eng = substream(seed, kStreamFlf, trial);
    std::size_t message = uniform_below(eng, static_cast<std::uint64_t>(m_count));
    std::vector<std::size_t> codebook(static_cast<std::size_t>(m_count) * ell);
    for (auto& s : codebook) s = sample_cdf(eng, input_cdf);
    std::vector<std::size_t> received(static_cast<std::size_t>(ell));
    const std::size_t* truth = &codebook[message * static_cast<std::size_t>(ell)];
    for (int t = 0; t < ell; ++t)
      received[static_cast<std::size_t>(t)] = sample_cdf(eng, out_cdfs[truth[t]]);
    double best = -kInf;
    std::size_t best_m = 0;
    for (int m = 0; m < m_count; ++m) {
      const std::size_t* cw = &codebook[static_cast<std::size_t>(m) * ell];
      double ll = 0.0;
      for (int t = 0; t < ell; ++t) ll += log_w[cw[t]][received[static_cast<std::size_t>(t)]];
      if (ll > best) {
        best = ll;
        best_m = static_cast<std::size_t>(m);
      }
    }
    TrialResult res;
    res.error = best_m != message;
    res.phase1_error = res.error;
    res.tau = ell;
    return res;
  };
  return accumulate_trials(trials, seed, one);
}

}  // namespace aflx
