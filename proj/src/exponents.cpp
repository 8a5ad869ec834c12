#include "aflx/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "aflx/rng.hpp"

namespace aflx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoCap = 1000.0;

double e0_raw(const Channel& ch, const Vec& q, double rho) {
  const std::size_t nx = ch.nx(), ny = ch.ny();
  const double inv = 1.0 / (1.0 + rho);
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double inner = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      double w = ch.w(x, y);
      if (w > 0.0 && q[x] > 0.0) inner += q[x] * std::pow(w, inv);
    }
    if (inner > 0.0) total += std::pow(inner, 1.0 + rho);
  }
  return -std::log2(total);
}

// Coordinate ascent over the input simplex: repeatedly moves mass between
// input pairs by a 1-D golden search until a full sweep gains nothing.
double e0_ascend(const Channel& ch, Vec q, double rho) {
  const std::size_t nx = ch.nx();
  double cur = e0_raw(ch, q, rho);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double start = cur;
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < nx; ++j) {
        if (i == j) continue;
        double lo = -q[i], hi = q[j];
        if (hi - lo < 1e-15) continue;
        auto f = [&](double t) {
          Vec qt = q;
          qt[i] += t;
          qt[j] -= t;
          return e0_raw(ch, qt, rho);
        };
        double best_val;
        double t = golden_max(f, lo, hi, 1e-12, &best_val);
        if (best_val > cur) {
          q[i] += t;
          q[j] -= t;
          cur = best_val;
        }
      }
    }
    if (cur - start < 1e-12) break;
  }
  return cur;
}

double e0_maximized_impl(const Channel& ch, double rho) {
  const std::size_t nx = ch.nx();
  if (is_symmetric(ch)) {
    Vec q(nx, 1.0 / static_cast<double>(nx));
    return e0_raw(ch, q, rho);
  }
  double best = e0_ascend(ch, Vec(nx, 1.0 / static_cast<double>(nx)), rho);
  // A few deterministic random restarts guard against poor basins.
  for (std::uint64_t r = 0; r < 5; ++r) {
    auto eng = substream(0x5EEDu, 0xE0u, r);
    Vec q(nx);
    double z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      q[x] = -std::log(1.0 - uniform01(eng));
      z += q[x];
    }
    for (double& v : q) v /= z;
    best = std::max(best, e0_ascend(ch, std::move(q), rho));
  }
  return best;
}

// max over rho in [lo, hi] of e0f(rho) - rho * rate, endpoints included.
double rate_objective_max(const std::function<double(double)>& e0f, double rate,
                          double lo, double hi, double* arg = nullptr) {
  auto f = [&](double rho) { return e0f(rho) - rho * rate; };
  double best_val;
  double best_x = golden_max(f, lo, hi, 1e-12, &best_val);
  if (arg) *arg = best_x;
  return best_val;
}

double er_from(const std::function<double(double)>& e0f, double rate, double cap) {
  if (rate >= cap) return 0.0;
  double v = rate_objective_max(e0f, rate, 0.0, 1.0);
  return v > 0.0 ? v : 0.0;
}

}  // namespace

double gallager_e0(const Channel& ch, const Distribution& q, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("gallager_e0: rho outside [0, 1]");
  if (q.size() != ch.nx()) throw std::invalid_argument("gallager_e0: input size mismatch");
  return e0_raw(ch, q.probs(), rho);
}

double e0_input_maximized(const Channel& ch, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("e0_input_maximized: rho must be >= 0");
  return e0_maximized_impl(ch, rho);
}

ErCache::ErCache(const Channel& ch, int grid_points) {
  if (grid_points < 16) throw std::invalid_argument("ErCache: grid too small");
  cap_ = capacity(ch);
  std::function<double(double)> e0f;
  MonotoneCubic e0_table;
  if (is_symmetric(ch)) {
    const std::size_t nx = ch.nx();
    Vec q(nx, 1.0 / static_cast<double>(nx));
    e0f = [&ch, q](double rho) { return e0_raw(ch, q, rho); };
  } else {
    // Tabulate the input-maximized E0 once; per-rate searches then reuse it.
    const int m = 257;
    std::vector<double> rhos(m), vals(m);
    for (int i = 0; i < m; ++i) {
      rhos[i] = static_cast<double>(i) / (m - 1);
      vals[i] = e0_maximized_impl(ch, rhos[i]);
    }
    e0_table = MonotoneCubic(std::move(rhos), std::move(vals));
    e0f = [e0_table](double rho) { return e0_table(rho); };
  }
  const int n = grid_points;
  std::vector<double> rates(n), ers(n);
  for (int i = 0; i < n; ++i) {
    rates[i] = cap_ * static_cast<double>(i) / (n - 1);
    ers[i] = er_from(e0f, rates[i], cap_);
  }
  er0_ = e0f(1.0);
  ers[0] = er0_;
  ers[n - 1] = 0.0;
  for (int i = 1; i < n; ++i) ers[i] = std::min(ers[i], ers[i - 1]);
  if (cap_ <= 0.0) {
    // Degenerate zero-capacity channel: the curve is identically zero.
    interp_ = MonotoneCubic({0.0, 1.0}, {0.0, 0.0});
    er0_ = 0.0;
    return;
  }
  interp_ = MonotoneCubic(std::move(rates), std::move(ers));
}

double ErCache::operator()(double rate) const {
  if (!(rate >= 0.0)) throw std::domain_error("ErCache: rate must be >= 0");
  if (rate >= cap_) return 0.0;
  double v = interp_(rate);
  return v > 0.0 ? v : 0.0;
}

const ErCache& er_cache(const Channel& ch) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<ErCache>> registry;
  std::lock_guard<std::mutex> lock(mu);
  std::string key = ch.cache_key();
  auto it = registry.find(key);
  if (it == registry.end())
    it = registry.emplace(key, std::make_unique<ErCache>(ch)).first;
  return *it->second;
}

double random_coding_exponent(const Channel& ch, double rate) {
  if (!(rate >= 0.0)) throw std::domain_error("random_coding_exponent: rate must be >= 0");
  double cap = er_cache(ch).capacity_bits();
  if (rate >= cap) return 0.0;
  std::function<double(double)> e0f = [&ch](double rho) {
    return e0_maximized_impl(ch, rho);
  };
  return er_from(e0f, rate, cap);
}

double sphere_packing_exponent(const Channel& ch, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("sphere_packing_exponent: rate must be > 0");
  std::function<double(double)> e0f = [&ch](double rho) {
    return e0_maximized_impl(ch, rho);
  };
  double low = rate_objective_max(e0f, rate, 0.0, 1.0);
  double high = rate_objective_max(e0f, rate, 1.0, kRhoCap);
  double best = std::max(low, high);
  // Still climbing at the rho cap: report the divergence sentinel.
  double f_cap = e0f(kRhoCap) - kRhoCap * rate;
  double f_near = e0f(kRhoCap - 1.0) - (kRhoCap - 1.0) * rate;
  if (f_cap - f_near > 1e-12) return kInf;
  return best > 0.0 ? best : 0.0;
}

double haroutunian_exponent(const Channel& ch, double rate) {
  if (!is_symmetric(ch))
    throw UnsupportedChannelError(
        "haroutunian_exponent: only symmetric channels are supported");
  return sphere_packing_exponent(ch, rate);
}

double burnashev_exponent(const Channel& ch, double rate) {
  double cap = er_cache(ch).capacity_bits();
  if (!(rate >= 0.0 && rate <= cap + 1e-12))
    throw std::domain_error("burnashev_exponent: rate outside [0, capacity]");
  C1Result c1 = c1_and_extremal_inputs(ch);
  if (c1.infinite) return rate >= cap ? 0.0 : kInf;
  if (rate > cap) rate = cap;
  return c1.value * (1.0 - rate / cap);
}

double k_star_channel(const Channel& ch) {
  C1Result c1 = c1_and_extremal_inputs(ch);
  if (c1.infinite) return kInf;
  double er0 = e0_input_maximized(ch, 1.0);
  if (er0 <= 0.0) return kInf;
  return 1.0 + c1.value / er0;
}

double aflf_lower_bound_gamma0(const Channel& ch, double rate, int k) {
  if (k < 2) throw std::invalid_argument("aflf_lower_bound_gamma0: k must be >= 2");
  double cap = er_cache(ch).capacity_bits();
  if (!(rate >= 0.0 && rate <= cap + 1e-12))
    throw std::domain_error("aflf_lower_bound_gamma0: rate outside [0, capacity]");
  double blocks = static_cast<double>(k - 1);
  double tail = blocks * random_coding_exponent(ch, rate / blocks);
  return std::min(burnashev_exponent(ch, rate), tail);
}

double alpha_star(const Channel& ch, double rate, double gamma) {
  const ErCache& er = er_cache(ch);
  double cap = er.capacity_bits();
  if (!(rate > 0.0 && rate < cap))
    throw std::domain_error("alpha_star: rate outside (0, capacity)");
  if (!(gamma > 0.0 && gamma < er(rate)))
    throw std::domain_error("alpha_star: gamma outside (0, E_r(rate))");
  // g(a) = E_r(a)/a falls strictly; solve g(a) = gamma/rate for the phase-one
  // rate a, then alpha = rate/a.
  double target = gamma / rate;
  auto g = [&](double a) { return er(a) / a; };
  double lo = 1e-9, hi = cap - 1e-12;
  double a = bisect_falling(g, lo, hi, target, 1e-13);
  return rate / a;
}

AflfBound aflf_lower_bound(const Channel& ch, double rate, double gamma, int k) {
  if (k < 2) throw std::invalid_argument("aflf_lower_bound: k must be >= 2");
  if (!(gamma >= 0.0)) throw std::invalid_argument("aflf_lower_bound: gamma must be >= 0");
  const ErCache& er = er_cache(ch);
  double cap = er.capacity_bits();
  if (!(rate > 0.0 && rate < cap))
    throw std::domain_error("aflf_lower_bound: rate outside (0, capacity)");

  double er_rate = random_coding_exponent(ch, rate);
  double blocks = static_cast<double>(k - 1);
  double tail = blocks * random_coding_exponent(ch, rate / blocks);

  if (gamma >= er_rate) return {er_rate, true, 1.0, 0.0};

  C1Result c1 = c1_and_extremal_inputs(ch);
  Distribution row_x(ch.row(c1.x));
  Distribution row_xp(ch.row(c1.x_prime));
  double d_back = kl_divergence(row_xp, row_x);

  double alpha_lo = gamma > 0.0 ? alpha_star(ch, rate, gamma) : rate / cap;
  double alpha_hi = 1.0;
  if (gamma > 0.0) {
    alpha_hi = std::isinf(d_back) ? 1.0 - 1e-12 : 1.0 - gamma / d_back;
  }
  if (alpha_lo > alpha_hi + 1e-15) return {er_rate, false, 1.0, 0.0};
  alpha_hi = std::max(alpha_hi, alpha_lo);

  auto d_fwd = [&](double lam) {
    return kl_divergence(tilted_distribution(row_x, row_xp, lam), row_x);
  };
  auto d_rev = [&](double lam) {
    return kl_divergence(tilted_distribution(row_x, row_xp, lam), row_xp);
  };

  // Smallest verification tilt meeting the retransmission constraint at a
  // given alpha; the objective falls in lambda so the smallest is optimal.
  auto lambda_min = [&](double alpha) {
    if (gamma <= 0.0) return 0.0;
    double need = gamma / (1.0 - alpha);
    return bisect_rising(d_fwd, 0.0, 1.0, need - 1e-12, 1e-12);
  };
  auto objective = [&](double alpha) {
    double lam = lambda_min(alpha);
    if (gamma > 0.0 && (1.0 - alpha) * d_fwd(lam) < gamma - 1e-9)
      return -kInf;  // constraint unreachable at this alpha
    // Guard the alpha = 1 corner: d_rev can be +inf there and 0 * inf is NaN.
    double tail_term = alpha < 1.0 ? (1.0 - alpha) * d_rev(lam) : 0.0;
    return alpha * er(rate / alpha) + tail_term;
  };

  // Coarse grid, then golden refinement around the best cell.
  const int grid = 200;
  double best_alpha = alpha_lo, best_val = -kInf;
  for (int i = 0; i < grid; ++i) {
    double a = alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) / (grid - 1);
    double v = objective(a);
    if (v > best_val) {
      best_val = v;
      best_alpha = a;
    }
  }
  double step = (alpha_hi - alpha_lo) / (grid - 1);
  double lo = std::max(alpha_lo, best_alpha - step);
  double hi = std::min(alpha_hi, best_alpha + step);
  double refined_val;
  double refined_alpha = golden_max(objective, lo, hi, 1e-10, &refined_val);
  if (refined_val > best_val) {
    best_val = refined_val;
    best_alpha = refined_alpha;
  }

  double value = std::min(best_val, tail);
  // The no-retransmission strategy is always available, so the bound never
  // drops below the one-shot exponent.
  if (value < er_rate) value = er_rate;
  return {value, true, best_alpha, lambda_min(best_alpha)};
}

CorollaryBounds corollary_bounds(const Channel& ch, double rate) {
  return {random_coding_exponent(ch, rate), burnashev_exponent(ch, rate)};
}

ConverseBound structural_converse(const Channel& ch, double rate, double gamma,
                                  int k, const EeCurve& ee_curve) {
  if (k < 2) throw std::invalid_argument("structural_converse: k must be >= 2");
  double scaled = static_cast<double>(k) *
                  haroutunian_exponent(ch, rate / static_cast<double>(k));
  if (!ee_curve) return {scaled, true};
  return {std::min(ee_curve(rate, gamma), scaled), false};
}

}  // namespace aflx
