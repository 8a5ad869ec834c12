#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aflx/dmc.hpp"
#include "aflx/numerics.hpp"

namespace aflx {

// Gallager function E0(rho, q) in bits. rho must lie in [0, 1] here; the
// input-maximized variant below accepts any rho >= 0.
double gallager_e0(const Channel& ch, const Distribution& q, double rho);

// max over input distributions of E0(rho, .). Uniform input is used for
// symmetric channels; otherwise coordinate ascent on the simplex with a few
// seeded restarts.
double e0_input_maximized(const Channel& ch, double rho);

// Cached random-coding curve on a dense rate grid with monotone-cubic
// interpolation between grid points. Shared by the routines that evaluate the
// curve many times per call (rate-split search, two-phase optimizer).
class ErCache {
 public:
  explicit ErCache(const Channel& ch, int grid_points = 2048);
  double operator()(double rate) const;  // rate >= capacity gives 0
  double capacity_bits() const { return cap_; }
  double at_zero() const { return er0_; }

 private:
  double cap_ = 0.0;
  double er0_ = 0.0;
  MonotoneCubic interp_;
};

// Lazily built per-channel ErCache registry (keyed by the matrix bytes).
const ErCache& er_cache(const Channel& ch);

// Random-coding exponent max_{rho in [0,1]} [E0(rho) - rho rate]; exact
// evaluation, clamped at 0, zero at rates >= capacity.
double random_coding_exponent(const Channel& ch, double rate);

// Sphere-packing exponent sup_{rho in [0, 1000]} [E0(rho) - rho rate].
// Returns +inf when the objective is still increasing at the rho cap
// (low-rate divergence for channels with zero transitions). rate must be > 0.
double sphere_packing_exponent(const Channel& ch, double rate);

// Fixed-composition converse exponent. Equals the sphere-packing exponent on
// symmetric channels, which is the only supported case here; asymmetric
// channels raise UnsupportedChannelError.
double haroutunian_exponent(const Channel& ch, double rate);

// Feedback straight-line bound c1 (1 - rate/capacity). +inf when c1 diverges
// and rate < capacity; exactly 0 at rate == capacity.
double burnashev_exponent(const Channel& ch, double rate);

// 1 + c1 / E_r(0): the block-count scale beyond which the gamma -> 0
// two-phase bound meets the feedback bound. +inf when c1 diverges.
double k_star_channel(const Channel& ch);

// Two-phase lower bound at gamma = 0:
// min{ burnashev, (k-1) E_r(rate/(k-1)) }.
double aflf_lower_bound_gamma0(const Channel& ch, double rate, int k);

// Smallest feasible phase-one fraction: the unique alpha with
// alpha * E_r(rate/alpha) = gamma. Requires 0 < gamma < E_r(rate).
double alpha_star(const Channel& ch, double rate, double gamma);

struct AflfBound {
  double value;
  bool feasible;  // false: constraint set was empty, value fell back to E_r
  double alpha;   // maximizing phase-one fraction (1 when degenerate)
  double lambda;  // maximizing verification tilt (0 when degenerate)
};

// Two-phase error-exponent lower bound at retransmission exponent gamma >= 0,
// k >= 2 blocks. Degenerates to E_r(rate) when gamma >= E_r(rate) and falls
// back to E_r(rate) with feasible=false when no (alpha, lambda) satisfies the
// constraints. Never below E_r(rate).
AflfBound aflf_lower_bound(const Channel& ch, double rate, double gamma, int k);

struct CorollaryBounds {
  double lower;  // E_r(rate)
  double upper;  // c1 (1 - rate/capacity)
};
CorollaryBounds corollary_bounds(const Channel& ch, double rate);

// Optional exact-exponent curve hook for the converse; takes (rate, gamma).
using EeCurve = std::function<double(double, double)>;

struct ConverseBound {
  double value;
  bool partial;  // true when the exact-exponent term was unavailable
};

// Structural upper bound min{ ee_curve(rate, gamma), k * E_H(rate / k) }.
// Without an ee_curve only the second term is returned and `partial` is set.
ConverseBound structural_converse(const Channel& ch, double rate, double gamma,
                                  int k, const EeCurve& ee_curve = nullptr);

struct CurvePoint {
  double rate;
  double exponent;
};
struct ExponentCurve {
  std::string bound_name;
  std::vector<CurvePoint> points;
};

}  // namespace aflx
