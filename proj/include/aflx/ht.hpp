#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aflx/dmc.hpp"

namespace aflx {

// A simple-vs-simple testing problem. Both hypotheses must share support
// (finite log-likelihood ratios and finite KL in both directions).
struct HtPair {
  Distribution p1, p2;
  Vec llr;     // log2(p1/p2) per symbol
  double d12;  // D(p1 || p2)
  double d21;  // D(p2 || p1)
  HtPair(Distribution a, Distribution b);
};

// Tilted distribution along the pair: p1 at lambda = 0, p2 at lambda = 1.
Distribution ht_tilted(const HtPair& pair, double lambda);
// D(tilted(lambda) || p1): rises from 0 to d21.
double ht_d1(const HtPair& pair, double lambda);
// D(tilted(lambda) || p2): falls from d12 to 0.
double ht_d2(const HtPair& pair, double lambda);

// Upper-boundary representation of an achievable error-exponent region:
// points (e1, e2) with e1 strictly increasing, e2 non-increasing. A pair of
// exponents is achievable when it sits on or below the boundary.
struct ExponentRegion {
  std::string name;
  std::vector<std::pair<double, double>> boundary;
};

// Boundary value of the fixed-length tradeoff at a given e1, computed by
// bisection on the tilt parameter.
double fl_boundary_at(const HtPair& pair, double e1);

// Fixed-length tradeoff curve sampled along the tilt parameter.
ExponentRegion fl_region_boundary(const HtPair& pair, int grid = 512);

// Fully sequential region: the rectangle [0, d21] x [0, d12].
ExponentRegion seq_region(const HtPair& pair);

struct ChernoffResult {
  double exponent;
  double lambda;
};
// Balanced point D(tilted || p1) = D(tilted || p2). Identical hypotheses give
// {0, 0.5}.
ChernoffResult chernoff_exponent(const HtPair& pair);

// Phase-one exponent pair at continuation exponent gamma:
//   e1 = D(t(lambda1) || p1) with lambda1 the largest tilt keeping
//        D(t || p2) >= gamma, and symmetrically for e2.
// gamma above the Chernoff exponent leaves nothing to add; the exponents
// degrade toward zero.
struct GammaExponents {
  double e1, e2;
  double lambda1, lambda2;
};
GammaExponents gamma_exponents(const HtPair& pair, double gamma);

// max(d12, d21) / chernoff: block-count scale at which the almost-fixed-length
// region stops being clipped by the budget factor.
double k_star_ht(const HtPair& pair);

// Fixed-length region grown by the rectangle reachable with continuation
// exponent gamma.
ExponentRegion rejection_region(const HtPair& pair, double gamma, int grid = 512);

// Almost-fixed-length region: rejection region clipped by k times the
// fixed-length region (k >= 1, real).
ExponentRegion afl_region(const HtPair& pair, double gamma, double k, int grid = 512);

// Linear interpolation of the boundary at e1 (clamped to the first point
// below, zero beyond the last point).
double region_boundary_at(const ExponentRegion& region, double e1);

// Membership: negative exponents are never members; beyond the boundary's
// last point only e2 <= 0 remains inside.
bool region_contains(const ExponentRegion& region, double e1, double e2);

}  // namespace aflx
