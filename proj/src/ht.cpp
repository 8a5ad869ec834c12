#include "aflx/ht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aflx/numerics.hpp"

namespace aflx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform e1 grid over [0, d21] with the rectangle corner inserted, sorted
// and deduplicated. Keeping the corner exact makes the max/min compositions
// sharp at the kink.
std::vector<double> boundary_grid(double d21, double corner, int grid) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(grid) + 1);
  for (int i = 0; i < grid; ++i)
    xs.push_back(d21 * static_cast<double>(i) / (grid - 1));
  if (corner > 0.0 && corner < d21) xs.push_back(corner);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-15; }),
           xs.end());
  return xs;
}

void enforce_boundary_shape(std::vector<std::pair<double, double>>& pts) {
  // Non-increasing e2 and non-negative values; absorbs bisection noise.
  double prev = kInf;
  for (auto& pt : pts) {
    pt.second = std::max(0.0, std::min(pt.second, prev));
    prev = pt.second;
  }
}
}  // namespace

HtPair::HtPair(Distribution a, Distribution b) : p1(std::move(a)), p2(std::move(b)) {
  if (p1.size() != p2.size()) throw std::invalid_argument("HtPair: size mismatch");
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if ((p1[i] > 0.0) != (p2[i] > 0.0))
      throw UnsupportedChannelError("HtPair: hypotheses must share support");
  }
  llr.resize(p1.size(), 0.0);
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (p1[i] > 0.0) llr[i] = std::log2(p1[i] / p2[i]);
  d12 = kl_divergence(p1, p2);
  d21 = kl_divergence(p2, p1);
}

Distribution ht_tilted(const HtPair& pair, double lambda) {
  return tilted_distribution(pair.p1, pair.p2, lambda);
}

double ht_d1(const HtPair& pair, double lambda) {
  return kl_divergence(ht_tilted(pair, lambda), pair.p1);
}

double ht_d2(const HtPair& pair, double lambda) {
  return kl_divergence(ht_tilted(pair, lambda), pair.p2);
}

double fl_boundary_at(const HtPair& pair, double e1) {
  if (e1 <= 0.0) return pair.d12;
  if (e1 >= pair.d21) return 0.0;
  auto d1 = [&](double lam) { return ht_d1(pair, lam); };
  double lam = bisect_rising(d1, 0.0, 1.0, e1, 1e-14);
  return ht_d2(pair, lam);
}

ExponentRegion fl_region_boundary(const HtPair& pair, int grid) {
  if (grid < 2) throw std::invalid_argument("fl_region_boundary: grid too small");
  ExponentRegion region;
  region.name = "fl";
  double prev_e1 = -kInf;
  for (int i = 0; i < grid; ++i) {
    double lam = static_cast<double>(i) / (grid - 1);
    double e1 = ht_d1(pair, lam);
    double e2 = ht_d2(pair, lam);
    if (e1 <= prev_e1 + 1e-15) continue;
    region.boundary.emplace_back(e1, e2);
    prev_e1 = e1;
  }
  if (region.boundary.empty()) region.boundary.emplace_back(0.0, 0.0);
  enforce_boundary_shape(region.boundary);
  return region;
}

ExponentRegion seq_region(const HtPair& pair) {
  ExponentRegion region;
  region.name = "seq";
  if (pair.d21 <= 0.0) {
    region.boundary.emplace_back(0.0, std::max(0.0, pair.d12));
    return region;
  }
  region.boundary.emplace_back(0.0, pair.d12);
  region.boundary.emplace_back(pair.d21, pair.d12);
  return region;
}

ChernoffResult chernoff_exponent(const HtPair& pair) {
  if (pair.d12 <= 0.0 && pair.d21 <= 0.0) return {0.0, 0.5};
  auto h = [&](double lam) { return ht_d1(pair, lam) - ht_d2(pair, lam); };
  double lam = bisect_rising(h, 0.0, 1.0, 0.0, 1e-14);
  return {ht_d1(pair, lam), lam};
}

GammaExponents gamma_exponents(const HtPair& pair, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma_exponents: gamma must be >= 0");
  GammaExponents out{0.0, 0.0, 0.0, 0.0};
  // lambda1: largest tilt keeping D(t || p2) >= gamma (d2 falls in lambda).
  if (gamma <= 0.0) {
    out.lambda1 = 1.0;
  } else if (gamma > pair.d12) {
    out.lambda1 = 0.0;  // nothing reaches the continuation target
    out.e1 = 0.0;
  } else {
    auto d2 = [&](double lam) { return ht_d2(pair, lam); };
    out.lambda1 = bisect_falling(d2, 0.0, 1.0, gamma, 1e-14);
  }
  if (gamma <= pair.d12) out.e1 = ht_d1(pair, out.lambda1);

  // lambda2: smallest tilt with D(t || p1) >= gamma (d1 rises in lambda).
  if (gamma <= 0.0) {
    out.lambda2 = 0.0;
  } else if (gamma > pair.d21) {
    out.lambda2 = 1.0;
    out.e2 = 0.0;
  } else {
    auto d1 = [&](double lam) { return ht_d1(pair, lam); };
    out.lambda2 = bisect_rising(d1, 0.0, 1.0, gamma, 1e-14);
  }
  if (gamma <= pair.d21) out.e2 = ht_d2(pair, out.lambda2);
  return out;
}

double k_star_ht(const HtPair& pair) {
  ChernoffResult ch = chernoff_exponent(pair);
  if (ch.exponent <= 0.0) return kInf;
  return std::max(pair.d12, pair.d21) / ch.exponent;
}

ExponentRegion rejection_region(const HtPair& pair, double gamma, int grid) {
  if (grid < 2) throw std::invalid_argument("rejection_region: grid too small");
  if (!(gamma >= 0.0)) throw std::invalid_argument("rejection_region: gamma must be >= 0");
  GammaExponents ge = gamma_exponents(pair, gamma);
  ExponentRegion region;
  region.name = "rejection";
  std::vector<double> xs = boundary_grid(pair.d21, ge.e1, grid);
  region.boundary.reserve(xs.size());
  for (double e1 : xs) {
    double b = fl_boundary_at(pair, e1);
    if (e1 <= ge.e1 + 1e-15) b = std::max(b, ge.e2);
    region.boundary.emplace_back(e1, b);
  }
  enforce_boundary_shape(region.boundary);
  return region;
}

ExponentRegion afl_region(const HtPair& pair, double gamma, double k, int grid) {
  if (grid < 2) throw std::invalid_argument("afl_region: grid too small");
  if (!(gamma >= 0.0)) throw std::invalid_argument("afl_region: gamma must be >= 0");
  if (!(k >= 1.0)) throw std::invalid_argument("afl_region: k must be >= 1");
  GammaExponents ge = gamma_exponents(pair, gamma);
  ExponentRegion region;
  region.name = "afl";
  std::vector<double> xs = boundary_grid(pair.d21, ge.e1, grid);
  region.boundary.reserve(xs.size());
  for (double e1 : xs) {
    double b = fl_boundary_at(pair, e1);
    if (e1 <= ge.e1 + 1e-15) b = std::max(b, ge.e2);
    double clip = k * fl_boundary_at(pair, e1 / k);
    region.boundary.emplace_back(e1, std::min(b, clip));
  }
  enforce_boundary_shape(region.boundary);
  return region;
}

double region_boundary_at(const ExponentRegion& region, double e1) {
  const auto& pts = region.boundary;
  if (pts.empty()) return 0.0;
  if (e1 <= pts.front().first) return pts.front().second;
  if (e1 > pts.back().first) return 0.0;
  auto it = std::lower_bound(
      pts.begin(), pts.end(), e1,
      [](const std::pair<double, double>& pt, double v) { return pt.first < v; });
  if (it->first == e1) return it->second;
  auto prev = it - 1;
  double t = (e1 - prev->first) / (it->first - prev->first);
  return prev->second + t * (it->second - prev->second);
}

bool region_contains(const ExponentRegion& region, double e1, double e2) {
  if (region.boundary.empty()) return false;
  if (e1 < 0.0 || e2 < 0.0) return false;
  if (e1 > region.boundary.back().first) return e2 <= 0.0;
  return e2 <= region_boundary_at(region, e1);
}

}  // namespace aflx
