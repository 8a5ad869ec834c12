#include "aflx/dmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace aflx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSumTol = 1e-12;
}  // namespace

Distribution::Distribution(Vec p) : p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("Distribution: empty vector");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw std::invalid_argument("Distribution: negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTol)
    throw std::invalid_argument("Distribution: entries must sum to 1");
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Distribution::uniform: empty alphabet");
  Vec p(n, 1.0 / static_cast<double>(n));
  return Distribution(std::move(p));
}

Distribution Distribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("Distribution::bernoulli: p outside [0, 1]");
  return Distribution(Vec{1.0 - p, p});
}

Channel::Channel(std::vector<Vec> rows) : w_(std::move(rows)) {
  if (w_.size() < 2) throw std::invalid_argument("Channel: need at least 2 inputs");
  std::size_t ny = w_[0].size();
  if (ny < 2) throw std::invalid_argument("Channel: need at least 2 outputs");
  for (const Vec& r : w_) {
    if (r.size() != ny) throw std::invalid_argument("Channel: ragged rows");
    double sum = 0.0;
    for (double v : r) {
      if (!(v >= 0.0)) throw std::invalid_argument("Channel: negative or NaN entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
      throw std::invalid_argument("Channel: rows must sum to 1");
  }
}

Channel Channel::bsc(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0))
    throw std::invalid_argument("Channel::bsc: crossover outside [0, 1]");
  double p = crossover;
  return Channel({{1.0 - p, p}, {p, 1.0 - p}});
}

Channel Channel::bec(double erasure) {
  if (!(erasure >= 0.0 && erasure <= 1.0))
    throw std::invalid_argument("Channel::bec: erasure outside [0, 1]");
  double e = erasure;
  return Channel({{1.0 - e, e, 0.0}, {0.0, e, 1.0 - e}});
}

std::string Channel::cache_key() const {
  std::string key;
  key.reserve(16 + nx() * ny() * sizeof(double));
  key += std::to_string(nx());
  key += 'x';
  key += std::to_string(ny());
  key += ':';
  for (const Vec& r : w_) {
    const char* bytes = reinterpret_cast<const char*>(r.data());
    key.append(bytes, r.size() * sizeof(double));
  }
  return key;
}

double kl_divergence(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;  // 0 log(0/q) = 0 by convention
    if (q[i] <= 0.0) return kInf;
    sum += p[i] * std::log2(p[i] / q[i]);
  }
  return sum;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  return kl_divergence(p.probs(), q.probs());
}

Distribution tilted_distribution(const Distribution& p, const Distribution& q,
                                 double lambda) {
  if (p.size() != q.size())
    throw std::invalid_argument("tilted_distribution: size mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("tilted_distribution: lambda outside [0, 1]");
  if (lambda == 0.0) return p;
  if (lambda == 1.0) return q;
  const std::size_t n = p.size();
  std::vector<double> lw(n, -kInf);
  double m = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) {
      lw[i] = (1.0 - lambda) * std::log(p[i]) + lambda * std::log(q[i]);
      if (lw[i] > m) m = lw[i];
    }
  }
  if (std::isinf(m))
    throw UnsupportedChannelError("tilted_distribution: disjoint supports");
  Vec t(n, 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (lw[i] > -kInf) {
      t[i] = std::exp(lw[i] - m);
      z += t[i];
    }
  }
  for (double& v : t) v /= z;
  return Distribution(std::move(t));
}

TiltedPair make_tilted_pair(Distribution p, Distribution q, double lambda) {
  bool shared = p.size() == q.size();
  if (shared) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if ((p[i] > 0.0) != (q[i] > 0.0)) {
        shared = false;
        break;
      }
    }
  }
  Distribution t = tilted_distribution(p, q, lambda);
  return TiltedPair{std::move(p), std::move(q), lambda, shared, std::move(t)};
}

double capacity(const Channel& ch) {
  const std::size_t nx = ch.nx(), ny = ch.ny();
  Vec q(nx, 1.0 / static_cast<double>(nx));
  Vec out(ny), c(nx);
  double lower = 0.0;
  double prev_lower = -1.0;
  for (int iter = 0; iter < 100000; ++iter) {
    for (std::size_t y = 0; y < ny; ++y) {
      double s = 0.0;
      for (std::size_t x = 0; x < nx; ++x) s += q[x] * ch.w(x, y);
      out[y] = s;
    }
    lower = 0.0;
    double upper = -kInf;
    for (std::size_t x = 0; x < nx; ++x) {
      double cx = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double w = ch.w(x, y);
        if (w > 0.0) cx += w * std::log2(w / out[y]);
      }
      c[x] = cx;
      lower += q[x] * cx;
      if (cx > upper) upper = cx;
    }
    if (upper - lower < 1e-10) break;
    if (std::abs(lower - prev_lower) < 1e-13) break;
    prev_lower = lower;
    // q(x) <- q(x) 2^{c(x)} up to normalization, in a stable form.
    double m = upper;
    double z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      q[x] *= std::exp2(c[x] - m);
      z += q[x];
    }
    for (std::size_t x = 0; x < nx; ++x) q[x] /= z;
  }
  return lower > 0.0 ? lower : 0.0;
}

C1Result c1_and_extremal_inputs(const Channel& ch) {
  const std::size_t nx = ch.nx();
  C1Result best{-kInf, false, 0, 0};
  bool first = true;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t xp = 0; xp < nx; ++xp) {
      if (x == xp) continue;
      double d = kl_divergence(ch.row(x), ch.row(xp));
      if (first || d > best.value) {
        best.value = d;
        best.x = x;
        best.x_prime = xp;
        first = false;
      }
    }
  }
  best.infinite = std::isinf(best.value);
  return best;
}

bool is_symmetric(const Channel& ch, double tol) {
  const std::size_t nx = ch.nx(), ny = ch.ny();
  // Group output symbols by the sorted multiset of their column.
  std::vector<Vec> sorted_cols(ny, Vec(nx));
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) sorted_cols[y][x] = ch.w(x, y);
    std::sort(sorted_cols[y].begin(), sorted_cols[y].end());
  }
  std::vector<int> group(ny, -1);
  std::vector<std::size_t> rep;  // representative column per group
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t g = 0; g < rep.size(); ++g) {
      bool match = true;
      for (std::size_t x = 0; x < nx; ++x) {
        if (std::abs(sorted_cols[y][x] - sorted_cols[rep[g]][x]) > tol) {
          match = false;
          break;
        }
      }
      if (match) {
        group[y] = static_cast<int>(g);
        break;
      }
    }
    if (group[y] < 0) {
      group[y] = static_cast<int>(rep.size());
      rep.push_back(y);
    }
  }
  // Within each group, every row restricted to the group must be a
  // permutation of the first row's restriction. Columns already agree as
  // multisets by construction of the grouping.
  for (std::size_t g = 0; g < rep.size(); ++g) {
    std::vector<std::size_t> cols;
    for (std::size_t y = 0; y < ny; ++y)
      if (group[y] == static_cast<int>(g)) cols.push_back(y);
    Vec base;
    for (std::size_t x = 0; x < nx; ++x) {
      Vec vals;
      vals.reserve(cols.size());
      for (std::size_t y : cols) vals.push_back(ch.w(x, y));
      std::sort(vals.begin(), vals.end());
      if (x == 0) {
        base = vals;
        continue;
      }
      for (std::size_t i = 0; i < vals.size(); ++i)
        if (std::abs(vals[i] - base[i]) > tol) return false;
    }
  }
  return true;
}

}  // namespace aflx
