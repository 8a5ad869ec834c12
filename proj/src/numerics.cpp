#include "aflx/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aflx {

namespace {
constexpr double kInvPhi = 0.6180339887498949;  // 1/phi
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, double* best_val) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_max: empty interval");
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  double flo = f(lo), fhi = f(hi);
  double best_x = xm, best = fm;
  if (f1 > best) { best = f1; best_x = x1; }
  if (f2 > best) { best = f2; best_x = x2; }
  if (flo > best) { best = flo; best_x = lo; }
  if (fhi > best) { best = fhi; best_x = hi; }
  if (best_val) *best_val = best;
  return best_x;
}

double bisect_rising(const std::function<double(double)>& g, double lo, double hi,
                     double target, double xtol) {
  if (!(lo <= hi)) throw std::invalid_argument("bisect_rising: empty interval");
  if (g(lo) >= target) return lo;
  double a = lo, b = hi;  // g(a) < target <= g(b) up to rounding
  while (b - a > xtol) {
    double m = 0.5 * (a + b);
    if (g(m) >= target)
      b = m;
    else
      a = m;
  }
  return b;
}

double bisect_falling(const std::function<double(double)>& g, double lo, double hi,
                      double target, double xtol) {
  if (!(lo <= hi)) throw std::invalid_argument("bisect_falling: empty interval");
  if (g(hi) >= target) return hi;
  double a = lo, b = hi;  // g(a) >= target > g(b) up to rounding
  while (b - a > xtol) {
    double m = 0.5 * (a + b);
    if (g(m) >= target)
      a = m;
    else
      b = m;
  }
  return a;
}

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  const std::size_t n = xs_.size();
  if (n != ys_.size() || n < 2) throw std::invalid_argument("MonotoneCubic: need >= 2 points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("MonotoneCubic: xs must increase");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  ms_.assign(n, 0.0);
  ms_[0] = d[0];
  ms_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    ms_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  // Fritsch-Carlson limiter keeps the interpolant monotone on each interval.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      ms_[i] = 0.0;
      ms_[i + 1] = 0.0;
      continue;
    }
    double a = ms_[i] / d[i];
    double b = ms_[i + 1] / d[i];
    double s = a * a + b * b;
    if (s > 9.0) {
      double t = 3.0 / std::sqrt(s);
      ms_[i] = t * a * d[i];
      ms_[i + 1] = t * b * d[i];
    }
  }
}

double MonotoneCubic::operator()(double x) const {
  if (xs_.empty()) throw std::logic_error("MonotoneCubic: empty");
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  double h = xs_[i + 1] - xs_[i];
  double t = (x - xs_[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1;
  double h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2;
  double h11 = t3 - t2;
  return h00 * ys_[i] + h10 * h * ms_[i] + h01 * ys_[i + 1] + h11 * h * ms_[i + 1];
}

double wilson_radius(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_radius: zero trials");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double radius = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return radius;
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v)
    if (x > m) m = x;
  if (std::isinf(m) && m < 0) return m;
  double s = 0.0;
  for (double x : v)
    if (!std::isinf(x) || x > 0) s += std::exp(x - m);
  return m + std::log(s);
}

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("least_squares: degenerate xs");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace aflx
