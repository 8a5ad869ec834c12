#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace aflx {

// Maximizes f on [lo, hi] by golden-section search. Endpoints are always
// evaluated as well, so boundary maxima are returned exactly.
// Returns the argmax; *best_val receives the maximum if non-null.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double xtol = 1e-12, double* best_val = nullptr);

// Smallest x in [lo, hi] with g(x) >= target, for non-decreasing g.
// Requires g(hi) >= target; returns hi if even g(hi) falls short by rounding.
double bisect_rising(const std::function<double(double)>& g, double lo, double hi,
                     double target, double xtol = 1e-12);

// Largest x in [lo, hi] with g(x) >= target, for non-increasing g.
double bisect_falling(const std::function<double(double)>& g, double lo, double hi,
                      double target, double xtol = 1e-12);

// Piecewise-cubic Hermite interpolant with Fritsch-Carlson limited slopes.
// Preserves monotonicity of the data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;  // clamps outside [xs.front(), xs.back()]
  bool empty() const { return xs_.empty(); }

 private:
  std::vector<double> xs_, ys_, ms_;
};

// Half-width of the Wilson score interval for k successes in t trials.
double wilson_radius(std::uint64_t successes, std::uint64_t trials, double z = 1.0);

// log(sum(exp(v))) over natural-log values; tolerates -inf entries.
double log_sum_exp(const std::vector<double>& v);

// Least-squares line y = slope*x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace aflx
