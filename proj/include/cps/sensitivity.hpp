#ifndef CPS_SENSITIVITY_HPP
#define CPS_SENSITIVITY_HPP

#include <cstdint>
#include <stdexcept>

namespace cps {

// f(x) = (1-p)^x - (1-q)^x for integer x >= 0 and densities p < q.
// f(0) = 0, f(x) > 0 for x >= 1; with the two-site window only x in {0,1,2}
// ever occurs, where double evaluation is exact to rounding.
inline double f_sensitivity(std::int64_t x, double p, double q) {
  if (x < 0) throw std::invalid_argument("f_sensitivity: x must be >= 0");
  if (!(p >= 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("f_sensitivity: densities must lie in (0,1)");
  if (!(p < q)) throw std::invalid_argument("f_sensitivity: requires p < q");
  double a = 1.0, b = 1.0;
  for (std::int64_t k = 0; k < x; ++k) {
    a *= 1.0 - p;
    b *= 1.0 - q;
  }
  return a - b;
}

// Margin of the inequality 2(1-e)(1-d)^2 - e(1-d)d - 4d - e(1-d)^2 > 0.
// A positive return certifies the pair (epsilon, delta); the margin is
// strictly decreasing in delta on [0,1) and positive at delta=0 whenever
// epsilon < 2/3.
inline double imp_margin(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 2.0 / 3.0))
    throw std::invalid_argument("imp_margin: epsilon must lie in (0, 2/3)");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("imp_margin: delta must lie in [0, 1)");
  const double omd = 1.0 - delta;
  return 2.0 * (1.0 - epsilon) * omd * omd - epsilon * omd * delta - 4.0 * delta -
         epsilon * omd * omd;
}

// Largest delta* with imp_margin(epsilon, delta*) >= 0, found by bisection on
// the margin, which has exactly one sign change on [0,1) for fixed epsilon.
inline double imp_margin_delta_star(double epsilon, double tol = 1e-12) {
  double lo = 0.0, hi = 1.0 - 1e-15;
  if (imp_margin(epsilon, lo) < 0.0) return 0.0;
  if (imp_margin(epsilon, hi) >= 0.0) return hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (imp_margin(epsilon, mid) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace cps

#endif  // CPS_SENSITIVITY_HPP
