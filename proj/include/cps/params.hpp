#ifndef CPS_PARAMS_HPP
#define CPS_PARAMS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cps {

// Two-site observation window {-r, +r}, symmetric about the origin.
struct WindowLambdaR {
  std::int64_t r = 1;

  explicit WindowLambdaR(std::int64_t r_) : r(r_) {
    if (r < 1) throw std::invalid_argument("window half-position r must be >= 1");
  }
  std::int64_t left() const { return -r; }
  std::int64_t right() const { return r; }
  bool contains(std::int64_t site) const { return site == -r || site == r; }
};

// Parameters of one sensitivity experiment. lambda is the infection rate per
// directed edge; p < q are the Bernoulli densities of the two initial
// conditions on the window; t is the time horizon.
struct ModelParams {
  double lambda = 1.0;
  double p = 0.7;
  double q = 0.9;
  std::int64_t r = 1;
  double t = 1.0;

  void validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    if (!(p < q)) throw std::invalid_argument("densities must satisfy p < q");
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
  }

  // Estimator validity needs p + q > 1 (sign of f(2)-f(1) fixed); the
  // stronger q > p > 2/3 is enforced only by the theorem1 preset.
  void validate_for_sensitivity() const {
    validate();
    if (!(p + q > 1.0))
      throw std::invalid_argument("sensitivity estimators require p + q > 1");
  }

  void validate_theorem1() const {
    validate();
    if (!(q > p && p > 2.0 / 3.0))
      throw std::invalid_argument("theorem1 preset requires q > p > 2/3");
  }

  WindowLambdaR window() const { return WindowLambdaR(r); }
};

}  // namespace cps

#endif  // CPS_PARAMS_HPP
