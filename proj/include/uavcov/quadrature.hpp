#ifndef UAVCOV_QUADRATURE_HPP
#define UAVCOV_QUADRATURE_HPP

#include <functional>

namespace uavcov {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  unsigned max_subdivisions = 4000;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  unsigned subdivisions = 0;
};

// Globally adaptive Gauss-Kronrod (21-point) integration over a finite
// interval: the interval with the largest error estimate is bisected until
// the summed error meets max(abs_tol, rel_tol * |value|). Throws NumericError
// carrying the best estimate when max_subdivisions is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg);

}  // namespace uavcov

#endif  // UAVCOV_QUADRATURE_HPP
