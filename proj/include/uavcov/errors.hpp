#ifndef UAVCOV_ERRORS_HPP
#define UAVCOV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uavcov {

// The infinite-plane interference moment does not exist (PLE <= 2).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Quadrature or root finding failed to meet its tolerance. Carries the best
// estimate reached before giving up.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace uavcov

#endif  // UAVCOV_ERRORS_HPP
