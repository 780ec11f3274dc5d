#include "optdp/fixed_point.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace optdp {

namespace detail {

void check_modulus(double modulus) {
  if (!(modulus > 0.0 && modulus < 1.0))
    throw std::invalid_argument("contraction modulus must lie in (0,1), got " +
                                std::to_string(modulus));
}

void check_tolerance(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("tolerance must be positive and finite");
}

std::string non_convergence_message(double tol, std::size_t max_iters,
                                    const IterationTrace& trace) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "fixed-point iteration did not reach tolerance %g within %zu iterations "
                "(last residual %.3e, a posteriori bound %.3e)",
                tol, max_iters, trace.residuals.empty() ? 0.0 : trace.residuals.back(),
                trace.a_posteriori_bound);
  return buf;
}

}  // namespace detail

std::size_t a_priori_iterations(double modulus, double d1, double tol) {
  detail::check_modulus(modulus);
  detail::check_tolerance(tol);
  if (!(d1 >= 0.0) || !std::isfinite(d1))
    throw std::invalid_argument("a_priori_iterations: d1 must be finite and >= 0");
  if (d1 == 0.0) return 0;

  auto bound = [&](std::size_t m) {
    return std::pow(modulus, static_cast<double>(m)) / (1.0 - modulus) * d1;
  };
  // log estimate, then correct against direct evaluation of the bound
  const double estimate =
      std::ceil(std::log(tol * (1.0 - modulus) / d1) / std::log(modulus));
  std::size_t m = estimate > 0.0 ? static_cast<std::size_t>(estimate) : 0;
  while (bound(m) > tol) ++m;
  while (m > 0 && bound(m - 1) <= tol) --m;
  return m;
}

}  // namespace optdp
