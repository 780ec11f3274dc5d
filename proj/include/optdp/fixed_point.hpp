#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optdp {

/// Record of a Picard iteration run.
///
/// `residuals[k]` holds d(x_{k+1}, x_k). The a priori bound is the Cauchy
/// estimate L^m/(1-L) d(x_1, x_0) evaluated at the returned iterate m; the
/// a posteriori bound is L/(1-L) d(x_m, x_{m-1}). Both bound the distance of
/// the returned iterate to the fixed point.
struct IterationTrace {
  std::size_t iterations = 0;
  std::vector<double> residuals;
  double modulus = 0.0;
  double a_priori_bound = 0.0;
  double a_posteriori_bound = 0.0;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, IterationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const IterationTrace& trace() const noexcept { return trace_; }

 private:
  IterationTrace trace_;
};

/// A self-map together with its claimed contraction modulus and the metric
/// in which the claim holds. The modulus is not verified here; see
/// `contraction_ratio` for a sampled check.
template <class Point>
struct ContractionMap {
  std::function<Point(const Point&)> apply;
  double modulus = 0.0;
  std::function<double(const Point&, const Point&)> metric;
};

inline constexpr std::size_t kDefaultMaxIterations = 100000;

/// Smallest m with L^m/(1-L) * d1 <= tol. Returns 0 when d1 == 0.
std::size_t a_priori_iterations(double modulus, double d1, double tol);

namespace detail {
void check_modulus(double modulus);
void check_tolerance(double tol);
std::string non_convergence_message(double tol, std::size_t max_iters,
                                    const IterationTrace& trace);
}  // namespace detail

/// Picard iteration x_{k+1} = apply(x_k) started at `start`.
///
/// Stops at the first k where either bound on d(x_k, x*) is at most `tol`:
/// the a posteriori L/(1-L) d(x_k, x_{k-1}) or the a priori
/// L^k/(1-L) d(x_1, x_0). The second keeps the count within
/// a_priori_iterations when rounding inflates late residuals. Throws NonConvergenceError (carrying the trace) when
/// `max_iters` map applications do not reach the criterion.
template <class Point>
std::pair<Point, IterationTrace> iterate_to_fixed_point(
    const ContractionMap<Point>& map, Point start, double tol,
    std::size_t max_iters = kDefaultMaxIterations) {
  detail::check_modulus(map.modulus);
  detail::check_tolerance(tol);
  const double L = map.modulus;
  const double threshold = tol * (1.0 - L) / L;

  IterationTrace trace;
  trace.modulus = L;
  Point current = std::move(start);
  double first_residual = 0.0;
  while (trace.iterations < max_iters) {
    Point next = map.apply(current);
    const double residual = map.metric(next, current);
    ++trace.iterations;
    trace.residuals.push_back(residual);
    if (trace.iterations == 1) first_residual = residual;
    current = std::move(next);
    trace.a_priori_bound = std::pow(L, static_cast<double>(trace.iterations)) /
                           (1.0 - L) * first_residual;
    trace.a_posteriori_bound = L / (1.0 - L) * residual;
    if (residual <= threshold || trace.a_priori_bound <= tol)
      return {std::move(current), std::move(trace)};
  }
  std::string message = detail::non_convergence_message(tol, max_iters, trace);
  throw NonConvergenceError(message, std::move(trace));
}

/// d(apply(x), apply(y)) / d(x, y); the contraction claim requires this to be
/// at most the modulus. Throws std::invalid_argument when d(x, y) == 0.
template <class Point>
double contraction_ratio(const ContractionMap<Point>& map, const Point& x,
                         const Point& y) {
  const double d = map.metric(x, y);
  if (!(d > 0.0))
    throw std::invalid_argument("contraction_ratio: points coincide");
  return map.metric(map.apply(x), map.apply(y)) / d;
}

}  // namespace optdp
