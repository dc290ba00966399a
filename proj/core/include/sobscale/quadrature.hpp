#ifndef SOBSCALE_QUADRATURE_HPP
#define SOBSCALE_QUADRATURE_HPP

#include <functional>

namespace sobscale {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7-15) integration of f over [a, b].
/// Subdivides until the local Kronrod error estimate meets
/// max(abs_tol, rel_tol * |integral so far|) or max_depth is reached.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_tol = 1e-14, int max_depth = 18);

}  // namespace sobscale

#endif
