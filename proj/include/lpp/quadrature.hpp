#pragma once

#include <functional>

namespace lpp::quad {

struct TailIntegral {
  double value = 0.0;
  bool converged = false;
};

// Adaptive Simpson integration of f on [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

// Integral of f over [a, inf), evaluated on doubling windows [a, a+L],
// [a, a+2L], ... until successive values agree to tol.  A non-converged
// result signals divergence (or a tail too heavy for the cutoff budget).
TailIntegral integrate_to_infinity(const std::function<double(double)>& f,
                                   double a, double tol,
                                   double initial_window = 1.0,
                                   int max_doublings = 64);

}  // namespace lpp::quad
