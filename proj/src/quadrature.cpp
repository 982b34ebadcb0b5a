#include "lpp/quadrature.hpp"

#include <cmath>
#include <limits>

namespace lpp::quad {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth, int force) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  // force > 0 demands subdivision regardless of the error estimate: the
  // Richardson test alone is fooled by self-similar (power-law) integrands.
  if (depth <= 0 || (force <= 0 && std::abs(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                  force - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                  force - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive(f, a, b, fa, fm, fb, whole, tol, 48, 4);
}

TailIntegral integrate_to_infinity(const std::function<double(double)>& f,
                                   double a, double tol,
                                   double initial_window, int max_doublings) {
  double window = initial_window;
  double total = integrate(f, a, a + window, tol);
  double hi = a + window;
  int quiet = 0;  // demand two consecutive negligible windows
  for (int i = 0; i < max_doublings; ++i) {
    const double next_hi = a + 2.0 * (hi - a);
    const double piece = integrate(f, hi, next_hi, tol);
    hi = next_hi;
    total += piece;
    if (!std::isfinite(total)) return {total, false};
    quiet = std::abs(piece) < tol ? quiet + 1 : 0;
    if (quiet >= 2) return {total, true};
  }
  return {total, false};
}

}  // namespace lpp::quad
