#include "bigjump/quadrature.hpp"

#include <algorithm>

namespace bigjump {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return sign * adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double integrate_tail(const std::function<double(double)>& f, double a,
                      double rel_tol) {
  // Doubling panels; the remainder beyond the last panel is extrapolated
  // from the observed geometric panel decay.
  double x0 = a;
  double width = std::max(1.0, std::fabs(a));
  double total = 0.0;
  double prev_panel = -1.0;
  for (int k = 0; k < 200; ++k) {
    double x1 = x0 + width;
    double panel = integrate(f, x0, x1, 1e-13 + rel_tol * (total + 1e-300));
    total += panel;
    if (prev_panel > 0.0 && panel > 0.0) {
      double r = panel / prev_panel;
      if (r < 0.95) {
        double remainder = panel * r / (1.0 - r);
        if (remainder <= rel_tol * std::max(total, 1e-300)) {
          return total + remainder;
        }
      }
    }
    if (panel == 0.0 && f(x1) == 0.0) return total;
    prev_panel = panel;
    x0 = x1;
    width *= 2.0;
  }
  return total;
}

}  // namespace bigjump
