#ifndef BIGJUMP_QUADRATURE_HPP
#define BIGJUMP_QUADRATURE_HPP

#include <cmath>
#include <functional>

namespace bigjump {

// Adaptive Simpson on [a,b].  Tolerance is absolute; recursion splits until
// the local Richardson estimate drops below the budget for the subinterval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

// Integral of a nonnegative nonincreasing f over [a, inf).  Marches in
// doubling panels and stops when the crude remainder bound
// f(x) * x * slack falls below rel_tol of the running total (f must decay
// faster than 1/x^(1+something) for this to terminate, which holds for every
// finite-mean tail here).
double integrate_tail(const std::function<double(double)>& f, double a,
                      double rel_tol = 1e-9);

}  // namespace bigjump

#endif
