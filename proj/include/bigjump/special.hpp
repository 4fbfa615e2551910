#ifndef BIGJUMP_SPECIAL_HPP
#define BIGJUMP_SPECIAL_HPP

// Small numeric kernels shared by the distribution families: standard normal
// CDF/quantile and the upper incomplete gamma function.

namespace bigjump {

// P(Z > x) for standard normal Z.
double normal_tail(double x);

// P(Z <= x).
double normal_cdf(double x);

// Inverse of normal_cdf on (0,1).  Acklam's rational approximation with one
// Halley refinement step; absolute error well below 1e-13.
double normal_quantile(double u);

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt, a > 0,
// x >= 0.  Series for x < a+1, Lentz continued fraction otherwise.
double upper_gamma(double a, double x);

}  // namespace bigjump

#endif
