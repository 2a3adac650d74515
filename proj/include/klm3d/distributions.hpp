#pragma once

namespace klm3d {

// Standard normal CDF.
double normal_cdf(double z);

// Student-t CDF with df degrees of freedom, via the regularized incomplete
// beta function. Handles infinite t (returns 0/1).
double students_t_cdf(double t, double df);

// Inverse of students_t_cdf in t for fixed df. p must lie in (0, 1).
double students_t_quantile(double p, double df);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

} // namespace klm3d
