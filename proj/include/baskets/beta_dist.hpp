#pragma once

namespace baskets {

// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
// Continued-fraction evaluation (modified Lentz), symmetric switch at
// x = (a + 1) / (a + b + 2).
double regularized_incomplete_beta(double a, double b, double x);

// Quantile of the Beta(a, b) distribution by bisection on I_x(a, b);
// accurate to better than 1e-12 in x.
double beta_quantile(double a, double b, double p);

} // namespace baskets
