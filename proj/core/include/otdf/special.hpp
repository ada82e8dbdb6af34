#pragma once

namespace otdf {

// log(n!)
double log_factorial(int n);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x for probability p in [0,1].
double beta_quantile(double a, double b, double p);

}  // namespace otdf
