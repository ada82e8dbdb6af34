#include "otdf/special.hpp"

#include <cmath>
#include <limits>

#include "otdf/errors.hpp"

namespace otdf {

double log_factorial(int n) {
    if (n < 0) throw StatsError("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3.0e-15;
    constexpr double fpmin = 1.0e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw StatsError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw StatsError("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    // Bisection with Newton polish; the CDF is monotone so this cannot fail.
    double lo = 0.0, hi = 1.0;
    double x = a / (a + b);
    for (int i = 0; i < 200; ++i) {
        const double f = incomplete_beta(a, b, x) - p;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        // Newton step using the beta density; fall back to bisection when it
        // leaves the bracket.
        const double ln_pdf = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                              (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
        const double pdf = std::exp(ln_pdf);
        double x_new = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : 0.5 * (lo + hi);
        if (!(x_new > lo && x_new < hi)) x_new = 0.5 * (lo + hi);
        if (std::fabs(x_new - x) < 1e-15 * (1.0 + std::fabs(x))) return x_new;
        x = x_new;
    }
    return x;
}

}  // namespace otdf
