#pragma once

// Self-contained special functions for the analytic VG pricer and the
// tempered-stable jump simulator. Everything here is deterministic, pure and
// auditable against quadrature or series oracles in the test suite.

namespace levyq::specfun {

/// Standard normal CDF. Absolute error below 1e-12 over the real line.
double norm_cdf(double x);

/// Standard normal PDF.
double norm_pdf(double x);

/// Complementary error function, kept public because the parabolic cylinder
/// reductions in the tests need it.
double erfc(double x);

/// ln Gamma(x) for x > 0. Relative error below 1e-12.
/// Throws std::domain_error for x <= 0.
double log_gamma(double x);

/// Gamma(x) for x in the real domain excluding the poles 0, -1, -2, ...
/// Negative non-integer arguments go through the reflection formula.
double gamma(double x);

/// Modified Bessel function of the second kind K_order(x), real order.
/// Valid for x > 0; targets 1e-8 relative error for |order| <= 20, x <= 50.
double bessel_k(double order, double x);

/// log(K_order(x)) computed without intermediate under/overflow. Needed by
/// the likelihood code where K underflows for large arguments.
double log_bessel_k(double order, double x);

struct Hyp1f1Result {
    double value;
    bool converged;
};

/// Kummer confluent hypergeometric series 1F1(a; b; z).
/// The series stops when the term drops below tol * |partial sum| or after
/// max_terms terms; the reference loop used tol = 1e-4 and 100 terms, the
/// default here is tightened to 1e-10 / 500 because the values feed Monte
/// Carlo acceptance probabilities.
Hyp1f1Result confluent_hypergeometric(double a, double b, double z,
                                      double tol = 1e-10, int max_terms = 500);

/// Parabolic cylinder function D_p(z) for z >= 0. Below z = 40 it uses the
/// two-series 1F1 representation; above, the 20-term asymptotic expansion.
/// The switch point is empirical, inherited from the reference implementation.
double parabolic_cylinder_d(double p, double z);

} // namespace levyq::specfun
