#pragma once

#include <stdexcept>

// Special functions shared by every module: log-gamma, the modified Bessel
// function of the second kind for real order, regularized incomplete gamma
// integrals, and the standard normal quantile/CDF.

namespace flurlab {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ln Gamma(x), x > 0.
double log_gamma(double x);

// Gamma(x), x > 0.
double gamma_fn(double x);

// ln( Gamma(k+d) / Gamma(k+1) ) evaluated without the catastrophic
// cancellation of lgamma differences at large k (Stirling difference form
// for k above 1e4, plain lgamma below).
double log_gamma_ratio(double k, double d);

// K_nu(x) for real nu, x > 0.  Temme series for x <= 2, Steed continued
// fraction for x > 2, upward recurrence in the order.
double bessel_k(double nu, double x);

// Regularized incomplete gamma functions, a > 0, x >= 0.
double gamma_p(double a, double x);  // P(a,x) = gamma(a,x)/Gamma(a)
double gamma_q(double a, double x);  // Q(a,x) = 1 - P(a,x)

// int_{u1}^{u2} u^{a-1} e^{-lam*u} du for 0 <= u1 <= u2, a > 0, lam >= 0.
double power_exp_integral(double a, double lam, double u1, double u2);

// int_{u1}^{u2} u^{-kappa-1} e^{-lam*u} du for 0 < u1 <= u2, 0 < kappa < 1,
// lam > 0 (upper incomplete gamma of negative parameter via recurrence).
double power_exp_integral_neg(double kappa, double lam, double u1, double u2);

// Standard normal quantile (Wichura AS241) and CDF.
double normal_quantile(double p);
double normal_cdf(double x);

}  // namespace flurlab
