#include "flurlab/special.hpp"

#include <cmath>
#include <limits>

namespace flurlab {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.57721566490153286060651209;
}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: x must be > 0");
    return std::lgamma(x);
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: x must be > 0");
    return std::tgamma(x);
}

double log_gamma_ratio(double k, double d) {
    if (!(k + d > 0.0) || !(k + 1.0 > 0.0))
        throw DomainError("log_gamma_ratio: arguments outside (0,inf)");
    if (k <= 1e4) return std::lgamma(k + d) - std::lgamma(k + 1.0);
    // lnG(k+d) - lnG(k+1) with Stirling's series; the (z-1/2)ln z and z terms
    // are combined analytically so no large quantities are subtracted.
    const double z = k;
    const double la = std::log1p(d / z), lb = std::log1p(1.0 / z);
    double r = (d - 1.0) * std::log(z);
    r += (z + d - 0.5) * la - (z + 0.5) * lb + (1.0 - d);
    // S(z+d) - S(z+1), S(z) = sum B_2n / (2n(2n-1) z^(2n-1))
    static const double b[] = {1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0};
    const double za = z + d, zb = z + 1.0;
    double pa = 1.0 / za, pb = 1.0 / zb;
    const double ia = 1.0 / (za * za), ib = 1.0 / (zb * zb);
    for (double bn : b) {
        r += bn * (pa - pb);
        pa *= ia;
        pb *= ib;
    }
    return r;
}

namespace {

// Gamma_1, Gamma_2 of Temme's method plus 1/Gamma(1+mu), 1/Gamma(1-mu).
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    gampl = 1.0 / std::tgamma(1.0 + mu);
    gammi = 1.0 / std::tgamma(1.0 - mu);
    if (mu == 0.0) {
        gam1 = -kEulerGamma;
    } else {
        const double lp = std::lgamma(1.0 + mu), lm = std::lgamma(1.0 - mu);
        gam1 = std::exp(-0.5 * (lp + lm)) * std::sinh(0.5 * (lp - lm)) / mu;
    }
    gam2 = 0.5 * (gammi + gampl);
}

}  // namespace

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
    nu = std::fabs(nu);  // K_{-nu} = K_nu
    const int nl = static_cast<int>(nu + 0.5);
    const double xmu = nu - nl, xmu2 = xmu * xmu;
    const double xi = 1.0 / x, xi2 = 2.0 * xi;
    double rkmu, rk1;
    if (x <= 2.0) {
        const double pimu = M_PI * xmu;
        const double fact = (std::fabs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
        const double dl = -std::log(0.5 * x);
        double e = xmu * dl;
        const double fact2 = (std::fabs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
        double gam1, gam2, gampl, gammi;
        temme_gammas(xmu, gam1, gam2, gampl, gammi);
        double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * dl);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / gampl;
        double q = 0.5 / (e * gammi);
        double c = 1.0;
        const double d2 = 0.25 * x * x;
        double sum1 = p;
        int i = 1;
        for (; i <= 30000; ++i) {
            ff = (i * ff + p + q) / (i * i - xmu2);
            c *= d2 / i;
            p /= (i - xmu);
            q /= (i + xmu);
            const double del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        if (i > 30000) throw NumericalError("bessel_k: series failed to converge");
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d, delh = d;
        double q1 = 0.0, q2 = 1.0;
        const double a1 = 0.25 - xmu2;
        double q = a1, c = a1, a = -a1;
        double s = 1.0 + q * delh;
        int i = 2;
        for (; i <= 30000; ++i) {
            a -= 2 * (i - 1);
            c = -a * c / i;
            const double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            const double dels = q * delh;
            s += dels;
            if (std::fabs(dels / s) < kEps) break;
        }
        if (i > 30000) throw NumericalError("bessel_k: continued fraction failed");
        h = a1 * h;
        rkmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for (int i = 1; i <= nl; ++i) {
        const double rktemp = (xmu + i) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    return rkmu;
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 1; n <= 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("gamma_p: series failed to converge");
}

double gamma_q_cf(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw NumericalError("gamma_q: continued fraction failed");
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double power_exp_integral(double a, double lam, double u1, double u2) {
    if (!(a > 0.0) || u1 < 0.0 || u2 < u1) throw DomainError("power_exp_integral: bad arguments");
    if (u1 == u2) return 0.0;
    if (lam == 0.0) return (std::pow(u2, a) - std::pow(u1, a)) / a;
    const double x1 = lam * u1, x2 = lam * u2;
    const double scale = std::exp(std::lgamma(a) - a * std::log(lam));
    // difference of P's cancels for large x, of Q's for small x
    if (x1 > a + 1.0) return scale * (gamma_q_cf(a, x1) - gamma_q_cf(a, x2));
    return scale * (gamma_p(a, x2) - gamma_p(a, x1));
}

double power_exp_integral_neg(double kappa, double lam, double u1, double u2) {
    if (!(kappa > 0.0 && kappa < 1.0) || !(lam > 0.0) || !(u1 > 0.0) || u2 < u1)
        throw DomainError("power_exp_integral_neg: bad arguments");
    if (u1 == u2) return 0.0;
    // Gamma(-kappa, x) = (Gamma(1-kappa, x) - x^{-kappa} e^{-x}) / (-kappa)
    auto upper_neg = [&](double x) {
        const double g1 = gamma_q(1.0 - kappa, x) * gamma_fn(1.0 - kappa);
        return (g1 - std::pow(x, -kappa) * std::exp(-x)) / (-kappa);
    };
    return std::pow(lam, kappa) * (upper_neg(lam * u1) - upper_neg(lam * u2));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must be in (0,1)");
    // Wichura's algorithm AS 241 (PPND16).
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e0) *
                    r +
                3.64784832476320460504e0) *
                   r +
               5.76949722146069140550e0) *
                  r +
              4.63033784615654529590e0) *
                 r +
             1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e0) *
                  r +
              2.05319162663775882187e0) *
                 r +
             1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e0) *
                  r +
              5.46378491116411436990e0) *
                 r +
             6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
    }
    return (q < 0.0) ? -v : v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace flurlab
