#include "flurlab/tfcalc.hpp"

#include <algorithm>
#include <cmath>

#include "flurlab/fft.hpp"
#include "flurlab/special.hpp"

namespace flurlab {

void SampledFunction::validate() const {
    if (values.size() < 2 || !(dx > 0.0)) throw DomainError("SampledFunction: need >= 2 nodes, dx > 0");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("SampledFunction: non-finite value");
}

double SampledFunction::eval(double y) const {
    const double t = (y - lo) / dx;
    if (t < 0.0 || t > static_cast<double>(values.size() - 1)) return 0.0;
    const std::size_t i = std::min(static_cast<std::size_t>(t), values.size() - 2);
    const double w = t - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

namespace {

SampledFunction reversed(const SampledFunction& f) {
    SampledFunction r = f;
    r.lo = -f.hi();
    std::reverse(r.values.begin(), r.values.end());
    return r;
}

// kernel window [0, U]: integral mass outside <= tol relative
double kernel_window(double kappa, double lambda, const SampledFunction& f,
                     const TfcalcOptions& opts) {
    if (lambda > 0.0) {
        double x = std::max(4.0, kappa + 1.0);
        while (gamma_q(kappa, x) > opts.kernel_tail_tol) x *= 1.5;
        return x / lambda;
    }
    return opts.lambda0_window_factor * (f.hi() - f.lo);
}

// correlation out[i] = sum_m w[m] * f[i + m] with f zero-padded
std::vector<double> correlate(const std::vector<double>& w, const std::vector<double>& fv) {
    std::vector<double> wr(w.rbegin(), w.rend());
    auto conv = convolve(wr, fv);
    // out index i corresponds to conv index i + (w.size() - 1) shifted by -(w.size()-1)
    return conv;  // caller slices
}

}  // namespace

SampledFunction tfi(const SampledFunction& f, double kappa, double lambda, OperatorSign sign,
                    const TfcalcOptions& opts) {
    f.validate();
    if (!(kappa > 0.0)) throw DomainError("tfi: kappa > 0 required");
    if (lambda < 0.0) throw DomainError("tfi: lambda >= 0 required");
    if (sign == OperatorSign::Plus) return reversed(tfi(reversed(f), kappa, lambda, OperatorSign::Minus, opts));

    const double dx = f.dx;
    const double U = kernel_window(kappa, lambda, f, opts);
    const long ncells = std::max<long>(1, static_cast<long>(std::ceil(U / dx)));
    if (ncells > (1L << 26))
        throw NumericalError("tfi: kernel window needs too many cells at this lambda and step");
    const double gk = gamma_fn(kappa);

    // product-integration hat weights: w[m] multiplies f(y + m dx)
    std::vector<double> w(static_cast<std::size_t>(ncells) + 1, 0.0);
    for (long j = 0; j < ncells; ++j) {
        const double u0 = dx * static_cast<double>(j), u1 = u0 + dx;
        const double m0 = power_exp_integral(kappa, lambda, u0, u1) / gk;
        const double m1 =
            (power_exp_integral(kappa + 1.0, lambda, u0, u1) / gk - u0 * m0);  // local first moment
        w[static_cast<std::size_t>(j)] += m0 - m1 / dx;
        w[static_cast<std::size_t>(j) + 1] += m1 / dx;
    }

    auto conv = correlate(w, f.values);
    SampledFunction out;
    out.dx = dx;
    out.lo = f.lo - dx * static_cast<double>(ncells);
    out.values.resize(f.values.size() + static_cast<std::size_t>(ncells));
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = conv[i];  // conv index i = sum_m w[m] f[i - ncells + m]
    return out;
}

SampledFunction tfd(const SampledFunction& f, double kappa, double lambda, OperatorSign sign,
                    const TfcalcOptions& opts) {
    f.validate();
    if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("tfd: 0 < kappa < 1 required");
    if (!(lambda > 0.0)) throw DomainError("tfd: lambda > 0 required");
    if (sign == OperatorSign::Plus) return reversed(tfd(reversed(f), kappa, lambda, OperatorSign::Minus, opts));

    const double dx = f.dx;
    const double U = kernel_window(1.0 - kappa, lambda, f, opts) + dx;
    const long ncells = std::max<long>(2, static_cast<long>(std::ceil(U / dx)));
    const double cfac = kappa / gamma_fn(1.0 - kappa);
    const double lk = std::pow(lambda, kappa);

    // innermost-cell Taylor surrogate moments
    const double t1 = power_exp_integral(1.0 - kappa, lambda, 0.0, dx);
    const double t2 = power_exp_integral(2.0 - kappa, lambda, 0.0, dx);
    // full mass of the kernel beyond the first cell (exact in the tail)
    const double m0_full = power_exp_integral_neg(kappa, lambda, dx, 80.0 / lambda + dx);

    // hat weights for f(y + u) over cells [dx, ncells dx]
    std::vector<double> w(static_cast<std::size_t>(ncells) + 1, 0.0);
    for (long j = 1; j < ncells; ++j) {
        const double u0 = dx * static_cast<double>(j), u1 = u0 + dx;
        const double m0 = power_exp_integral_neg(kappa, lambda, u0, u1);
        const double m1 = power_exp_integral(1.0 - kappa, lambda, u0, u1) - u0 * m0;
        w[static_cast<std::size_t>(j)] += m0 - m1 / dx;
        w[static_cast<std::size_t>(j) + 1] += m1 / dx;
    }

    const std::size_t n = f.values.size();
    auto conv = correlate(w, f.values);

    SampledFunction out;
    out.lo = f.lo;
    out.dx = dx;
    out.values.resize(n);
    auto fv = [&](long i) { return (i >= 0 && i < static_cast<long>(n)) ? f.values[static_cast<std::size_t>(i)] : 0.0; };
    for (std::size_t i = 0; i < n; ++i) {
        const long li = static_cast<long>(i);
        double d1, d2;
        if (li >= 2 && li + 2 < static_cast<long>(n)) {
            d1 = (-fv(li + 2) + 8.0 * fv(li + 1) - 8.0 * fv(li - 1) + fv(li - 2)) / (12.0 * dx);
        } else {
            d1 = (fv(li + 1) - fv(li - 1)) / (2.0 * dx);
        }
        d2 = (fv(li + 1) - 2.0 * fv(li) + fv(li - 1)) / (dx * dx);
        const double smooth = fv(li) * m0_full - conv[i + static_cast<std::size_t>(ncells)];
        out.values[i] = lk * f.values[i] + cfac * (smooth - d1 * t1 - 0.5 * d2 * t2);
    }
    return out;
}

namespace {

// cubic 4-point Lagrange interpolation on a uniform grid, zero outside
double eval_cubic(const SampledFunction& f, double y) {
    const double t = (y - f.lo) / f.dx;
    const long n = static_cast<long>(f.values.size());
    if (t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;
    long i1 = static_cast<long>(std::floor(t));
    i1 = std::clamp(i1, 1L, n - 3);
    if (n < 4) return f.eval(y);
    const double s = t - static_cast<double>(i1);
    const double fm1 = f.values[static_cast<std::size_t>(i1 - 1)], f0 = f.values[static_cast<std::size_t>(i1)],
                 f1 = f.values[static_cast<std::size_t>(i1 + 1)], f2 = f.values[static_cast<std::size_t>(i1 + 2)];
    return fm1 * (-s * (s - 1.0) * (s - 2.0) / 6.0) + f0 * ((s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0) +
           f1 * (-(s + 1.0) * s * (s - 2.0) / 2.0) + f2 * ((s + 1.0) * s * (s - 1.0) / 6.0);
}

}  // namespace

double weighted_l2_inner(const SampledFunction& f, const SampledFunction& g) {
    f.validate();
    g.validate();
    const double lo = std::max(f.lo, g.lo), hi = std::min(f.hi(), g.hi());
    if (!(lo < hi)) return 0.0;
    const double dx = std::min(f.dx, g.dx);
    const long n = static_cast<long>(std::ceil((hi - lo) / dx)) + 1;
    const double step = (hi - lo) / static_cast<double>(n - 1);
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double y = lo + step * static_cast<double>(i);
        const double v = eval_cubic(f, y) * eval_cubic(g, y);
        acc += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return acc * step;
}

// ---- exact layer -----------------------------------------------------------

PiecewisePolynomial::PiecewisePolynomial(std::vector<PolyPiece> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(), [](const PolyPiece& x, const PolyPiece& y) { return x.a < y.a; });
    for (const auto& p : pieces_)
        if (!(p.a < p.b) || p.coeffs.empty()) throw DomainError("PiecewisePolynomial: bad piece");
}

PiecewisePolynomial PiecewisePolynomial::indicator(double a, double b) {
    return PiecewisePolynomial({PolyPiece{a, b, {1.0}}});
}

double PiecewisePolynomial::eval(double s) const {
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        const bool closes_support = (p.b == support_hi());
        const bool left_ok = p.open_left ? (s > p.a) : (s >= p.a);
        const bool right_ok = (s < p.b) || (closes_support && s == p.b);
        if (left_ok && right_ok) {
            double v = 0.0;
            for (std::size_t m = p.coeffs.size(); m-- > 0;) v = v * s + p.coeffs[m];
            return v;
        }
    }
    return 0.0;
}

double PiecewisePolynomial::support_lo() const {
    if (pieces_.empty()) return 0.0;
    return pieces_.front().a;
}

double PiecewisePolynomial::support_hi() const {
    if (pieces_.empty()) return 0.0;
    double hi = pieces_.front().b;
    for (const auto& p : pieces_) hi = std::max(hi, p.b);
    return hi;
}

double PiecewisePolynomial::moment(int j) const {
    double acc = 0.0;
    for (const auto& p : pieces_)
        for (std::size_t m = 0; m < p.coeffs.size(); ++m) {
            const double e = static_cast<double>(m + static_cast<std::size_t>(j)) + 1.0;
            acc += p.coeffs[m] * (std::pow(p.b, e) - std::pow(p.a, e)) / e;
        }
    return acc;
}

double PiecewisePolynomial::inner(const PiecewisePolynomial& g) const {
    double acc = 0.0;
    for (const auto& pf : pieces_)
        for (const auto& pg : g.pieces_) {
            const double a = std::max(pf.a, pg.a), b = std::min(pf.b, pg.b);
            if (!(a < b)) continue;
            for (std::size_t m = 0; m < pf.coeffs.size(); ++m)
                for (std::size_t l = 0; l < pg.coeffs.size(); ++l) {
                    const double e = static_cast<double>(m + l) + 1.0;
                    acc += pf.coeffs[m] * pg.coeffs[l] * (std::pow(b, e) - std::pow(a, e)) / e;
                }
        }
    return acc;
}

std::vector<double> PiecewisePolynomial::breakpoints() const {
    std::vector<double> b;
    for (const auto& p : pieces_) {
        b.push_back(p.a);
        b.push_back(p.b);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

namespace {

// Taylor shift: coefficients of p(s) rewritten in powers of (s - y)
std::vector<double> shift_poly(const std::vector<double>& c, double y) {
    std::vector<double> out(c.rbegin(), c.rend());  // highest degree first
    const std::size_t deg = c.size() - 1;
    // repeated synthetic division
    std::vector<double> res(c.size());
    std::vector<double> work = out;
    for (std::size_t j = 0; j <= deg; ++j) {
        double rem = work[0];
        for (std::size_t i = 1; i < work.size(); ++i) rem = rem * y + work[i];
        res[j] = rem;
        // divide by (s - y): update work to the quotient
        std::vector<double> quot(work.size() - 1);
        if (quot.empty()) break;
        quot[0] = work[0];
        for (std::size_t i = 1; i < quot.size(); ++i) quot[i] = quot[i - 1] * y + work[i];
        work = quot;
    }
    return res;  // res[m] multiplies (s - y)^m
}

}  // namespace

double tfi_pwpoly_minus(const PiecewisePolynomial& f, double kappa, double lambda, double y) {
    if (!(kappa > 0.0)) throw DomainError("tfi_pwpoly_minus: kappa > 0");
    if (lambda < 0.0) throw DomainError("tfi_pwpoly_minus: lambda >= 0");
    const double gk = gamma_fn(kappa);
    double acc = 0.0;
    for (const auto& p : f.pieces()) {
        if (p.b <= y) continue;
        const double a = std::max(p.a, y);
        auto cs = shift_poly(p.coeffs, y);
        for (std::size_t m = 0; m < cs.size(); ++m) {
            if (cs[m] == 0.0) continue;
            acc += cs[m] *
                   power_exp_integral(kappa + static_cast<double>(m), lambda, a - y, p.b - y);
        }
    }
    return acc / gk;
}

double tfi_inner_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g,
                         double kappa, double lambda, const QuadratureSpec& spec) {
    if (!(kappa > 0.0)) throw DomainError("tfi_inner_product: kappa > 0");
    if (lambda == 0.0 && !(kappa < 0.5))
        throw DomainError("tfi_inner_product: lambda = 0 requires kappa < 1/2");
    const double hi = std::min(f.support_hi(), g.support_hi());
    const double lo = std::min(f.support_lo(), g.support_lo());
    auto bp = f.breakpoints();
    for (double b : g.breakpoints()) bp.push_back(b);

    auto integrand = [&](double s) {
        return tfi_pwpoly_minus(f, kappa, lambda, s) * tfi_pwpoly_minus(g, kappa, lambda, s);
    };

    if (lambda > 0.0) {
        double x = std::max(4.0, kappa + 1.0);
        while (gamma_q(kappa, x) > 1e-14) x *= 1.5;
        const double window = x / lambda;
        return quad_1d(integrand, lo - window, hi, spec, bp);
    }

    // lambda = 0: finite window plus the analytic algebraic tail
    const double radius = std::max({std::fabs(lo), std::fabs(hi), 1.0});
    const double y0 = lo - 50.0 * radius;
    const double core = quad_1d(integrand, y0, hi, spec, bp);

    const int jmax = 8;
    std::vector<double> mf(jmax + 1), mg(jmax + 1), binom(jmax + 1);
    for (int j = 0; j <= jmax; ++j) {
        mf[j] = f.moment(j);
        mg[j] = g.moment(j);
    }
    binom[0] = 1.0;
    for (int j = 1; j <= jmax; ++j)
        binom[j] = binom[j - 1] * (kappa - static_cast<double>(j)) / static_cast<double>(j);
    const double z0 = -y0;
    const double gk2 = gamma_fn(kappa) * gamma_fn(kappa);
    double tail = 0.0;
    for (int j = 0; j <= jmax; ++j)
        for (int k = 0; k + j <= jmax; ++k) {
            const double expo = 2.0 * kappa - 1.0 - j - k;
            tail += binom[j] * binom[k] * mf[j] * mg[k] * std::pow(z0, expo) / (-expo);
        }
    return core + tail / gk2;
}

}  // namespace flurlab
