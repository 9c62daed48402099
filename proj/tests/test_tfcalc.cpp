#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "flurlab/special.hpp"
#include "flurlab/tfcalc.hpp"

using namespace flurlab;

namespace {

SampledFunction sample_on(double lo, double hi, double dx, double (*f)(double)) {
    SampledFunction s;
    s.lo = lo;
    s.dx = dx;
    const long n = static_cast<long>(std::round((hi - lo) / dx)) + 1;
    s.values.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        s.values[static_cast<std::size_t>(i)] = f(lo + dx * static_cast<double>(i));
    return s;
}

double indicator01(double s) { return (s >= 0.0 && s <= 1.0) ? 1.0 : 0.0; }

// smooth compactly supported bump on [0,1]
double bump(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double w = 2.0 * s - 1.0;
    const double v = 1.0 - w * w;
    return v * v * v * v;
}

}  // namespace

TEST_CASE("tfi of the unit indicator at kappa=1, lambda=0 (minus kernel)") {
    auto f = sample_on(0.0, 1.0, 1.0 / 512.0, indicator01);
    auto g = tfi(f, 1.0, 0.25, OperatorSign::Minus);
    // exact: int_{max(y,0)}^{1} e^{-lam (s-y)} ds
    auto exact = [](double y) {
        const double lam = 0.25;
        if (y >= 1.0) return 0.0;
        const double a = std::max(y, 0.0);
        return (std::exp(-lam * (a - y)) - std::exp(-lam * (1.0 - y))) / lam;
    };
    for (double y : {-1.0, -0.25, 0.0, 0.5, 0.9, 2.0})
        CHECK(g.eval(y) == doctest::Approx(exact(y)).epsilon(5e-3));
    // kappa = 1, lambda = 0: I f(y) is the remaining length of [0,1] past y
    auto g0 = tfi(f, 1.0, 0.0, OperatorSign::Minus);
    CHECK(g0.eval(0.0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(g0.eval(0.5) == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(g0.eval(2.0) == 0.0);
}

TEST_CASE("tfi linearity is exact (same weights)") {
    auto f1 = sample_on(0.0, 1.0, 1.0 / 256.0, bump);
    auto f2 = sample_on(0.0, 1.0, 1.0 / 256.0, indicator01);
    SampledFunction combo = f1;
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * f1.values[i] - 3.0 * f2.values[i];
    auto g1 = tfi(f1, 0.3, 1.0, OperatorSign::Minus);
    auto g2 = tfi(f2, 0.3, 1.0, OperatorSign::Minus);
    auto gc = tfi(combo, 0.3, 1.0, OperatorSign::Minus);
    for (std::size_t i = 0; i < gc.values.size(); ++i)
        CHECK(gc.values[i] ==
              doctest::Approx(2.0 * g1.values[i] - 3.0 * g2.values[i]).epsilon(1e-12));
}

TEST_CASE("tfi of zero is zero and domain errors fire") {
    auto z = sample_on(0.0, 1.0, 0.125, [](double) { return 0.0; });
    auto g = tfi(z, 0.3, 1.0, OperatorSign::Minus);
    for (double v : g.values) CHECK(v == 0.0);
    CHECK_THROWS_AS(tfi(z, -0.1, 1.0, OperatorSign::Minus), DomainError);
    CHECK_THROWS_AS(tfd(z, 1.3, 1.0, OperatorSign::Minus), DomainError);
    CHECK_THROWS_AS(tfd(z, 0.3, 0.0, OperatorSign::Minus), DomainError);
}

TEST_CASE("tfd of a constant is lambda^kappa times the constant") {
    // wide support so the difference term sees an effectively constant f
    auto f = sample_on(-40.0, 40.0, 1.0 / 64.0, [](double) { return 2.5; });
    auto g = tfd(f, 0.3, 1.0, OperatorSign::Minus);
    CHECK(g.eval(0.0) == doctest::Approx(2.5 * std::pow(1.0, 0.3)).epsilon(1e-6));
    auto g2 = tfd(f, 0.45, 0.5, OperatorSign::Minus);
    CHECK(g2.eval(-3.0) == doctest::Approx(2.5 * std::pow(0.5, 0.45)).epsilon(1e-6));
}

TEST_CASE("tfd inverts tfi on a smooth bump") {
    const double dx = std::pow(2.0, -12.0);
    auto f = sample_on(0.0, 1.0, dx, bump);
    const double kappa = 0.3, lambda = 1.0;
    auto fi = tfi(f, kappa, lambda, OperatorSign::Minus);
    auto fd = tfd(fi, kappa, lambda, OperatorSign::Minus);
    double sup = 0.0;
    for (double y = 0.0; y <= 1.0; y += 1.0 / 128.0)
        sup = std::max(sup, std::fabs(fd.eval(y) - bump(y)));
    CHECK(sup < 1e-4);
}

TEST_CASE("plus sign mirrors minus") {
    auto f = sample_on(0.0, 1.0, 1.0 / 512.0, bump);
    auto gm = tfi(f, 0.3, 1.0, OperatorSign::Minus);
    auto gp = tfi(f, 0.3, 1.0, OperatorSign::Plus);
    // bump is symmetric about 1/2, so I^+ f(y) = I^- f(1 - y)
    for (double y : {0.2, 0.5, 1.1, 1.7})
        CHECK(gp.eval(y) == doctest::Approx(gm.eval(1.0 - y)).epsilon(1e-9));
}

TEST_CASE("fourier symbol of the minus integral is (lambda + i omega)^{-kappa}") {
    const double dx = std::pow(2.0, -10.0);
    auto f = sample_on(0.0, 1.0, dx, bump);
    const double kappa = 0.3, lambda = 1.0;
    auto g = tfi(f, kappa, lambda, OperatorSign::Minus);
    for (double w : {0.5, 1.0, 2.0}) {
        // hat(f)(w) = int e^{iwy} f(y) dy by direct sums
        auto transform = [&](const SampledFunction& s) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                const double y = s.lo + s.dx * static_cast<double>(i);
                acc += s.values[i] * std::polar(1.0, w * y);
            }
            return acc * s.dx;
        };
        const auto lhs = transform(g);
        const auto rhs = std::pow(std::complex<double>(lambda, w), -kappa) * transform(f);
        CHECK(std::abs(lhs - rhs) < 1e-4);
    }
}

TEST_CASE("weighted_l2_inner closed forms") {
    auto ind = sample_on(0.0, 1.0, 1.0 / 1024.0, indicator01);
    CHECK(weighted_l2_inner(ind, ind) == doctest::Approx(1.0).epsilon(2e-3));
    auto left = sample_on(-2.0, -1.0, 1.0 / 256.0, [](double) { return 1.0; });
    CHECK(weighted_l2_inner(ind, left) == 0.0);
}

TEST_CASE("piecewise polynomial exact layer: eval, moments, inner") {
    // f(s) = 1 + 2s on [0, 1/2), 3(s-1/2) on [1/2, 1]
    PiecewisePolynomial f({PolyPiece{0.0, 0.5, {1.0, 2.0}}, PolyPiece{0.5, 1.0, {-1.5, 3.0}}});
    CHECK(f.eval(0.25) == doctest::Approx(1.5));
    CHECK(f.eval(0.75) == doctest::Approx(0.75));
    CHECK(f.eval(1.0) == doctest::Approx(1.5));  // closed at the support end
    CHECK(f.eval(1.5) == 0.0);
    CHECK(f.moment(0) == doctest::Approx(0.5 + 0.25 + 3.0 * 0.125).epsilon(1e-14));
    PiecewisePolynomial ind = PiecewisePolynomial::indicator(0.0, 1.0);
    CHECK(ind.inner(ind) == doctest::Approx(1.0));
    CHECK(f.inner(ind) == doctest::Approx(f.moment(0)).epsilon(1e-14));
}

TEST_CASE("exact pwpoly TFI matches quadrature") {
    PiecewisePolynomial f({PolyPiece{0.0, 0.5, {1.0, 2.0}}, PolyPiece{0.5, 1.0, {-1.5, 3.0}}});
    const double kappa = 0.3, lambda = 1.0;
    QuadratureSpec spec{1e-12, 1e-11, 4000};
    for (double y : {-2.0, -0.3, 0.1, 0.6, 0.95}) {
        const double lo = std::max(y, 0.0);
        // substitute u - y = tau^{1/kappa} so the endpoint singularity is exact
        auto integrand = [&](double tau) {
            const double u = std::pow(tau, 1.0 / kappa);
            return f.eval(y + u) * std::exp(-lambda * u) / kappa;
        };
        const double oracle =
            quad_1d(integrand, std::pow(lo - y, kappa), std::pow(1.0 - y, kappa), spec,
                    {std::pow(std::max(0.5 - y, 0.0), kappa)}) /
            gamma_fn(kappa);
        CHECK(tfi_pwpoly_minus(f, kappa, lambda, y) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("grid tfi agrees with the exact pwpoly route on a polynomial piece") {
    PiecewisePolynomial fp({PolyPiece{0.0, 1.0, {0.0, 1.0}}});  // f(s) = s on [0,1]
    auto fg = sample_on(0.0, 1.0, std::pow(2.0, -12.0), [](double s) { return indicator01(s) * s; });
    auto gi = tfi(fg, 0.45, 0.5, OperatorSign::Minus);
    for (double y : {-1.0, 0.2, 0.7})
        CHECK(gi.eval(y) == doctest::Approx(tfi_pwpoly_minus(fp, 0.45, 0.5, y)).epsilon(5e-4));
}

TEST_CASE("tfi_inner_product: lambda > 0 against brute quadrature") {
    PiecewisePolynomial f = PiecewisePolynomial::indicator(0.0, 1.0);
    const double d = 0.3, lam = 1.0;
    const double v = tfi_inner_product(f, f, d, lam);
    QuadratureSpec spec{1e-11, 1e-9, 8000};
    const double brute = quad_1d(
        [&](double y) {
            const double t = tfi_pwpoly_minus(f, d, lam, y);
            return t * t;
        },
        -60.0, 1.0, spec, {0.0});
    CHECK(v == doctest::Approx(brute).epsilon(1e-8));
}

TEST_CASE("tfi_inner_product at lambda = 0 has the exact Beta-identity value") {
    // int (I^{d,0} 1_{[0,1]})^2 = c_F * 2/((2d)(2d+1)), c_F = G(1-2d)/(G(d)G(1-d))
    for (double d : {0.2, 0.3, 0.45}) {
        PiecewisePolynomial f = PiecewisePolynomial::indicator(0.0, 1.0);
        const double cf = gamma_fn(1.0 - 2.0 * d) / (gamma_fn(d) * gamma_fn(1.0 - d));
        const double exact = cf * 2.0 / ((2.0 * d) * (2.0 * d + 1.0));
        CHECK(tfi_inner_product(f, f, d, 0.0) == doctest::Approx(exact).epsilon(1e-7));
    }
    CHECK_THROWS_AS(
        tfi_inner_product(PiecewisePolynomial::indicator(0, 1),
                          PiecewisePolynomial::indicator(0, 1), 0.7, 0.0),
        DomainError);
}
