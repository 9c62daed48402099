#include "flurlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace flurlab {

namespace {

// QUADPACK dqk15 nodes and weights on [-1,1].
constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * xgk[j]);
        fv[14 - j] = f(c + h * xgk[j]);
    }
    fv[7] = f(c);
    double resk = wgk[7] * fv[7];
    double resg = wg[3] * fv[7];
    double resabs = wgk[7] * std::fabs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        resk += wgk[j] * (fv[j] + fv[14 - j]);
        resabs += wgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
        if (j % 2 == 1) resg += wg[j / 2] * (fv[j] + fv[14 - j]);
    }
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::fabs(fv[7] - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));
    resasc *= h;
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (!std::isfinite(resk)) throw QuadratureError("quad_1d: non-finite integrand value");
    return {a, b, resk * h, err};
}

}  // namespace

double quad_1d(const std::function<double(double)>& f, double a, double b,
               const QuadratureSpec& spec, std::vector<double> breakpoints) {
    spec.validate();
    if (!(a < b)) throw DomainError("quad_1d: requires a < b");

    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::priority_queue<Segment> heap;
    double total = 0.0, heap_err = 0.0, frozen_err = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Segment s = gk15(f, pts[i], pts[i + 1]);
        total += s.value;
        heap_err += s.error;
        heap.push(s);
    }
    int splits = 0;
    const double eps = std::numeric_limits<double>::epsilon();
    while (heap_err + frozen_err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
        if (splits >= spec.max_subdivisions)
            throw QuadratureError("quad_1d: max_subdivisions exhausted");
        if (heap.empty())
            throw QuadratureError("quad_1d: tolerance unreachable in double precision");
        Segment worst = heap.top();
        heap.pop();
        heap_err -= worst.error;
        // splitting below a few hundred ulps would put Kronrod nodes onto the
        // (possibly singular) endpoints; keep the segment's error instead
        const double wscale = std::max({std::fabs(worst.a), std::fabs(worst.b), 1e-6});
        if (worst.b - worst.a < 256.0 * eps * wscale) {
            frozen_err += worst.error;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Segment l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        heap_err += l.error + r.error;
        heap.push(l);
        heap.push(r);
        ++splits;
    }
    return total;
}

double quad_2d_singular_diagonal(const std::function<double(double, double)>& g,
                                 const Rectangle& dom, double singularity_exponent,
                                 const QuadratureSpec& spec) {
    spec.validate();
    if (!(singularity_exponent > -1.0))
        throw DomainError("quad_2d_singular_diagonal: exponent must be > -1");
    if (!(dom.ua < dom.ub) || !(dom.va < dom.vb))
        throw DomainError("quad_2d_singular_diagonal: empty rectangle");

    QuadratureSpec inner = spec;
    inner.abs_tol = std::max(spec.abs_tol / (dom.ub - dom.ua), 1e-13);
    inner.rel_tol = std::max(spec.rel_tol * 0.1, 1e-12);

    // the inner integral splits at v = u; on each side the substitution
    // t = tau^{1/(1+alpha)} turns the declared |u-v|^alpha endpoint
    // singularity into a regular integrand
    const double p = 1.0 + std::min(singularity_exponent, 0.0);
    auto half = [&](double u, double width, double side) {
        if (!(width > 0.0)) return 0.0;
        const double T = std::pow(width, p);
        return quad_1d(
            [&](double tau) {
                const double t = std::pow(tau, 1.0 / p);
                const double jac = (p == 1.0) ? 1.0 : std::pow(tau, 1.0 / p - 1.0) / p;
                return g(u, u + side * t) * jac;
            },
            0.0, T, inner);
    };
    auto outer = [&](double u) {
        if (u <= dom.va || u >= dom.vb)  // diagonal outside the v-range: regular slice
            return quad_1d([&](double v) { return g(u, v); }, dom.va, dom.vb, inner);
        return half(u, u - dom.va, -1.0) + half(u, dom.vb - u, +1.0);
    };
    QuadratureSpec outer_spec = spec;
    return quad_1d(outer, dom.ua, dom.ub, outer_spec, {dom.va, dom.vb});
}

}  // namespace flurlab
