#include "flurlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "flurlab/parallel.hpp"
#include "flurlab/tfbm2.hpp"

namespace flurlab {

KernelSpec KernelSpec::builtin(KernelName name) {
    KernelSpec s;
    s.name = name;
    switch (name) {
        case KernelName::Epanechnikov:
            s.k = [](double u) { return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; };
            s.k_prime = [](double u) { return std::fabs(u) <= 1.0 ? -1.5 * u : 0.0; };
            break;
        case KernelName::Biweight:
            s.k = [](double u) {
                if (std::fabs(u) > 1.0) return 0.0;
                const double w = 1.0 - u * u;
                return 0.9375 * w * w;
            };
            s.k_prime = [](double u) {
                if (std::fabs(u) > 1.0) return 0.0;
                return -3.75 * u * (1.0 - u * u);
            };
            break;
        case KernelName::Triweight:
            s.k = [](double u) {
                if (std::fabs(u) > 1.0) return 0.0;
                const double w = 1.0 - u * u;
                return 1.09375 * w * w * w;
            };
            s.k_prime = [](double u) {
                if (std::fabs(u) > 1.0) return 0.0;
                const double w = 1.0 - u * u;
                return -6.5625 * u * w * w;
            };
            break;
        case KernelName::Cosine:
            s.k = [](double u) {
                return std::fabs(u) <= 1.0 ? 0.25 * M_PI * std::cos(0.5 * M_PI * u) : 0.0;
            };
            s.k_prime = [](double u) {
                return std::fabs(u) <= 1.0 ? -0.125 * M_PI * M_PI * std::sin(0.5 * M_PI * u) : 0.0;
            };
            break;
        case KernelName::UserSupplied:
            throw DomainError("KernelSpec: UserSupplied needs explicit k and k_prime");
    }
    return s;
}

KernelSpec KernelSpec::by_name(const std::string& name) {
    if (name == "epanechnikov") return builtin(KernelName::Epanechnikov);
    if (name == "biweight") return builtin(KernelName::Biweight);
    if (name == "triweight") return builtin(KernelName::Triweight);
    if (name == "cosine") return builtin(KernelName::Cosine);
    throw DomainError("unknown kernel: " + name);
}

void KernelSpec::validate() const {
    if (!k || !k_prime) throw DomainError("KernelSpec: k and k_prime required");
    for (double u : {0.1, 0.37, 0.5, 0.81, 0.99})
        if (std::fabs(k(u) - k(-u)) > 1e-12) throw DomainError("KernelSpec: kernel not symmetric");
    const double mass = quad_1d(k, -1.0, 1.0, {1e-11, 1e-11, 2000});
    if (std::fabs(mass - 1.0) > 1e-10) throw DomainError("KernelSpec: kernel does not integrate to 1");
    for (double u = -1.0; u <= 1.0; u += 1.0 / 64.0)
        if (!(std::fabs(k_prime(u)) < 1e6)) throw DomainError("KernelSpec: unbounded derivative");
}

double priestley_chao(const std::vector<double>& y, double x0, double h, const KernelSpec& kernel) {
    const long n = static_cast<long>(y.size());
    if (n < 2) throw DomainError("priestley_chao: empty sample");
    if (!(h > 0.0 && h < 1.0)) throw DomainError("priestley_chao: h in (0,1)");
    if (!(x0 - h > 0.0 && x0 + h < 1.0))
        throw DomainError("priestley_chao: x0 within h of the boundary");
    const double nh = static_cast<double>(n) * h;
    const long j_lo = std::max<long>(1, static_cast<long>(std::floor(static_cast<double>(n) * x0 - nh)));
    const long j_hi = std::min<long>(n, static_cast<long>(std::ceil(static_cast<double>(n) * x0 + nh)));
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j)
        acc += kernel.k((static_cast<double>(n) * x0 - static_cast<double>(j)) / nh) *
               y[static_cast<std::size_t>(j - 1)];
    return acc / nh;
}

double priestley_chao_weight_sum(long n, double x0, double h, const KernelSpec& kernel) {
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    return priestley_chao(ones, x0, h, kernel);
}

double scale_factor(const TemperingRegime& regime, long n, double h, double d) {
    const double nh = static_cast<double>(n) * h;
    if (regime.classify() == TemperingClass::Strong)
        return std::pow(regime.lambda_at(static_cast<double>(n)), d) / std::sqrt(nh);
    return std::pow(nh, -(d + 0.5));
}

namespace {

// 2 int_0^2 A(r) F(r) dr with A the kernel autocorrelation; the substitution
// r = tau^{1/(1+alpha)} makes the declared r^alpha singularity at 0 regular
double kernel_double_integral(const KernelSpec& kernel, const std::function<double(double)>& F,
                              double alpha) {
    QuadratureSpec inner{1e-12, 1e-10, 2000};
    auto A = [&](double r) {
        if (r >= 2.0) return 0.0;
        return quad_1d([&](double u) { return kernel.k(u) * kernel.k(u + r); }, -1.0, 1.0 - r,
                       inner);
    };
    const double p = 1.0 + std::min(alpha, 0.0);
    QuadratureSpec outer{1e-10, 1e-8, 4000};
    return 2.0 * quad_1d(
                     [&](double tau) {
                         const double r = std::pow(tau, 1.0 / p);
                         const double jac = (p == 1.0) ? 1.0 : std::pow(tau, 1.0 / p - 1.0) / p;
                         return A(r) * F(r) * jac;
                     },
                     0.0, std::pow(2.0, p), outer);
}

}  // namespace

double variance_strong(double sigma2, const KernelSpec& kernel) {
    QuadratureSpec spec{1e-12, 1e-10, 2000};
    return sigma2 * quad_1d([&](double u) { return kernel.k(u) * kernel.k(u); }, -1.0, 1.0, spec);
}

double variance_weak_printed(double d, double sigma2, const KernelSpec& kernel) {
    if (!(d > 0.0 && d < 0.5)) throw DomainError("variance_weak_printed: 0 < d < 1/2");
    return sigma2 * kernel_double_integral(
                        kernel, [&](double r) { return std::pow(r, 2.0 * d - 1.0); },
                        2.0 * d - 1.0);
}

double variance_weak_operator(double d, double sigma2, const KernelSpec& kernel) {
    const double cf = gamma_fn(1.0 - 2.0 * d) / (gamma_fn(d) * gamma_fn(1.0 - d));
    return cf * variance_weak_printed(d, sigma2, kernel);
}

double variance_moderate(double d, double lambda_star, double sigma2, const KernelSpec& kernel) {
    if (!(d > 0.0)) throw DomainError("variance_moderate: d > 0");
    if (!(lambda_star > 0.0) || std::isinf(lambda_star))
        throw DomainError("variance_moderate: lambda* in (0,inf)");
    const double nu = d - 0.5;
    const double c = covariance_constant(d, lambda_star);
    return sigma2 * c *
           kernel_double_integral(
               kernel,
               [&](double r) {
                   if (r < 1e-290) return 0.0;
                   return std::pow(r, nu) * bessel_k(nu, lambda_star * r);
               },
               std::min(2.0 * d - 1.0, 0.0));
}

double asymptotic_variance(const TemperingRegime& regime, double d, double lambda_star,
                           double sigma2, const KernelSpec& kernel) {
    switch (regime.classify()) {
        case TemperingClass::Strong:
            return variance_strong(sigma2, kernel);
        case TemperingClass::Weak:
            return variance_weak_printed(d, sigma2, kernel);
        case TemperingClass::Moderate:
            return variance_moderate(d, lambda_star, sigma2, kernel);
    }
    throw DomainError("asymptotic_variance: unknown regime");
}

double optimal_bandwidth(double d, double lambda, const KernelSpec& kernel, double m2_l2, long n) {
    if (!(lambda > 0.0)) throw DomainError("optimal_bandwidth: lambda > 0 (fixed tempering)");
    if (!(m2_l2 > 0.0)) throw DomainError("optimal_bandwidth: int (m'')^2 must be positive");
    if (n < 2) throw DomainError("optimal_bandwidth: n >= 2");
    QuadratureSpec spec{1e-12, 1e-10, 2000};
    const double k2 = quad_1d([&](double u) { return kernel.k(u) * kernel.k(u); }, -1.0, 1.0, spec);
    const double u2k = quad_1d([&](double u) { return u * u * kernel.k(u); }, -1.0, 1.0, spec);
    const double num = std::pow(-std::expm1(-lambda), -2.0 * d) * k2;
    return std::pow(num / (u2k * u2k * m2_l2), 0.2) * std::pow(static_cast<double>(n), -0.2);
}

WeightedSumLimitResult weighted_sum_limit_check(const ProcessSpec& spec,
                                                const TemperingRegime& regime, long n, double h,
                                                const KernelSpec& kernel, const SeedTree& seeds,
                                                int replications, int threads) {
    kernel.validate();
    if (replications < 2) throw DomainError("weighted_sum_limit_check: need replications >= 2");
    const double x0 = 0.5;
    const double nh = static_cast<double>(n) * h;
    const double lambda_star = regime.lambda_star();

    // lhs: scaled weighted sums of the simulated process; in the moderate
    // regime the tempering is tied to the statistic horizon nh
    TemperingRegime sim_regime = regime;
    if (regime.classify() == TemperingClass::Moderate)
        sim_regime = TemperingRegime::fixed(lambda_star / nh);
    const double scale = scale_factor(sim_regime, n, h, spec.d);

    std::vector<double> lhs(static_cast<std::size_t>(replications));
    parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
        auto path = simulate(spec, sim_regime, n, seeds.child(0).child(r));
        lhs[r] = scale * (priestley_chao(path.values, x0, h, kernel) * nh);
    });

    // rhs: int_0^2 K'(1-t) B(t) dt on exact limit-process paths
    const std::size_t grid_n = 257;
    std::vector<double> times(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i)
        times[i] = 2.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    const double dt = times[1] - times[0];

    std::vector<double> rhs(static_cast<std::size_t>(replications));
    const bool brownian = (spec.d == 0.0);
    std::unique_ptr<TfbmSampler> sampler;
    if (!brownian) {
        TfbmParams params{spec.d, lambda_star, spec.sigma * spec.sigma};
        sampler = std::make_unique<TfbmSampler>(params, times);
    }
    parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
        std::vector<double> b(grid_n, 0.0);
        if (brownian) {
            RandomStream rs(seeds.child(1).child(r));
            for (std::size_t i = 1; i < grid_n; ++i)
                b[i] = b[i - 1] + spec.sigma * std::sqrt(dt) * rs.next_gaussian();
        } else {
            b = sampler->sample(seeds.child(1).child(r)).values;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < grid_n; ++i) {
            const double w = (i == 0 || i + 1 == grid_n) ? 0.5 : 1.0;
            acc += w * kernel.k_prime(1.0 - times[i]) * b[i];
        }
        rhs[r] = acc * dt;
    });

    auto var_se = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return std::pair<double, double>(var, var * std::sqrt(2.0 / static_cast<double>(v.size() - 1)));
    };
    WeightedSumLimitResult out;
    std::tie(out.lhs_variance, out.lhs_se) = var_se(lhs);
    std::tie(out.rhs_variance, out.rhs_se) = var_se(rhs);
    out.ratio = out.lhs_variance / out.rhs_variance;
    out.formula_variance =
        asymptotic_variance(regime, spec.d, lambda_star, spec.sigma * spec.sigma, kernel);
    if (regime.classify() == TemperingClass::Weak)
        out.formula_variance = variance_weak_operator(spec.d, spec.sigma * spec.sigma, kernel);
    if (spec.d == 0.0) out.formula_variance = variance_strong(spec.sigma * spec.sigma, kernel);
    return out;
}

}  // namespace flurlab
