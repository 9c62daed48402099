#include "flurlab/tfbm2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace flurlab {

void TfbmParams::validate() const {
    if (!(d > -0.5)) throw DomainError("TfbmParams: d > -1/2 required");
    if (lambda < 0.0) throw DomainError("TfbmParams: lambda >= 0 required");
    if (!(sigma2 > 0.0)) throw DomainError("TfbmParams: sigma2 > 0 required");
}

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

double pow_exp(double x, double d, double lambda) {
    return x > 0.0 ? std::pow(x, d) * std::exp(-lambda * x) : 0.0;
}

}  // namespace

double kernel_h(const TfbmParams& params, double t, double y) {
    params.validate();
    if (t < 0.0) throw DomainError("kernel_h: t >= 0 required");
    if (t == 0.0) return 0.0;
    const double d = params.d, lam = params.lambda;
    double h = pow_exp(pos(t - y), d, lam) - pow_exp(pos(-y), d, lam);
    if (lam > 0.0 && y < t) {
        const double a = std::max(0.0, y);
        h += lam * power_exp_integral(d + 1.0, lam, a - y, t - y);
    }
    return h;
}

double kernel_h_quadrature(const TfbmParams& params, double t, double y,
                           const QuadratureSpec& spec) {
    params.validate();
    if (t < 0.0) throw DomainError("kernel_h_quadrature: t >= 0 required");
    if (t == 0.0) return 0.0;
    const double d = params.d, lam = params.lambda;
    double h = pow_exp(pos(t - y), d, lam) - pow_exp(pos(-y), d, lam);
    if (lam > 0.0 && y < t) {
        std::vector<double> bp;
        if (y > 0.0 && y < t) bp.push_back(y);
        h += lam * quad_1d([&](double s) { return pow_exp(pos(s - y), d, lam); }, 0.0, t, spec, bp);
    }
    return h;
}

double tfi_indicator_identity_check(const TfbmParams& params, double t, double y) {
    params.validate();
    if (!(params.d > 0.0)) throw DomainError("tfi_indicator_identity_check: d > 0 required");
    if (t == 0.0) return 0.0;
    double tfi = 0.0;
    if (y < t) {
        const double a = std::max(0.0, y);
        tfi = power_exp_integral(params.d, params.lambda, a - y, t - y) / gamma_fn(params.d);
    }
    return std::fabs(gamma_fn(params.d + 1.0) * tfi - kernel_h(params, t, y));
}

double covariance_constant(double d, double lambda) {
    return 1.0 / (std::sqrt(M_PI) * gamma_fn(d) * std::pow(2.0 * lambda, d - 0.5));
}

namespace {

double bessel_density(double d, double lambda, double r) {
    if (r < 1e-290) return 0.0;  // measure-zero diagonal guard
    return std::pow(r, d - 0.5) * bessel_k(d - 0.5, lambda * r);
}

void require_covariance_domain(const TfbmParams& p) {
    p.validate();
    if (!(p.d > 0.0 && p.lambda > 0.0))
        throw DomainError("covariance: closed form needs d > 0, lambda > 0");
}

}  // namespace

double covariance(const TfbmParams& params, double t, double s, const QuadratureSpec& spec) {
    require_covariance_domain(params);
    if (t < 0.0 || s < 0.0) throw DomainError("covariance: t, s >= 0");
    if (t == 0.0 || s == 0.0) return 0.0;
    const double d = params.d, lam = params.lambda;
    auto g = [&](double u, double v) { return bessel_density(d, lam, std::fabs(u - v)); };
    const double val = quad_2d_singular_diagonal(g, Rectangle{0.0, t, 0.0, s},
                                                 std::min(2.0 * d - 1.0, 0.0), spec);
    return params.sigma2 * covariance_constant(d, lam) * val;
}

namespace {

// V(a) = int_0^a int_0^a F(|u-v|) du dv = 2 int_0^a (a-r) F(r) dr
class CovarianceTable {
  public:
    CovarianceTable(const TfbmParams& p, const QuadratureSpec& spec) : p_(p), spec_(spec) {}

    double operator()(double t, double s) {
        if (t == 0.0 || s == 0.0) return 0.0;
        const double v = 0.5 * (V(t) + V(s) - V(std::fabs(t - s)));
        return p_.sigma2 * covariance_constant(p_.d, p_.lambda) * v;
    }

  private:
    double V(double a) {
        if (a == 0.0) return 0.0;
        auto it = cache_.find(a);
        if (it != cache_.end()) return it->second;
        const double d = p_.d, lam = p_.lambda;
        const double v = 2.0 * quad_1d(
                                   [&](double r) {
                                       return (a - r) * bessel_density(d, lam, r);
                                   },
                                   0.0, a, spec_);
        cache_.emplace(a, v);
        return v;
    }

    TfbmParams p_;
    QuadratureSpec spec_;
    std::map<double, double> cache_;
};

}  // namespace

double covariance_harmonizable_oracle(const TfbmParams& params, double t, double s,
                                      double tail_tol) {
    params.validate();
    const double d = params.d, lam = params.lambda;
    if (lam == 0.0 && !(std::fabs(d) < 0.5))
        throw DomainError("covariance_harmonizable_oracle: lambda = 0 needs |d| < 1/2");
    if (t == 0.0 || s == 0.0) return 0.0;
    const double omega_max =
        std::pow(4.0 * params.sigma2 / (M_PI * (1.0 + 2.0 * d) * (0.5 * tail_tol)),
                 1.0 / (1.0 + 2.0 * d));
    auto f = [&](double w) {
        const double st = std::sin(0.5 * w * t), ss = std::sin(0.5 * w * s),
                     sd = std::sin(0.5 * w * (t - s));
        const double num = 2.0 * (st * st + ss * ss - sd * sd);
        return num / (w * w) * std::pow(lam * lam + w * w, -d);
    };
    // initial subdivision at oscillation-period blocks
    const double period = M_PI / std::max({t, s, 1.0});
    std::vector<double> bp;
    for (double w = period; w < omega_max; w += period) bp.push_back(w);
    QuadratureSpec spec;
    spec.abs_tol = 0.5 * tail_tol;
    spec.rel_tol = 1e-9;
    spec.max_subdivisions = 200000;
    const double core = quad_1d(f, 0.0, omega_max, spec, bp);
    return params.sigma2 * core / M_PI;
}

double variance_timedomain_oracle(const TfbmParams& params, double t, const QuadratureSpec& spec) {
    params.validate();
    if (!(t > 0.0)) return 0.0;
    const double d = params.d, lam = params.lambda;
    const double g2 = gamma_fn(d + 1.0) * gamma_fn(d + 1.0);
    auto h2 = [&](double y) {
        const double h = kernel_h(params, t, y);
        return h * h;
    };
    if (lam > 0.0) {
        // |h| <= 3 (t + |y|)^d e^{-lam |y|} for y <= -t
        double Y = std::max(4.0 * t, 8.0 / lam);
        auto tail_bound = [&](double yy) {
            return 9.0 * std::pow(t + yy, 2.0 * d) * std::exp(-2.0 * lam * yy) / (2.0 * lam) * 2.0;
        };
        while (tail_bound(Y) > 0.25 * spec.abs_tol) Y *= 1.5;
        return params.sigma2 * quad_1d(h2, -Y, t, spec, {0.0}) / g2;
    }
    if (!(std::fabs(d) < 0.5))
        throw DomainError("variance_timedomain_oracle: lambda = 0 needs |d| < 1/2");
    // lambda = 0: algebraic tail h = sum_{j>=1} binom(d,j) t^j |y|^{d-j}
    const double Y = 50.0 * t;
    const double core = quad_1d(h2, -Y, t, spec, {0.0});
    const int jmax = 8;
    std::vector<double> binom(jmax + 1);
    binom[0] = 1.0;
    for (int j = 1; j <= jmax; ++j)
        binom[j] = binom[j - 1] * (d - static_cast<double>(j - 1)) / static_cast<double>(j);
    double tail = 0.0;
    for (int j = 1; j <= jmax; ++j)
        for (int k = 1; j + k <= jmax; ++k) {
            const double expo = 2.0 * d - j - k + 1.0;
            tail += binom[j] * binom[k] * std::pow(t, j + k) * std::pow(Y, expo) / (-expo);
        }
    return params.sigma2 * (core + tail) / g2;
}

TfbmSampler::TfbmSampler(const TfbmParams& params, std::vector<double> times)
    : params_(params), times_(std::move(times)) {
    require_covariance_domain(params_);
    if (times_.empty() || times_.size() > 2048)
        throw DomainError("sample_path_cholesky: 1..2048 grid points");
    if (!std::is_sorted(times_.begin(), times_.end()) || times_.front() < 0.0)
        throw DomainError("sample_path_cholesky: times sorted and >= 0");
    for (std::size_t i = 0; i < times_.size(); ++i)
        if (times_[i] > 0.0) active_.push_back(i);
    if (active_.empty()) return;

    QuadratureSpec spec;
    spec.abs_tol = 1e-11;
    spec.rel_tol = 1e-9;
    CovarianceTable cov(params_, spec);
    const std::size_t m = active_.size();
    cov_ = Mat(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = cov(times_[active_[i]], times_[active_[j]]);
            cov_(i, j) = v;
            cov_(j, i) = v;
        }
    auto ch = cholesky_jittered(cov_, 1e-8);
    lower_ = std::move(ch.lower);
    jitter_ = ch.jitter;
}

GridPath TfbmSampler::sample(const SeedTree& seeds) const {
    GridPath out;
    out.times = times_;
    out.params = params_;
    out.values.assign(times_.size(), 0.0);
    out.cholesky_jitter = jitter_;
    if (active_.empty()) return out;
    const std::size_t m = active_.size();
    auto z = gaussian_stream(seeds, m);
    for (std::size_t i = 0; i < m; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j <= i; ++j) v += lower_(i, j) * z[j];
        out.values[active_[i]] = v;
    }
    return out;
}

GridPath sample_path_cholesky(const TfbmParams& params, const std::vector<double>& times,
                              const SeedTree& seeds) {
    TfbmSampler sampler(params, times);
    return sampler.sample(seeds);
}

GridPath sample_path_invariance(const ProcessSpec& spec, double lambda_star, long nh,
                                const std::vector<double>& times, const SeedTree& seeds) {
    if (nh < 1024) throw DomainError("sample_path_invariance: nh >= 1024");
    if (!(lambda_star >= 0.0)) throw DomainError("sample_path_invariance: lambda* >= 0");
    for (double t : times)
        if (t < 0.0 || t > 2.0) throw DomainError("sample_path_invariance: grid in [0,2]");

    const long n = 2 * nh;
    TemperingRegime regime = TemperingRegime::fixed(lambda_star / static_cast<double>(nh));
    auto path = simulate(spec, regime, n, seeds);
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long j = 0; j < n; ++j)
        prefix[static_cast<std::size_t>(j) + 1] = prefix[static_cast<std::size_t>(j)] + path.values[static_cast<std::size_t>(j)];

    const double scale = std::pow(static_cast<double>(nh), -(spec.d + 0.5));
    GridPath out;
    out.times = times;
    out.params = TfbmParams{spec.d, lambda_star, spec.sigma * spec.sigma};
    out.values.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const long k = std::min<long>(n, static_cast<long>(std::floor(static_cast<double>(nh) * times[i])));
        out.values[i] = scale * prefix[static_cast<std::size_t>(k)];
    }
    return out;
}

void write_grid_path_csv(const GridPath& path, const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "w");
    if (!f) throw NumericalError("write_grid_path_csv: cannot open " + filename);
    std::fprintf(f, "t,value\n");
    for (std::size_t i = 0; i < path.times.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", path.times[i], path.values[i]);
    std::fclose(f);
}

}  // namespace flurlab
