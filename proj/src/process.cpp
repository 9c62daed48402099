#include "flurlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "flurlab/fft.hpp"

namespace flurlab {

namespace {

bool is_negative_integer(double d) {
    return d < 0.0 && d == std::floor(d);
}

// |omega_{-d}(k)| <= cbound(d) * k^{d-1} for k >= 1
double omega_bound_constant(double d) {
    if (d > 1.0) return std::exp(d - 1.0);
    if (d >= 0.0) return 1.0;
    return std::max(1.0, std::fabs(d) * std::exp(1.0 - d));
}

}  // namespace

void ProcessSpec::validate() const {
    if (is_negative_integer(d)) throw DomainError("ProcessSpec: d must not be a negative integer");
    if (!(sigma > 0.0)) throw DomainError("ProcessSpec: sigma > 0 required");
    if (lambda < 0.0) throw DomainError("ProcessSpec: lambda >= 0 required");
    if (family == CoefficientFamily::UserSupplied) {
        if (user_coefficients.empty())
            throw DomainError("ProcessSpec: UserSupplied family needs coefficients");
        if (d < 0.0) {
            // vanishing-moment sums, checked numerically up to the truncation
            double norm = 0.0;
            for (double c : user_coefficients) norm += std::fabs(c);
            const int jmax = static_cast<int>(std::floor(-d));
            for (int j = 0; j <= jmax; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < user_coefficients.size(); ++k)
                    s += std::pow(static_cast<double>(k), j) * user_coefficients[k];
                if (std::fabs(s) > 1e-6 * std::max(norm, 1.0))
                    throw DomainError("ProcessSpec: supplied coefficients violate the d<0 moment sums");
            }
        }
    }
}

TemperingRegime TemperingRegime::fixed(double lambda) {
    if (lambda < 0.0) throw DomainError("TemperingRegime: lambda >= 0");
    TemperingRegime r;
    r.schedule = Schedule::Fixed;
    r.fixed_lambda = lambda;
    return r;
}

TemperingRegime TemperingRegime::power_law(double c, double gamma) {
    if (!(c > 0.0)) throw DomainError("TemperingRegime: c > 0");
    TemperingRegime r;
    r.schedule = Schedule::PowerLaw;
    r.c = c;
    r.gamma = gamma;
    return r;
}

double TemperingRegime::lambda_at(double n) const {
    if (schedule == Schedule::Fixed) return fixed_lambda;
    return c * std::pow(n, -gamma);
}

double TemperingRegime::lambda_star() const {
    const double inf = std::numeric_limits<double>::infinity();
    if (schedule == Schedule::Fixed) return fixed_lambda > 0.0 ? inf : 0.0;
    if (gamma > 1.0) return 0.0;
    if (gamma == 1.0) return c;
    return inf;
}

TemperingClass TemperingRegime::classify() const {
    const double ls = lambda_star();
    if (ls == 0.0) return TemperingClass::Weak;
    if (std::isinf(ls)) return TemperingClass::Strong;
    return TemperingClass::Moderate;
}

std::vector<double> binomial_coefficients(double d, double lambda, long m) {
    if (is_negative_integer(d)) throw DomainError("binomial_coefficients: d is a negative integer");
    if (m < 0) throw DomainError("binomial_coefficients: m >= 0");
    std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
    c[0] = 1.0;
    if (d == 0.0) return c;  // c_0 = 1, c_k = 0
    const double r = std::exp(-lambda);
    double w = 1.0, e = 1.0;
    for (long k = 1; k <= m; ++k) {
        w *= (static_cast<double>(k) + d - 1.0) / static_cast<double>(k);
        e *= r;
        c[static_cast<std::size_t>(k)] = w * e;
    }
    return c;
}

long truncation_length(double d, double lambda, double tail_tol) {
    if (!(lambda > 0.0))
        throw DomainError("truncation_length: lambda > 0 required (no finite truncation at 0)");
    if (!(tail_tol > 0.0)) throw DomainError("truncation_length: tail_tol > 0");
    const double c2 = omega_bound_constant(d) * omega_bound_constant(d);
    auto bound = [&](double m) {
        if (d <= 1.0)
            return c2 * std::pow(m, 2.0 * d - 2.0) * std::exp(-2.0 * lambda * m) /
                   (-std::expm1(-2.0 * lambda));
        // k^{2d-2} e^{-lam k} is decreasing past its mode for d > 1
        if (m < (2.0 * d - 2.0) / lambda) return std::numeric_limits<double>::infinity();
        return c2 * std::pow(m, 2.0 * d - 2.0) * std::exp(-lambda * m) *
               std::exp(-lambda * (m + 1.0)) / (-std::expm1(-lambda));
    };
    long lo = 1, hi = 2;
    while (bound(static_cast<double>(hi)) > tail_tol) {
        lo = hi;
        hi *= 2;
        if (hi > (1L << 40)) throw NumericalError("truncation_length: tolerance unreachable");
    }
    while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (bound(static_cast<double>(mid)) <= tail_tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace {

// gamma(0..max_lag) for the binomial family by certified coefficient
// autocorrelation; blocks keep memory bounded for very small lambda.
std::vector<double> binomial_acvf_positive_lambda(double d, double lambda, long max_lag,
                                                  double tail_tol) {
    const long m = std::max(truncation_length(d, lambda, tail_tol), max_lag + 1);
    if (m > (1L << 26)) throw NumericalError("theoretical_acvf: tempering too small to certify");
    const long block = std::min<long>(m + 1, 1L << 21);
    std::vector<double> gam(static_cast<std::size_t>(max_lag) + 1, 0.0);
    const std::size_t fftlen = next_pow2(static_cast<std::size_t>(block + max_lag) + 1);
    const double r = std::exp(-lambda);

    auto coeff_range = [&](long k0, long len) {
        // c_k for k = k0 .. k0+len-1, seeded from omega(k0) via log-gamma
        std::vector<double> c(static_cast<std::size_t>(len));
        // omega(k0) = Gamma(k0+d)/(Gamma(k0+1) Gamma(d)); tgamma keeps the sign for d < 0
        double w = (k0 == 0)
                       ? 1.0
                       : std::exp(log_gamma_ratio(static_cast<double>(k0), d)) / std::tgamma(d);
        double e = std::exp(-lambda * static_cast<double>(k0));
        c[0] = (k0 == 0) ? 1.0 : w * e;
        for (long i = 1; i < len; ++i) {
            const long k = k0 + i;
            w *= (static_cast<double>(k) + d - 1.0) / static_cast<double>(k);
            e *= r;
            c[static_cast<std::size_t>(i)] = w * e;
        }
        return c;
    };

    for (long k0 = 0; k0 <= m; k0 += block) {
        const long nblk = std::min<long>(block, m - k0 + 1);
        const long len = std::min<long>(nblk + max_lag, m - k0 + 1);
        auto c = coeff_range(k0, len);
        std::vector<std::complex<double>> fa(fftlen), fb(fftlen);
        for (long i = 0; i < nblk; ++i)
            fa[static_cast<std::size_t>(nblk - 1 - i)] = c[static_cast<std::size_t>(i)];
        for (long i = 0; i < len; ++i) fb[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
        fft(fa, false);
        fft(fb, false);
        for (std::size_t i = 0; i < fftlen; ++i) fa[i] *= fb[i];
        fft(fa, true);
        for (long h = 0; h <= max_lag; ++h)
            gam[static_cast<std::size_t>(h)] += fa[static_cast<std::size_t>(nblk - 1 + h)].real();
    }
    return gam;
}

std::vector<double> arfima_acvf_closed_form(double d, long max_lag) {
    // gamma(h) = G(1-2d) G(h+d) / (G(d) G(1-d) G(h+1-d)), sigma = 1
    std::vector<double> g(static_cast<std::size_t>(max_lag) + 1);
    g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (long h = 1; h <= max_lag; ++h)
        g[static_cast<std::size_t>(h)] =
            g[static_cast<std::size_t>(h) - 1] * (static_cast<double>(h) - 1.0 + d) /
            (static_cast<double>(h) - d);
    return g;
}

struct CirculantModel {
    std::vector<double> eigenvalues;  // length L
    std::size_t L = 0;
};

CirculantModel build_circulant(const std::vector<double>& gam, long n) {
    const std::size_t m = next_pow2(static_cast<std::size_t>(n));
    const std::size_t L = 2 * m;
    if (gam.size() < m + 1) throw NumericalError("circulant: autocovariance too short");
    std::vector<std::complex<double>> row(L);
    for (std::size_t h = 0; h <= m; ++h) row[h] = gam[h];
    for (std::size_t h = 1; h < m; ++h) row[L - h] = gam[h];
    fft(row, false);
    CirculantModel cm;
    cm.L = L;
    cm.eigenvalues.resize(L);
    double evmax = 0.0, evmin = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        const double ev = row[k].real();
        cm.eigenvalues[k] = ev;
        evmax = std::max(evmax, ev);
        evmin = std::min(evmin, ev);
    }
    if (evmin < -1e-8 * evmax)
        throw NumericalError("circulant: embedding not positive semi-definite");
    for (auto& ev : cm.eigenvalues) ev = std::max(ev, 0.0);
    return cm;
}

std::vector<double> sample_circulant(const std::vector<double>& eigenvalues, long n,
                                      const SeedTree& seeds) {
    const std::size_t L = eigenvalues.size(), m = L / 2;
    RandomStream rs(seeds);
    std::vector<std::complex<double>> a(L);
    const double invL = 1.0 / static_cast<double>(L);
    a[0] = std::sqrt(eigenvalues[0] * invL) * rs.next_gaussian();
    a[m] = std::sqrt(eigenvalues[m] * invL) * rs.next_gaussian();
    for (std::size_t k = 1; k < m; ++k) {
        const double s = std::sqrt(0.5 * eigenvalues[k] * invL);
        const double g1 = rs.next_gaussian(), g2 = rs.next_gaussian();
        a[k] = {s * g1, s * g2};
        a[L - k] = std::conj(a[k]);
    }
    fft(a, false);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)].real();
    return x;
}

}  // namespace

PathSampler::PathSampler(const ProcessSpec& spec, const TemperingRegime& regime, long n,
                         const SimulateOptions& opts)
    : spec_(spec), n_(n) {
    spec.validate();
    if (n < 1) throw DomainError("simulate: n >= 1");
    lambda_n_ = regime.lambda_at(static_cast<double>(n));
    spec_.lambda = lambda_n_;

    if (spec.family == CoefficientFamily::Binomial && spec.d == 0.0) {
        route_ = Route::Iid;  // c_0 = 1, all others vanish
        return;
    }

    std::vector<double> coeffs;
    if (lambda_n_ == 0.0) {
        if (!(std::fabs(spec.d) < 0.5))
            throw DomainError("simulate: lambda* = 0 with |d| >= 1/2 refused (variance divergent)");
        if (spec.family != CoefficientFamily::Binomial)
            throw DomainError("simulate: exact lambda=0 sampling needs the binomial family");
        route_ = Route::Circulant;
        auto gam = arfima_acvf_closed_form(spec.d,
                                           static_cast<long>(next_pow2(static_cast<std::size_t>(n))));
        eigenvalues_ = std::move(build_circulant(gam, n).eigenvalues);
        truncation_m_ = static_cast<long>(gam.size()) - 1;
        return;
    }

    if (spec.family == CoefficientFamily::UserSupplied) {
        coeffs = spec.user_coefficients;
        truncation_m_ = static_cast<long>(coeffs.size()) - 1;
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            coeffs[k] *= std::exp(-lambda_n_ * static_cast<double>(k));
    } else {
        long m = truncation_length(spec.d, lambda_n_, opts.tail_tol);
        if (m > opts.ma_cap) {
            // exact-in-distribution route: certified autocovariance + circulant embedding
            route_ = Route::Circulant;
            const long lags = static_cast<long>(next_pow2(static_cast<std::size_t>(n)));
            auto gam = binomial_acvf_positive_lambda(spec.d, lambda_n_, lags, opts.tail_tol);
            eigenvalues_ = build_circulant(gam, n).eigenvalues;
            truncation_m_ = m;
            return;
        }
        m = std::max<long>(m, n);
        truncation_m_ = m;
        coeffs = binomial_coefficients(spec.d, lambda_n_, m);
    }
    route_ = Route::MovingAverage;
    fft_len_ = next_pow2(coeffs.size() + static_cast<std::size_t>(n_) + truncation_m_);
    kernel_fft_.assign(fft_len_, {0.0, 0.0});
    for (std::size_t k = 0; k < coeffs.size(); ++k) kernel_fft_[k] = coeffs[k];
    fft(kernel_fft_, false);
}

SamplePath PathSampler::sample(const SeedTree& seeds) const {
    SamplePath out;
    out.spec = spec_;
    out.n = n_;
    out.seed_path = seeds;
    out.truncation_m = truncation_m_;

    if (route_ == Route::Iid) {
        auto z = gaussian_stream(seeds.child(0), static_cast<std::size_t>(n_));
        out.values.resize(static_cast<std::size_t>(n_));
        for (long j = 0; j < n_; ++j)
            out.values[static_cast<std::size_t>(j)] = spec_.sigma * z[static_cast<std::size_t>(j)];
        return out;
    }
    if (route_ == Route::Circulant) {
        out.values = sample_circulant(eigenvalues_, n_, seeds.child(0));
        for (auto& v : out.values) v *= spec_.sigma;
        return out;
    }
    const long m = truncation_m_;
    auto z = gaussian_stream(seeds.child(0), static_cast<std::size_t>(n_ + m));
    std::vector<std::complex<double>> zf(fft_len_, {0.0, 0.0});
    for (std::size_t i = 0; i < z.size(); ++i) zf[i] = z[i];
    fft(zf, false);
    for (std::size_t i = 0; i < fft_len_; ++i) zf[i] *= kernel_fft_[i];
    fft(zf, true);
    out.values.resize(static_cast<std::size_t>(n_));
    for (long j = 0; j < n_; ++j)
        out.values[static_cast<std::size_t>(j)] = spec_.sigma * zf[static_cast<std::size_t>(m + j)].real();
    return out;
}

SamplePath simulate(const ProcessSpec& spec, const TemperingRegime& regime, long n,
                    const SeedTree& seeds, const SimulateOptions& opts) {
    return PathSampler(spec, regime, n, opts).sample(seeds);
}

double partial_sum(const SamplePath& path, double u) {
    if (path.values.empty()) throw DomainError("partial_sum: empty path");
    if (u < 0.0 || u > 1.0) throw DomainError("partial_sum: u in [0,1]");
    const long k = static_cast<long>(std::floor(static_cast<double>(path.n) * u));
    double s = 0.0;
    for (long j = 0; j < std::min(k, path.n); ++j) s += path.values[static_cast<std::size_t>(j)];
    return s;
}

std::vector<double> theoretical_acvf(const ProcessSpec& spec, double lambda_eff, long max_lag) {
    spec.validate();
    if (max_lag < 0) throw DomainError("theoretical_acvf: max_lag >= 0");
    const double s2 = spec.sigma * spec.sigma;

    if (spec.family == CoefficientFamily::UserSupplied) {
        std::vector<double> c = spec.user_coefficients;
        for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(-lambda_eff * static_cast<double>(k));
        auto g = autocorrelation(c, static_cast<std::size_t>(max_lag));
        for (auto& v : g) v *= s2;
        return g;
    }
    if (spec.d == 0.0) {
        std::vector<double> g(static_cast<std::size_t>(max_lag) + 1, 0.0);
        g[0] = s2;
        return g;
    }
    if (lambda_eff == 0.0) {
        if (!(std::fabs(spec.d) < 0.5))
            throw DomainError("theoretical_acvf: divergent for lambda = 0, d >= 1/2");
        auto g = arfima_acvf_closed_form(spec.d, max_lag);
        for (auto& v : g) v *= s2;
        return g;
    }
    auto g = binomial_acvf_positive_lambda(spec.d, lambda_eff, max_lag, 1e-12);
    for (auto& v : g) v *= s2;
    return g;
}

std::complex<double> tauberian_ratio(double d, double lambda_n, double n, double y) {
    if (!(lambda_n > 0.0)) throw DomainError("tauberian_ratio: lambda_n > 0");
    const std::complex<double> z(lambda_n, y / n);
    const double zabs = std::abs(z);
    // certified truncation of sum_k |omega(k)| e^{-lambda k}
    const double cb = omega_bound_constant(d);
    const double target = 1e-12 * std::max(1.0, std::pow(zabs, -d));
    long m = 64;
    auto tail = [&](double mm) {
        const double p = std::min(d - 1.0, 0.0);
        return cb * std::pow(mm, p) * std::exp(-lambda_n * mm) / (-std::expm1(-lambda_n));
    };
    while (tail(static_cast<double>(m)) > target && m < (1L << 34)) m *= 2;
    if (tail(static_cast<double>(m)) > target)
        throw NumericalError("tauberian_ratio: series truncation not certifiable");

    const std::complex<double> r = std::exp(-z);
    std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
    for (long k = 1; k <= m; ++k) {
        term *= r * ((static_cast<double>(k) + d - 1.0) / static_cast<double>(k));
        sum += term;
    }
    return std::pow(z, d) * sum;
}

void write_path_csv(const SamplePath& path, const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "w");
    if (!f) throw NumericalError("write_path_csv: cannot open " + filename);
    std::fprintf(f, "index,value\n");
    for (long j = 0; j < path.n; ++j)
        std::fprintf(f, "%ld,%.17g\n", j + 1, path.values[static_cast<std::size_t>(j)]);
    std::fclose(f);
}

}  // namespace flurlab
