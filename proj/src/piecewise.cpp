#include "flurlab/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flurlab/csvio.hpp"
#include "flurlab/quadrature.hpp"
#include "flurlab/tfbm2.hpp"

namespace flurlab {

void PiecewiseModel::validate() const {
    if (q < 1) throw DomainError("PiecewiseModel: q >= 1");
    if (p <= q) throw DomainError("PiecewiseModel: p > q");
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("PiecewiseModel: eta in (0,1)");
    if (static_cast<int>(a.size()) != p) throw DomainError("PiecewiseModel: a must have p entries");
    bool knot_term = false;
    for (int i = q; i < p; ++i)
        if (a[static_cast<std::size_t>(i)] != 0.0) knot_term = true;
    if (!knot_term)
        throw DomainError("PiecewiseModel: identifiability needs a_i != 0 for some i > q");
}

double PiecewiseModel::basis(int i, double s) const {
    if (i < 1 || i > p) throw DomainError("PiecewiseModel: basis index out of range");
    if (i <= q) return std::pow(s, i - 1);
    const double w = s - eta;
    return w > 0.0 ? std::pow(w, i - q) : 0.0;
}

double PiecewiseModel::mu(double s) const {
    double v = 0.0;
    for (int i = 1; i <= p; ++i) v += a[static_cast<std::size_t>(i - 1)] * basis(i, s);
    return v;
}

Mat design_matrix(int q, int p, double eta, long n) {
    if (n <= p) throw DomainError("design_matrix: n > p required");
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("design_matrix: eta in (0,1)");
    PiecewiseModel m;
    m.q = q;
    m.p = p;
    m.eta = eta;
    m.a.assign(static_cast<std::size_t>(p), 1.0);
    Mat w(static_cast<std::size_t>(n), static_cast<std::size_t>(p));
    for (long j = 1; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        for (int i = 1; i <= p; ++i)
            w(static_cast<std::size_t>(j - 1), static_cast<std::size_t>(i - 1)) = m.basis(i, s);
    }
    // smallest singular value via the Gram spectrum
    Mat g(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) {
            double acc = 0.0;
            for (long j = 0; j < n; ++j)
                acc += w(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) *
                       w(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
            g(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) = acc;
        }
    const auto ev = symmetric_eigenvalues(g);
    if (!(ev.front() > 1e-20))
        throw NumericalError("design_matrix: rank deficient (smallest singular value <= 1e-10)");
    return w;
}

namespace {

// profile machinery: power and response prefix sums make each rss(eta)
// evaluation O(p^2) after an O(n p) setup
class ProfileEngine {
  public:
    ProfileEngine(const std::vector<double>& y, int q, int p)
        : n_(static_cast<long>(y.size())), q_(q), p_(p) {
        cmax_ = std::max({2 * (q - 1), (q - 1) + (p - q), 2 * (p - q)});
        const std::size_t nn = y.size();
        pow_prefix_.assign(static_cast<std::size_t>(cmax_) + 1,
                           std::vector<double>(nn + 1, 0.0));
        ypow_prefix_.assign(static_cast<std::size_t>(std::max(q - 1, p - q)) + 1,
                            std::vector<double>(nn + 1, 0.0));
        yy_ = 0.0;
        for (std::size_t j = 1; j <= nn; ++j) {
            const double s = static_cast<double>(j) / static_cast<double>(n_);
            double sp = 1.0;
            for (int c = 0; c <= cmax_; ++c) {
                pow_prefix_[static_cast<std::size_t>(c)][j] =
                    pow_prefix_[static_cast<std::size_t>(c)][j - 1] + sp;
                if (c < static_cast<int>(ypow_prefix_.size()))
                    ypow_prefix_[static_cast<std::size_t>(c)][j] =
                        ypow_prefix_[static_cast<std::size_t>(c)][j - 1] + sp * y[j - 1];
                sp *= s;
            }
            yy_ += y[j - 1] * y[j - 1];
        }
        binom_ = Mat(static_cast<std::size_t>(cmax_) + 1, static_cast<std::size_t>(cmax_) + 1);
        for (int r = 0; r <= cmax_; ++r) {
            binom_(static_cast<std::size_t>(r), 0) = 1.0;
            for (int c = 1; c <= r; ++c)
                binom_(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                    binom_(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(c - 1)) +
                    ((c <= r - 1) ? binom_(static_cast<std::size_t>(r - 1),
                                           static_cast<std::size_t>(c))
                                  : 0.0);
        }
    }

    // rss and coefficients at a given knot
    std::pair<double, std::vector<double>> evaluate(double eta) const {
        const long k = std::clamp(static_cast<long>(std::floor(eta * static_cast<double>(n_))),
                                  0L, n_);
        auto full = [&](int c) { return pow_prefix_[static_cast<std::size_t>(c)][static_cast<std::size_t>(n_)]; };
        auto tail = [&](int c) {
            return pow_prefix_[static_cast<std::size_t>(c)][static_cast<std::size_t>(n_)] -
                   pow_prefix_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        };
        auto ytail = [&](int c) {
            return ypow_prefix_[static_cast<std::size_t>(c)][static_cast<std::size_t>(n_)] -
                   ypow_prefix_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        };
        // sum over s > eta of (s-eta)^r [optionally * s^e or * y]
        auto knot_sum = [&](int r, int e, bool with_y) {
            double acc = 0.0, etapow = 1.0;
            for (int m = r; m >= 0; --m) {
                const double sgn = ((r - m) % 2 == 0) ? 1.0 : -1.0;
                const double b = binom_(static_cast<std::size_t>(r), static_cast<std::size_t>(m));
                acc += sgn * b * etapow * (with_y ? ytail(m) : tail(m + e));
                etapow *= eta;
            }
            return acc;
        };

        const int p = p_, q = q_;
        Mat A(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
        std::vector<double> b(static_cast<std::size_t>(p));
        for (int i = 1; i <= p; ++i) {
            for (int l = i; l <= p; ++l) {
                double v;
                if (i <= q && l <= q)
                    v = full(i + l - 2);
                else if (i <= q)
                    v = knot_sum(l - q, i - 1, false);
                else
                    v = knot_sum((i - q) + (l - q), 0, false);
                A(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(l - 1)) = v;
                A(static_cast<std::size_t>(l - 1), static_cast<std::size_t>(i - 1)) = v;
            }
            if (i <= q)
                b[static_cast<std::size_t>(i - 1)] = ypow_prefix_[static_cast<std::size_t>(i - 1)]
                                                                 [static_cast<std::size_t>(n_)];
            else
                b[static_cast<std::size_t>(i - 1)] = knot_sum_y(i - q, eta, k);
        }
        std::vector<double> beta;
        try {
            beta = solve_spd(A, b);
        } catch (const std::exception&) {
            return {std::numeric_limits<double>::infinity(), {}};
        }
        double fit = 0.0;
        for (int i = 0; i < p; ++i) fit += b[static_cast<std::size_t>(i)] * beta[static_cast<std::size_t>(i)];
        return {yy_ - fit, beta};
    }

    long n() const { return n_; }

  private:
    double knot_sum_y(int r, double eta, long k) const {
        double acc = 0.0, etapow = 1.0;
        for (int m = r; m >= 0; --m) {
            const double sgn = ((r - m) % 2 == 0) ? 1.0 : -1.0;
            const double b = binom_(static_cast<std::size_t>(r), static_cast<std::size_t>(m));
            const double t = ypow_prefix_[static_cast<std::size_t>(m)][static_cast<std::size_t>(n_)] -
                             ypow_prefix_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
            acc += sgn * b * etapow * t;
            etapow *= eta;
        }
        return acc;
    }

    long n_;
    int q_, p_, cmax_;
    double yy_;
    std::vector<std::vector<double>> pow_prefix_, ypow_prefix_;
    Mat binom_;
};

}  // namespace

FitResult fit(const std::vector<double>& y, int q, int p, const FitOptions& opts) {
    const long n = static_cast<long>(y.size());
    if (q < 1 || p <= q) throw DomainError("fit: need q >= 1, p > q");
    if (n <= p + 8) throw DomainError("fit: need n > p + 8");
    ProfileEngine engine(y, q, p);

    FitResult out;
    double best = std::numeric_limits<double>::infinity();
    double lo_rss = std::numeric_limits<double>::infinity(), hi_rss = -lo_rss;
    long best_j = p;
    std::vector<double> cand;
    for (long j = p; j <= n - p; ++j) {
        const double eta = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        if (!(eta > 0.0 && eta < 1.0)) continue;
        cand.push_back(eta);
        const double rss = engine.evaluate(eta).first;
        if (opts.keep_profile) out.eta_profile.emplace_back(eta, rss);
        if (std::isfinite(rss)) {
            lo_rss = std::min(lo_rss, rss);
            hi_rss = std::max(hi_rss, rss);
        }
        if (rss < best) {
            best = rss;
            best_j = static_cast<long>(cand.size()) - 1;
        }
    }
    if (!std::isfinite(best)) throw NumericalError("fit: rank deficient at every candidate knot");
    if (hi_rss - lo_rss <= 1e-10 * std::max(1.0, std::fabs(hi_rss))) {
        out.degenerate = true;
        best_j = 0;  // ties break to the smallest knot
    }

    double a = cand[static_cast<std::size_t>(std::max<long>(best_j - 1, 0))];
    double b = cand[static_cast<std::size_t>(
        std::min<long>(best_j + 1, static_cast<long>(cand.size()) - 1))];
    if (!out.degenerate && b > a) {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
        double f1 = engine.evaluate(c1).first, f2 = engine.evaluate(c2).first;
        while (b - a > opts.golden_tol) {
            if (f1 <= f2) {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - gr * (b - a);
                f1 = engine.evaluate(c1).first;
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr * (b - a);
                f2 = engine.evaluate(c2).first;
            }
        }
    }
    const double eta_hat = out.degenerate ? cand.front() : 0.5 * (a + b);
    auto final_eval = engine.evaluate(eta_hat);
    out.eta_hat = eta_hat;
    out.rss = final_eval.first;
    out.a_hat = final_eval.second;
    return out;
}

std::vector<PiecewisePolynomial> mu_partials_plus(const PiecewiseModel& model) {
    model.validate();
    const int q = model.q, p = model.p;
    const double eta = model.eta;
    std::vector<PiecewisePolynomial> out;
    for (int i = 1; i <= q; ++i) {
        std::vector<double> c(static_cast<std::size_t>(i), 0.0);
        c.back() = 1.0;
        out.emplace_back(std::vector<PolyPiece>{PolyPiece{0.0, 1.0, c}});
    }
    auto expand_knot_power = [&](int j, double factor) {
        // factor * (s - eta)^j as coefficients in s
        std::vector<double> c(static_cast<std::size_t>(j) + 1, 0.0);
        double binom = 1.0;
        for (int m = 0; m <= j; ++m) {
            c[static_cast<std::size_t>(m)] =
                factor * binom * std::pow(-eta, j - m);
            binom *= static_cast<double>(j - m) / static_cast<double>(m + 1);
        }
        return c;
    };
    for (int j = 1; j <= p - q; ++j)
        out.emplace_back(
            std::vector<PolyPiece>{PolyPiece{eta, 1.0, expand_knot_power(j, 1.0)}});
    // right eta-partial: -sum_j a_{q+j} j (s-eta)_+^{j-1}, with (.)_+^0 = 1_{s>eta}
    std::vector<double> acc(static_cast<std::size_t>(std::max(p - q, 1)), 0.0);
    for (int j = 1; j <= p - q; ++j) {
        const double aj = model.a[static_cast<std::size_t>(q + j - 1)];
        if (aj == 0.0) continue;
        auto c = expand_knot_power(j - 1, -aj * static_cast<double>(j));
        for (std::size_t m = 0; m < c.size(); ++m) acc[m] += c[m];
    }
    out.emplace_back(std::vector<PolyPiece>{PolyPiece{eta, 1.0, acc, true}});
    return out;
}

Mat gram_matrix(const PiecewiseModel& model) {
    auto mus = mu_partials_plus(model);
    const std::size_t m = mus.size();
    Mat g(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i; k < m; ++k) {
            const double v = mus[i].inner(mus[k]);
            g(i, k) = v;
            g(k, i) = v;
        }
    return g;
}

Mat lambda_matrix(const PiecewiseModel& model) { return invert_spd(gram_matrix(model)); }

namespace {

void check_sigma_domain(SigmaCase regime_case, double d, double lambda_star) {
    if (regime_case == SigmaCase::Weak || regime_case == SigmaCase::Moderate) {
        if (!(d > 0.0 && d < 0.5)) throw DomainError("sigma_matrix: 0 < d < 1/2 required");
    }
    if (regime_case == SigmaCase::Moderate && (!(lambda_star > 0.0) || std::isinf(lambda_star)))
        throw DomainError("sigma_matrix: lambda* in (0,inf) required");
}

}  // namespace

Mat sigma_matrix(const PiecewiseModel& model, SigmaCase regime_case, double d,
                 double lambda_star) {
    check_sigma_domain(regime_case, d, lambda_star);
    auto mus = mu_partials_plus(model);
    const std::size_t m = mus.size();
    Mat sig(m, m);
    if (regime_case == SigmaCase::Strong) {
        // literal product-of-integrals form as printed
        std::vector<double> m0(m);
        for (std::size_t i = 0; i < m; ++i) m0[i] = mus[i].moment(0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k) sig(i, k) = m0[i] * m0[k];
        return sig;
    }
    const double lam = (regime_case == SigmaCase::Weak) ? 0.0 : lambda_star;
    QuadratureSpec spec{1e-11, 1e-9, 4000};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i; k < m; ++k) {
            const double v = tfi_inner_product(mus[i], mus[k], d, lam, spec);
            sig(i, k) = v;
            sig(k, i) = v;
        }
    return sig;
}

Mat sigma_matrix_strong_coupled(const PiecewiseModel& model) { return gram_matrix(model); }

Mat sigma_matrix_closed_form(const PiecewiseModel& model, SigmaCase regime_case, double d,
                             double lambda_star) {
    check_sigma_domain(regime_case, d, lambda_star);
    if (regime_case == SigmaCase::Strong)
        throw DomainError("sigma_matrix_closed_form: weak/moderate cases only");
    auto mus = mu_partials_plus(model);
    const std::size_t m = mus.size();

    std::function<double(double)> F;
    if (regime_case == SigmaCase::Weak) {
        const double cf = gamma_fn(1.0 - 2.0 * d) / (gamma_fn(d) * gamma_fn(1.0 - d));
        F = [=](double r) { return cf * std::pow(r, 2.0 * d - 1.0); };
    } else {
        const double c = covariance_constant(d, lambda_star);
        const double nu = d - 0.5;
        F = [=](double r) { return r < 1e-290 ? 0.0 : c * std::pow(r, nu) * bessel_k(nu, lambda_star * r); };
    }

    const double alpha =
        (regime_case == SigmaCase::Weak) ? 2.0 * d - 1.0 : std::min(2.0 * d - 1.0, 0.0);
    QuadratureSpec spec{1e-9, 1e-7, 20000};
    Mat sig(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i; k < m; ++k) {
            auto g = [&](double t, double s) {
                return mus[i].eval(t) * mus[k].eval(s) * F(std::fabs(t - s));
            };
            const double v = quad_2d_singular_diagonal(g, Rectangle{0.0, 1.0, 0.0, 1.0},
                                                       alpha, spec);
            sig(i, k) = v;
            sig(k, i) = v;
        }
    return sig;
}

Mat asymptotic_covariance(const PiecewiseModel& model, SigmaCase regime_case, double d,
                          double lambda_star) {
    const Mat lam = lambda_matrix(model);
    const Mat sig = sigma_matrix(model, regime_case, d, lambda_star);
    return lam * sig * lam;
}

Mat linearization_operator(const PiecewiseModel& model, long n) {
    auto mus = mu_partials_plus(model);
    const std::size_t m = mus.size();
    Mat mt(m, static_cast<std::size_t>(n));
    for (long j = 1; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        for (std::size_t i = 0; i < m; ++i) mt(i, static_cast<std::size_t>(j - 1)) = mus[i].eval(s);
    }
    Mat mtm(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i; k < m; ++k) {
            double acc = 0.0;
            for (long j = 0; j < n; ++j)
                acc += mt(i, static_cast<std::size_t>(j)) * mt(k, static_cast<std::size_t>(j));
            mtm(i, k) = acc;
            mtm(k, i) = acc;
        }
    const Mat inv = invert_spd(mtm);
    return inv * mt;
}

std::string fit_result_to_json(const FitResult& fr) {
    std::ostringstream os;
    os << "{\"eta_hat\":" << format_double(fr.eta_hat) << ",\"a_hat\":[";
    for (std::size_t i = 0; i < fr.a_hat.size(); ++i)
        os << (i ? "," : "") << format_double(fr.a_hat[i]);
    os << "],\"rss\":" << format_double(fr.rss) << ",\"degenerate\":"
       << (fr.degenerate ? "true" : "false") << ",\"profile\":[";
    for (std::size_t i = 0; i < fr.eta_profile.size(); ++i)
        os << (i ? "," : "") << "[" << format_double(fr.eta_profile[i].first) << ","
           << format_double(fr.eta_profile[i].second) << "]";
    os << "]}";
    return os.str();
}

}  // namespace flurlab
