// Command-line front door: simulation, theoretical quantities, fits and the
// Monte Carlo experiments.  Exit codes: 0 ok, 1 validation error, 2 numerical
// failure, 3 experiment test failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flurlab/csvio.hpp"
#include "flurlab/experiments.hpp"
#include "flurlab/kernels.hpp"
#include "flurlab/parallel.hpp"
#include "flurlab/piecewise.hpp"
#include "flurlab/process.hpp"
#include "flurlab/tfbm2.hpp"

namespace fl = flurlab;

namespace {

struct CliError {
    int code;
    std::string tag;
    std::string message;
};

fl::TemperingRegime make_regime(const std::string& schedule, double lambda, double c,
                                double gamma) {
    if (schedule == "fixed") return fl::TemperingRegime::fixed(lambda);
    if (schedule == "power") return fl::TemperingRegime::power_law(c, gamma);
    throw CliError{1, "bad_schedule", "schedule must be fixed|power"};
}

fl::PiecewiseModel parse_model(int q, int p, double eta, const std::vector<double>& a) {
    fl::PiecewiseModel m;
    m.q = q;
    m.p = p;
    m.eta = eta;
    m.a = a;
    m.validate();
    return m;
}

int cmd_simulate(double d, double lambda, double sigma, long n, std::uint64_t seed,
                 const std::string& out) {
    fl::ProcessSpec spec;
    spec.d = d;
    spec.sigma = sigma;
    auto path = fl::simulate(spec, fl::TemperingRegime::fixed(lambda), n,
                             fl::SeedTree{seed, {}});
    fl::write_path_csv(path, out);
    return 0;
}

int cmd_acvf(double d, double lambda, double sigma, long max_lag, const std::string& out) {
    fl::ProcessSpec spec;
    spec.d = d;
    spec.sigma = sigma;
    auto g = fl::theoretical_acvf(spec, lambda, max_lag);
    std::vector<std::vector<double>> rows;
    for (long h = 0; h <= max_lag; ++h)
        rows.push_back({static_cast<double>(h), g[static_cast<std::size_t>(h)]});
    fl::write_csv(out, {"lag", "acvf"}, rows);
    return 0;
}

int cmd_tfbm(double d, double lambda, double sigma2, long grid, double t_max,
             std::uint64_t seed, const std::string& method, long nh, const std::string& out) {
    std::vector<double> times(static_cast<std::size_t>(grid));
    for (long i = 0; i < grid; ++i)
        times[static_cast<std::size_t>(i)] =
            t_max * static_cast<double>(i) / static_cast<double>(grid - 1);
    fl::GridPath gp;
    if (method == "cholesky") {
        gp = fl::sample_path_cholesky(fl::TfbmParams{d, lambda, sigma2}, times,
                                      fl::SeedTree{seed, {}});
    } else if (method == "invariance") {
        fl::ProcessSpec spec;
        spec.d = d;
        spec.sigma = std::sqrt(sigma2);
        gp = fl::sample_path_invariance(spec, lambda, nh, times, fl::SeedTree{seed, {}});
    } else {
        throw CliError{1, "bad_method", "method must be cholesky|invariance"};
    }
    fl::write_grid_path_csv(gp, out);
    return 0;
}

int cmd_variance(const std::string& regime_case, double d, double lambda_star,
                 const std::string& kernel_name, double sigma2, bool with_model,
                 const fl::PiecewiseModel& model) {
    std::ostringstream os;
    if (!with_model) {
        const auto kernel = fl::KernelSpec::by_name(kernel_name);
        double v;
        if (regime_case == "strong")
            v = fl::variance_strong(sigma2, kernel);
        else if (regime_case == "weak")
            v = fl::variance_weak_operator(d, sigma2, kernel);
        else if (regime_case == "moderate")
            v = fl::variance_moderate(d, lambda_star, sigma2, kernel);
        else
            throw CliError{1, "bad_case", "case must be strong|weak|moderate"};
        os << "{\"sigma2\":" << fl::format_double(v);
        if (regime_case == "weak")
            os << ",\"sigma2_printed_formula\":"
               << fl::format_double(fl::variance_weak_printed(d, sigma2, kernel));
        os << "}";
    } else {
        fl::SigmaCase sc;
        if (regime_case == "strong")
            sc = fl::SigmaCase::Strong;
        else if (regime_case == "weak")
            sc = fl::SigmaCase::Weak;
        else if (regime_case == "moderate")
            sc = fl::SigmaCase::Moderate;
        else
            throw CliError{1, "bad_case", "case must be strong|weak|moderate"};
        const fl::Mat lam = fl::lambda_matrix(model);
        fl::Mat sig = fl::sigma_matrix(model, sc, d, lambda_star);
        const std::size_t k = sig.rows();
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sig(i, j) *= sigma2;
        const fl::Mat cov = lam * sig * lam;
        auto emit = [&](const char* name, const fl::Mat& m) {
            os << "\"" << name << "\":[";
            for (std::size_t i = 0; i < m.rows(); ++i) {
                os << (i ? "," : "") << "[";
                for (std::size_t j = 0; j < m.cols(); ++j)
                    os << (j ? "," : "") << fl::format_double(m(i, j));
                os << "]";
            }
            os << "]";
        };
        os << "{";
        emit("lambda", lam);
        os << ",";
        emit("sigma", sig);
        os << ",";
        emit("lambda_sigma_lambda", cov);
        os << "}";
    }
    std::cout << os.str() << "\n";
    return 0;
}

int cmd_fit_kernel(const std::string& in, double h, const std::string& kernel_name,
                   long x_count, double d, double scale_value, const std::string& true_m,
                   const std::string& out) {
    auto table = fl::read_csv(in);
    const auto y = table.column("value");
    const long n = static_cast<long>(y.size());
    if (h <= 0.0) h = std::pow(static_cast<double>(n), -0.2);
    const auto kernel = fl::KernelSpec::by_name(kernel_name);
    std::vector<std::vector<double>> rows;
    for (long i = 0; i < x_count; ++i) {
        const double x = h + (1.0 - 2.0 * h) * (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(x_count);
        const double est = fl::priestley_chao(y, x, h, kernel);
        double center = 0.0;
        if (true_m != "none") {
            std::vector<double> m(static_cast<std::size_t>(n));
            for (long j = 1; j <= n; ++j) {
                const double s = static_cast<double>(j) / static_cast<double>(n);
                m[static_cast<std::size_t>(j - 1)] =
                    (true_m == "sin2pi") ? std::sin(2.0 * M_PI * s) : 0.0;
            }
            center = fl::priestley_chao(m, x, h, kernel);
        }
        rows.push_back({x, est, center, scale_value > 0.0
                                            ? scale_value
                                            : std::pow(static_cast<double>(n) * h, -(d + 0.5))});
    }
    fl::write_csv(out, {"x", "estimate", "center", "scale"}, rows);
    return 0;
}

int cmd_fit_knot(const std::string& in, int q, int p, const std::string& out) {
    auto table = fl::read_csv(in);
    const auto y = table.column("value");
    auto fr = fl::fit(y, q, p);
    const std::string js = fl::fit_result_to_json(fr);
    if (out.empty()) {
        std::cout << js << "\n";
    } else {
        std::ofstream f(out);
        if (!f) throw CliError{2, "io_error", "cannot open " + out};
        f << js << "\n";
    }
    return 0;
}

int run_selftest();

}  // namespace

int main(int argc, char** argv) {
    // a user-supplied config file must exist (CLI11 would silently skip it)
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream probe(argv[i + 1]);
            if (!probe) {
                std::cerr << "code=config_not_found " << argv[i + 1] << "\n";
                return 1;
            }
        }
    }
    CLI::App app{"flurlab: tempered linear processes, TFBMII and the two regression estimators"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a tempered linear process path");
    double d = 0.3, lambda = 0.025, sigma = 1.0;
    long n = 1024;
    std::uint64_t seed = 1;
    std::string out = "path.csv";
    sim->add_option("--d", d);
    sim->add_option("--lambda", lambda);
    sim->add_option("--sigma", sigma);
    sim->add_option("--n", n);
    sim->add_option("--seed", seed);
    sim->add_option("--out", out);

    // acvf
    auto* ac = app.add_subcommand("acvf", "theoretical autocovariances");
    double ad = 0.3, alam = 0.025, asig = 1.0;
    long max_lag = 64;
    std::string aout = "acvf.csv";
    ac->add_option("--d", ad);
    ac->add_option("--lambda", alam);
    ac->add_option("--sigma", asig);
    ac->add_option("--max-lag", max_lag);
    ac->add_option("--out", aout);

    // tfbm
    auto* tf = app.add_subcommand("tfbm", "sample a TFBMII path");
    double td = 0.3, tlam = 1.0, tsig2 = 1.0, tmax = 1.0;
    long tgrid = 64, tnh = 4096;
    std::uint64_t tseed = 1;
    std::string tmethod = "cholesky", tout = "tfbm.csv";
    tf->add_option("--d", td);
    tf->add_option("--lambda", tlam);
    tf->add_option("--sigma2", tsig2);
    tf->add_option("--grid", tgrid);
    tf->add_option("--t-max", tmax);
    tf->add_option("--seed", tseed);
    tf->add_option("--method", tmethod);
    tf->add_option("--nh", tnh);
    tf->add_option("--out", tout);

    // variance
    auto* va = app.add_subcommand("variance", "asymptotic variance / Sigma / Lambda Sigma Lambda");
    std::string vcase = "moderate", vkernel = "epanechnikov";
    double vd = 0.3, vls = 1.0, vsig2 = 1.0, veta = 0.5;
    bool vmodel = false;
    int vq = 2, vp = 3;
    std::vector<double> va_coeffs{1.0, 2.0, 3.0};
    va->add_option("--case", vcase);
    va->add_option("--d", vd);
    va->add_option("--lambda-star", vls);
    va->add_option("--kernel", vkernel);
    va->add_option("--sigma2", vsig2);
    va->add_flag("--model", vmodel, "emit the knot-law matrices instead of the kernel variance");
    va->add_option("--q", vq);
    va->add_option("--p", vp);
    va->add_option("--eta", veta);
    va->add_option("--a", va_coeffs)->expected(-1);

    // fit-kernel
    auto* fk = app.add_subcommand("fit-kernel", "Priestley-Chao estimate on a grid");
    std::string fk_in, fk_out = "fit.csv", fk_kernel = "epanechnikov", fk_truem = "none";
    double fk_h = 0.0, fk_d = 0.0, fk_scale = 0.0;
    long fk_xcount = 21;
    fk->add_option("--in", fk_in)->required();
    fk->add_option("--bandwidth", fk_h);
    fk->add_option("--kernel", fk_kernel);
    fk->add_option("--x-count", fk_xcount);
    fk->add_option("--d", fk_d);
    fk->add_option("--scale", fk_scale);
    fk->add_option("--true-m", fk_truem);
    fk->add_option("--out", fk_out);

    // fit-knot
    auto* fn = app.add_subcommand("fit-knot", "profiled least-squares knot fit");
    std::string fn_in, fn_out;
    int fn_q = 2, fn_p = 3;
    fn->add_option("--in", fn_in)->required();
    fn->add_option("--q", fn_q);
    fn->add_option("--p", fn_p);
    fn->add_option("--out", fn_out);

    // experiment
    auto* ex = app.add_subcommand("experiment", "run a Monte Carlo experiment");
    ex->set_config("--config", "", "TOML-style key=value configuration");
    ex->allow_config_extras(false);
    std::string ex_kind = "InvariancePrinciple", ex_kernel = "epanechnikov",
                ex_schedule = "power", ex_m = "sin2pi";
    double ex_d = 0.3, ex_sigma = 1.0, ex_lambda = 0.0, ex_c = 1.0, ex_gamma = 1.0;
    double ex_hc = 1.0, ex_hgamma = 0.2, ex_vartol = 0.15, ex_corrtol = 0.1, ex_kslevel = 0.05;
    long ex_n = 1L << 14;
    int ex_reps = 2000, ex_threads = 0, ex_q = 2, ex_p = 3;
    double ex_eta = 0.5;
    std::vector<double> ex_a{1.0, 2.0, 25.0};
    std::vector<double> ex_x{0.3, 0.7};
    std::uint64_t ex_seed = 1;
    std::string ex_json, ex_csv;
    ex->add_option("--kind", ex_kind);
    ex->add_option("--d", ex_d);
    ex->add_option("--sigma", ex_sigma);
    ex->add_option("--schedule", ex_schedule);
    ex->add_option("--lambda", ex_lambda);
    ex->add_option("--c", ex_c);
    ex->add_option("--gamma", ex_gamma);
    ex->add_option("--n", ex_n);
    ex->add_option("--h-c", ex_hc);
    ex->add_option("--h-gamma", ex_hgamma);
    ex->add_option("--x", ex_x)->expected(-1);
    ex->add_option("--kernel", ex_kernel);
    ex->add_option("--m", ex_m);
    ex->add_option("--q", ex_q);
    ex->add_option("--p", ex_p);
    ex->add_option("--eta", ex_eta);
    ex->add_option("--a", ex_a)->expected(-1);
    ex->add_option("--replications", ex_reps);
    ex->add_option("--seed", ex_seed);
    ex->add_option("--threads", ex_threads);
    ex->add_option("--var-tol", ex_vartol);
    ex->add_option("--corr-tol", ex_corrtol);
    ex->add_option("--ks-level", ex_kslevel);
    ex->add_option("--out-json", ex_json);
    ex->add_option("--out-csv", ex_csv);

    auto* st = app.add_subcommand("selftest", "run the property self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::FileError& e) {
        std::cerr << "code=config_not_found " << e.what() << "\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "code=cli_parse " << e.what() << "\n";
        return 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(d, lambda, sigma, n, seed, out);
        if (ac->parsed()) return cmd_acvf(ad, alam, asig, max_lag, aout);
        if (tf->parsed())
            return cmd_tfbm(td, tlam, tsig2, tgrid, tmax, tseed, tmethod, tnh, tout);
        if (va->parsed())
            return cmd_variance(vcase, vd, vls, vkernel, vsig2, vmodel,
                                vmodel ? parse_model(vq, vp, veta, va_coeffs)
                                       : fl::PiecewiseModel{2, 3, 0.5, {1.0, 2.0, 3.0}});
        if (fk->parsed())
            return cmd_fit_kernel(fk_in, fk_h, fk_kernel, fk_xcount, fk_d, fk_scale, fk_truem,
                                  fk_out);
        if (fn->parsed()) return cmd_fit_knot(fn_in, fn_q, fn_p, fn_out);
        if (st->parsed()) return run_selftest();
        if (ex->parsed()) {
            fl::ExperimentConfig cfg;
            if (ex_kind == "KernelFdd")
                cfg.kind = fl::ExperimentKind::KernelFdd;
            else if (ex_kind == "KernelVariance")
                cfg.kind = fl::ExperimentKind::KernelVariance;
            else if (ex_kind == "WeightedSumLimit")
                cfg.kind = fl::ExperimentKind::WeightedSumLimit;
            else if (ex_kind == "KnotLaw")
                cfg.kind = fl::ExperimentKind::KnotLaw;
            else if (ex_kind == "Equivalence")
                cfg.kind = fl::ExperimentKind::Equivalence;
            else if (ex_kind == "InvariancePrinciple")
                cfg.kind = fl::ExperimentKind::InvariancePrinciple;
            else
                throw CliError{1, "bad_kind", "unknown experiment kind " + ex_kind};
            cfg.spec.d = ex_d;
            cfg.spec.sigma = ex_sigma;
            cfg.regime = make_regime(ex_schedule, ex_lambda, ex_c, ex_gamma);
            cfg.n = ex_n;
            cfg.h_rule.kind = fl::HRule::Kind::Power;
            cfg.h_rule.c = ex_hc;
            cfg.h_rule.gamma = ex_hgamma;
            cfg.x_points = ex_x;
            cfg.kernel_name = ex_kernel;
            cfg.m_name = ex_m;
            if (cfg.kind == fl::ExperimentKind::KnotLaw ||
                cfg.kind == fl::ExperimentKind::Equivalence)
                cfg.model = parse_model(ex_q, ex_p, ex_eta, ex_a);
            cfg.replications = ex_reps;
            cfg.master_seed = ex_seed;
            cfg.threads = ex_threads;
            cfg.var_tol = ex_vartol;
            cfg.corr_tol = ex_corrtol;
            cfg.ks_level = ex_kslevel;
            auto rep = fl::run(cfg);
            const std::string js = rep.to_json();
            if (ex_json.empty()) {
                std::cout << js << "\n";
            } else {
                std::ofstream f(ex_json);
                if (!f) throw CliError{2, "io_error", "cannot open " + ex_json};
                f << js << "\n";
            }
            if (!ex_csv.empty()) rep.write_csv(ex_csv);
            return rep.all_pass() ? 0 : 3;
        }
    } catch (const CliError& e) {
        std::cerr << "code=" << e.tag << " " << e.message << "\n";
        return e.code;
    } catch (const fl::DomainError& e) {
        std::cerr << "code=validation " << e.what() << "\n";
        return 1;
    } catch (const fl::NumericalError& e) {
        std::cerr << "code=numerical " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "code=error " << e.what() << "\n";
        return 2;
    }
    return 0;
}

namespace {

int run_selftest() {
    int failed = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-44s %s\n", name, ok ? "PASS" : "FAIL");
        if (!ok) ++failed;
    };

    // coefficient recurrence vs the stable log-gamma form
    {
        const double dd = 0.3;
        auto c = fl::binomial_coefficients(dd, 0.0, 100000);
        const double ref =
            std::exp(fl::log_gamma_ratio(100000.0, dd) - fl::log_gamma(dd));
        check("coefficients: recurrence vs log-gamma", std::fabs(c.back() / ref - 1.0) < 1e-10);
    }
    check("bessel_k: half-order closed form",
          std::fabs(fl::bessel_k(0.5, 1.0) / (std::sqrt(M_PI / 2.0) * std::exp(-1.0)) - 1.0) <
              1e-12);
    {
        const double v = fl::quad_1d([](double u) { return std::pow(u, -0.4); }, 0.0, 1.0);
        check("quad_1d: endpoint singularity", std::fabs(v - 1.0 / 0.6) < 1e-8);
    }
    {
        fl::Mat m(2, 2);
        m(0, 0) = 4;
        m(0, 1) = m(1, 0) = 2;
        m(1, 1) = 3;
        auto ch = fl::cholesky_jittered(m);
        check("cholesky: 2x2",
              std::fabs(ch.lower(0, 0) - 2.0) < 1e-12 &&
                  std::fabs(ch.lower(1, 1) - std::sqrt(2.0)) < 1e-12);
    }
    {
        auto a = fl::gaussian_stream(fl::SeedTree{7, {1, 2}}, 64);
        auto b = fl::gaussian_stream(fl::SeedTree{7, {1, 2}}, 64);
        check("rng: determinism", a == b);
    }
    {
        fl::TfbmParams p{0.3, 1.0, 1.0};
        check("tfi indicator identity",
              fl::tfi_indicator_identity_check(p, 1.0, 0.25) < 1e-10);
        const double cov = fl::covariance(fl::TfbmParams{1.0, 1.0, 1.0}, 1.0, 1.0);
        check("covariance: d=1 closed form", std::fabs(cov - std::exp(-1.0)) < 1e-8);
    }
    {
        const long nn = 512;
        fl::PiecewiseModel m{2, 3, 0.4375, {1.0, 2.0, 3.0}};
        std::vector<double> y(nn);
        for (long j = 1; j <= nn; ++j)
            y[static_cast<std::size_t>(j - 1)] =
                m.mu(static_cast<double>(j) / static_cast<double>(nn));
        auto fr = fl::fit(y, 2, 3);
        check("fit: noiseless recovery", std::fabs(fr.eta_hat - m.eta) < 2e-3);
    }
    {
        std::vector<double> s(1000);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = fl::normal_quantile((static_cast<double>(i) + 0.5) / 1000.0);
        check("ks: quantile construction", fl::ks_statistic(s) <= 0.5 / 1000.0 + 1e-12);
    }
    {
        fl::ExperimentConfig cfg;
        cfg.kind = fl::ExperimentKind::InvariancePrinciple;
        cfg.spec.d = 0.3;
        cfg.regime = fl::TemperingRegime::power_law(1.0, 1.0);
        cfg.n = 1L << 11;
        cfg.replications = 100;
        cfg.master_seed = 99;
        cfg.threads = 1;
        auto r1 = fl::run(cfg).to_json();
        cfg.threads = 2;
        auto r2 = fl::run(cfg).to_json();
        check("experiment: thread-count determinism", r1 == r2);
    }
    if (failed) std::fprintf(stderr, "code=selftest %d checks failed\n", failed);
    return failed ? 3 : 0;
}

}  // namespace
