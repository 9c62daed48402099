#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flurlab/parallel.hpp"
#include "flurlab/tfbm2.hpp"

using namespace flurlab;

TEST_CASE("kernel_h degenerate regions and the lambda = 0 reduction") {
    TfbmParams p{0.3, 1.0, 1.0};
    CHECK(kernel_h(p, 0.0, -2.0) == 0.0);
    CHECK(kernel_h(p, 1.0, 5.0) == 0.0);  // y above max(t,0)
    TfbmParams p0{0.3, 0.0, 1.0};
    CHECK(kernel_h(p0, 1.0, -1.0) ==
          doctest::Approx(std::pow(2.0, 0.3) - 1.0).epsilon(1e-14));
}

TEST_CASE("kernel_h closed-form integral matches the quadrature route") {
    TfbmParams p{0.7, 1.3, 1.0};
    for (double y : {-3.0, -0.4, 0.2, 0.77})
        CHECK(kernel_h(p, 1.0, y) == doctest::Approx(kernel_h_quadrature(p, 1.0, y)).epsilon(1e-10));
}

TEST_CASE("TFI indicator identity holds pointwise (d = 0.3 and d = 1)") {
    for (double d : {0.3, 1.0}) {
        TfbmParams p{d, 1.0, 1.0};
        CHECK(tfi_indicator_identity_check(p, 0.0, 0.3) == 0.0);
        for (double y = -3.0; y <= 1.0; y += 0.125)
            CHECK(tfi_indicator_identity_check(p, 1.0, y) < 1e-10);
        CHECK(tfi_indicator_identity_check(p, 1.0, -0.5) < 1e-10);
    }
}

TEST_CASE("covariance trivials and the d=1 closed value") {
    TfbmParams p{1.0, 1.0, 1.0};
    CHECK(covariance(p, 0.0, 1.0) == 0.0);
    CHECK(covariance(p, 1.0, 0.0) == 0.0);
    // e^{-1}: the double integral of e^{-|u-v|} over the unit square is
    // 2 e^{-1} and the constant is 1/2 at (d,lambda) = (1,1)
    CHECK(covariance(p, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK_THROWS_AS(covariance(TfbmParams{-0.2, 1.0, 1.0}, 1.0, 1.0), DomainError);
}

TEST_CASE("covariance equals the harmonizable oracle and the time-domain oracle") {
    struct Case {
        double d, lam;
    };
    for (const Case c : {Case{0.3, 1.0}, Case{1.0, 1.0}, Case{1.5, 0.5}}) {
        TfbmParams p{c.d, c.lam, 1.0};
        const double cov = covariance(p, 1.0, 1.0);
        const double harm = covariance_harmonizable_oracle(p, 1.0, 1.0, 1e-9);
        const double td = variance_timedomain_oracle(p, 1.0);
        CHECK(cov == doctest::Approx(harm).epsilon(1e-6));
        CHECK(cov == doctest::Approx(td).epsilon(1e-6));
    }
    // off-diagonal covariance
    TfbmParams p{0.3, 1.0, 1.0};
    CHECK(covariance(p, 1.0, 0.5) ==
          doctest::Approx(covariance_harmonizable_oracle(p, 1.0, 0.5, 1e-9)).epsilon(1e-5));
}

TEST_CASE("lambda = 0 harmonizable oracle matches the time-domain kernel oracle") {
    TfbmParams p{0.2, 0.0, 1.0};
    const double harm = covariance_harmonizable_oracle(p, 1.0, 1.0, 1e-9);
    const double td = variance_timedomain_oracle(p, 1.0);
    CHECK(harm == doctest::Approx(td).epsilon(1e-6));
    // FBM-type closed value: c_F * 2 / ((2d)(2d+1))
    const double cf = gamma_fn(1.0 - 0.4) / (gamma_fn(0.2) * gamma_fn(0.8));
    CHECK(harm == doctest::Approx(cf * 2.0 / (0.4 * 1.4)).epsilon(1e-6));
}

TEST_CASE("scaling law: cov_{d,lambda}(ct, cs) = c^{2d+1} cov_{d,c lambda}(t, s)") {
    for (double d : {0.3, 1.0})
        for (double lam : {0.5, 1.0})
            for (double c : {2.0, 0.5}) {
                TfbmParams p{d, lam, 1.0};
                TfbmParams pc{d, c * lam, 1.0};
                const double lhs = covariance(p, c * 1.0, c * 0.7);
                const double rhs = std::pow(c, 2.0 * d + 1.0) * covariance(pc, 1.0, 0.7);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
            }
}

TEST_CASE("stationary increments on a grid") {
    TfbmParams p{0.3, 1.0, 1.0};
    const double tau = 0.4;
    auto incr_var = [&](double t) {
        return covariance(p, t + tau, t + tau) - 2.0 * covariance(p, t + tau, t) +
               covariance(p, t, t);
    };
    const double v0 = incr_var(0.0);
    for (double t : {0.3, 0.8, 1.4}) CHECK(incr_var(t) == doctest::Approx(v0).epsilon(1e-5));
}

TEST_CASE("covariance matrix on a 16-point grid is PSD and round-trips through Cholesky") {
    std::vector<double> times;
    for (int i = 1; i <= 16; ++i) times.push_back(static_cast<double>(i) / 16.0);
    TfbmSampler sampler(TfbmParams{0.3, 1.0, 1.0}, times);
    CHECK(sampler.jitter() <= 1e-8 * 16.0);  // jitter within budget
    const Mat& c = sampler.covariance_matrix();
    auto ch = cholesky_jittered(c, 1e-8);
    Mat prod(16, 16);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 16; ++k) acc += ch.lower(i, k) * ch.lower(j, k);
            prod(i, j) = acc;
        }
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            CHECK(std::fabs(prod(i, j) - c(i, j)) < 1e-8);
}

TEST_CASE("sample_path_cholesky reproduces the covariance matrix empirically") {
    std::vector<double> times;
    for (int i = 1; i <= 16; ++i) times.push_back(static_cast<double>(i) / 16.0);
    TfbmSampler sampler(TfbmParams{0.3, 1.0, 1.0}, times);
    const int reps = 5000;
    std::vector<std::vector<double>> paths(reps);
    parallel_for(reps, 0, [&](std::size_t r) {
        paths[r] = sampler.sample(SeedTree{31415, {r}}).values;
    });
    const Mat& c = sampler.covariance_matrix();
    for (std::size_t i = 0; i < 16; i += 5)
        for (std::size_t j = i; j < 16; j += 5) {
            double acc = 0.0;
            for (int r = 0; r < reps; ++r) acc += paths[static_cast<std::size_t>(r)][i] *
                                                  paths[static_cast<std::size_t>(r)][j];
            acc /= reps;
            CHECK(std::fabs(acc / c(i, j) - 1.0) < 0.05);
        }
    // t = 0 maps to value 0
    auto gp = sample_path_cholesky(TfbmParams{0.3, 1.0, 1.0}, {0.0}, SeedTree{1, {}});
    CHECK(gp.values[0] == 0.0);
}

TEST_CASE("invariance-principle path approximates the limit variance at t = 1") {
    ProcessSpec spec;
    spec.d = 0.3;
    const long nh = 1L << 13;
    const int reps = 800;
    std::vector<double> v1(reps);
    parallel_for(reps, 0, [&](std::size_t r) {
        auto gp = sample_path_invariance(spec, 1.0, nh, {0.0, 1.0}, SeedTree{2718, {r}});
        v1[r] = gp.values[1];
    });
    double var = 0.0, mean = 0.0;
    for (double v : v1) mean += v;
    mean /= reps;
    for (double v : v1) var += (v - mean) * (v - mean);
    var /= (reps - 1.0);
    const double target = covariance(TfbmParams{0.3, 1.0, 1.0}, 1.0, 1.0);
    CHECK(std::fabs(var / target - 1.0) < 0.10);
    // t = 0 value is exactly zero, and the Donsker case reduces to sigma^2 t
    auto gp0 = sample_path_invariance(spec, 1.0, nh, {0.0}, SeedTree{3, {}});
    CHECK(gp0.values[0] == 0.0);
}
