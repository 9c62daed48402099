#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flurlab/process.hpp"
#include "flurlab/quadrature.hpp"
#include "flurlab/rng.hpp"

// Priestley-Chao estimation on the fixed equispaced design, the
// regime-dependent scale factors, and the three asymptotic variances.

namespace flurlab {

enum class KernelName { Epanechnikov, Biweight, Triweight, Cosine, UserSupplied };

struct KernelSpec {
    KernelName name = KernelName::Epanechnikov;
    std::function<double(double)> k;
    std::function<double(double)> k_prime;

    static KernelSpec builtin(KernelName name);
    static KernelSpec by_name(const std::string& name);

    // symmetry, unit mass, bounded derivative (numeric checks)
    void validate() const;
};

// m_hat(x0) = (1/(N h)) sum_j K((N x0 - j)/(N h)) y_j; interior x0 only
double priestley_chao(const std::vector<double>& y, double x0, double h, const KernelSpec& kernel);

// sum of the estimator weights (1 + O(1/(Nh)) for interior x0)
double priestley_chao_weight_sum(long n, double x0, double h, const KernelSpec& kernel);

// multiplicative normalization A1: lambda_n^d / sqrt(nh) in the strongly
// tempered regime, (nh)^{-(d+1/2)} otherwise
double scale_factor(const TemperingRegime& regime, long n, double h, double d);

// sigma^2 int K^2 (strong case)
double variance_strong(double sigma2, const KernelSpec& kernel);

// sigma^2 int int K(u)K(v)|u-v|^{2d-1} du dv, exactly as printed (0 < d < 1/2)
double variance_weak_printed(double d, double sigma2, const KernelSpec& kernel);

// Var(int K dB^II_{d,0}): the printed double integral times
// Gamma(1-2d)/(Gamma(d)Gamma(1-d)); this is what the simulated statistic
// converges to and is the acceptance target for the weak case
double variance_weak_operator(double d, double sigma2, const KernelSpec& kernel);

// Var(int K dB^II_{d,lambda*}) via the Bessel-kernel form (d > 0)
double variance_moderate(double d, double lambda_star, double sigma2, const KernelSpec& kernel);

// dispatch on the regime classification
double asymptotic_variance(const TemperingRegime& regime, double d, double lambda_star,
                           double sigma2, const KernelSpec& kernel);

// plug-in optimal bandwidth for sample-size-independent lambda > 0
double optimal_bandwidth(double d, double lambda, const KernelSpec& kernel, double m2_l2, long n);

struct WeightedSumLimitResult {
    double lhs_variance = 0.0, lhs_se = 0.0;   // scaled weighted sums of the process
    double rhs_variance = 0.0, rhs_se = 0.0;   // int_0^2 K'(1-t) B(t) dt on sampled limit paths
    double ratio = 0.0;
    double formula_variance = 0.0;             // asymptotic_variance for the regime
};

// simulates both sides of the weighted-sum limit and reports their variances
WeightedSumLimitResult weighted_sum_limit_check(const ProcessSpec& spec,
                                                const TemperingRegime& regime, long n, double h,
                                                const KernelSpec& kernel, const SeedTree& seeds,
                                                int replications, int threads = 0);

}  // namespace flurlab
