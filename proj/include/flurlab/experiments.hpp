#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "flurlab/kernels.hpp"
#include "flurlab/linalg.hpp"
#include "flurlab/piecewise.hpp"
#include "flurlab/process.hpp"

// Monte Carlo harness: per-kind experiments tying simulation, estimation and
// the asymptotic formulas into pass/fail reports.

namespace flurlab {

enum class ExperimentKind {
    KernelFdd,
    KernelVariance,
    WeightedSumLimit,
    KnotLaw,
    Equivalence,
    InvariancePrinciple
};

struct HRule {
    enum class Kind { Fixed, Power };
    Kind kind = Kind::Power;
    double value = 0.1;   // Fixed(h)
    double c = 1.0, gamma = 0.2;  // h = c * n^-gamma

    double at(long n) const;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::KernelFdd;
    ProcessSpec spec;
    TemperingRegime regime;
    long n = 1L << 14;
    HRule h_rule;
    std::vector<double> x_points{0.3, 0.7};
    std::string kernel_name = "epanechnikov";
    std::string m_name = "sin2pi";  // regression function for kernel kinds: sin2pi | zero
    PiecewiseModel model;
    int replications = 2000;
    std::uint64_t master_seed = 1;
    int threads = 0;
    double var_tol = 0.15;
    double corr_tol = 0.1;
    double ks_level = 0.05;

    void validate() const;
};

struct TestLine {
    std::string name;
    double statistic = 0.0;
    double target = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    std::vector<std::pair<std::string, double>> theoretical_targets;
    std::vector<std::tuple<std::string, double, double>> empirical_estimates;  // name, value, se
    std::vector<TestLine> tests;
    double runtime_seconds = 0.0;
    std::string config_echo;
    int failed_replications = 0;

    bool all_pass() const;
    std::string to_json() const;
    void write_csv(const std::string& filename) const;
    double target(const std::string& name) const;
    double estimate(const std::string& name) const;
};

ExperimentReport run(const ExperimentConfig& config);

// sup distance between the empirical CDF of the sample and standard normal
double ks_statistic(std::vector<double> sample);
// asymptotic critical value at the given level (0.05 or 0.01)
double ks_critical(double level, long n);

// unbiased sample covariance of R x k observations
Mat empirical_cov(const std::vector<std::vector<double>>& samples);

}  // namespace flurlab
