#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flurlab/rng.hpp"
#include "flurlab/special.hpp"

// Tempered linear (FLUR) processes: binomial moving-average coefficients,
// certified truncation, simulation, exact autocovariances and the Tauberian
// ratio used by the appendix checks.

namespace flurlab {

enum class CoefficientFamily { Binomial, UserSupplied };
enum class InnovationLaw { Gaussian };

struct ProcessSpec {
    double d = 0.0;
    double lambda = 0.0;  // tempering parameter, >= 0
    double sigma = 1.0;   // innovation standard deviation
    CoefficientFamily family = CoefficientFamily::Binomial;
    std::vector<double> user_coefficients;  // for UserSupplied
    InnovationLaw law = InnovationLaw::Gaussian;

    void validate() const;
};

enum class TemperingClass { Weak, Moderate, Strong };

struct TemperingRegime {
    enum class Schedule { Fixed, PowerLaw };
    Schedule schedule = Schedule::Fixed;
    double fixed_lambda = 0.0;  // Fixed(lambda)
    double c = 0.0, gamma = 1.0;  // PowerLaw: lambda_N = c * N^-gamma

    static TemperingRegime fixed(double lambda);
    static TemperingRegime power_law(double c, double gamma);

    double lambda_at(double n) const;
    // lim N * lambda_N; +inf encoded as infinity()
    double lambda_star() const;
    TemperingClass classify() const;
};

struct SamplePath {
    std::vector<double> values;  // X(1..n)
    ProcessSpec spec;
    long n = 0;
    SeedTree seed_path;
    long truncation_m = 0;  // MA truncation used (certified ACVF length for the exact route)
};

// c_k = e^{-lambda k} * omega_{-d}(k), omega via the Gamma-ratio recurrence.
std::vector<double> binomial_coefficients(double d, double lambda, long m);

// Smallest M with certified tail sum_{k>M} c_k^2 <= tail_tol (binomial family).
long truncation_length(double d, double lambda, double tail_tol);

// Controls the switch from MA convolution to exact circulant-embedding
// sampling when the certified truncation grows past ma_cap.
struct SimulateOptions {
    long ma_cap = (1L << 21);
    double tail_tol = 1e-12;
};

// Route decision and all per-configuration precomputation (coefficients,
// kernel transform, circulant eigenvalues) happen once; sample() is cheap and
// safe to call from several threads.
class PathSampler {
  public:
    PathSampler(const ProcessSpec& spec, const TemperingRegime& regime, long n,
                const SimulateOptions& opts = {});

    SamplePath sample(const SeedTree& seeds) const;
    long truncation() const { return truncation_m_; }

  private:
    enum class Route { Iid, MovingAverage, Circulant };
    Route route_ = Route::Iid;
    ProcessSpec spec_;
    double lambda_n_ = 0.0;
    long n_ = 0;
    long truncation_m_ = 0;
    std::vector<std::complex<double>> kernel_fft_;  // MA route
    std::size_t fft_len_ = 0;
    std::vector<double> eigenvalues_;  // circulant route
};

SamplePath simulate(const ProcessSpec& spec, const TemperingRegime& regime, long n,
                    const SeedTree& seeds, const SimulateOptions& opts = {});

double partial_sum(const SamplePath& path, double u);

// gamma(0..max_lag); exact closed form at lambda=0 (|d|<1/2, binomial),
// certified coefficient autocorrelation otherwise.
std::vector<double> theoretical_acvf(const ProcessSpec& spec, double lambda_eff, long max_lag);

// (lambda_n + i y/n)^d * sum_k e^{-(lambda_n + i y/n) k} b_d(k); -> 1 as n grows.
std::complex<double> tauberian_ratio(double d, double lambda_n, double n, double y);

// CSV export: header "index,value", 17 significant digits.
void write_path_csv(const SamplePath& path, const std::string& filename);

}  // namespace flurlab
