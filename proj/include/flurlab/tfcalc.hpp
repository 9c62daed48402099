#pragma once

#include <vector>

#include "flurlab/quadrature.hpp"

// Tempered fractional integral I^{kappa,lambda}_± and derivative
// D^{kappa,lambda}_± acting on sampled functions (product-integration
// weights), plus an exact evaluation path for piecewise polynomials used by
// the covariance-matrix formulas.

namespace flurlab {

struct SampledFunction {
    double lo = 0.0;
    double dx = 1.0;
    std::vector<double> values;

    double hi() const { return lo + dx * static_cast<double>(values.size() - 1); }
    // linear interpolation, zero outside the grid
    double eval(double y) const;
    void validate() const;
};

enum class OperatorSign { Plus, Minus };

struct TfcalcOptions {
    double kernel_tail_tol = 1e-12;  // relative mass left outside the window
    double lambda0_window_factor = 64.0;  // window length multiplier at lambda = 0
};

// I f: convolution with u^{kappa-1} e^{-lambda u} / Gamma(kappa); the minus
// sign looks forward in s, so the output support extends below the input's.
SampledFunction tfi(const SampledFunction& f, double kappa, double lambda, OperatorSign sign,
                    const TfcalcOptions& opts = {});

// D f: the difference-form singular integral with a Taylor surrogate on the
// innermost cell; requires 0 < kappa < 1, lambda > 0.
SampledFunction tfd(const SampledFunction& f, double kappa, double lambda, OperatorSign sign,
                    const TfcalcOptions& opts = {});

// trapezoid inner product; grids resampled (cubic) to the finer step
double weighted_l2_inner(const SampledFunction& f, const SampledFunction& g);

// ---- exact layer -----------------------------------------------------------

struct PolyPiece {
    double a = 0.0, b = 0.0;         // piece support [a, b)
    std::vector<double> coeffs;      // sum_m coeffs[m] s^m
    // one-sided partials take the open-side value at their jump point
    bool open_left = false;
};

class PiecewisePolynomial {
  public:
    PiecewisePolynomial() = default;
    explicit PiecewisePolynomial(std::vector<PolyPiece> pieces);

    static PiecewisePolynomial indicator(double a, double b);

    double eval(double s) const;
    double support_lo() const;
    double support_hi() const;
    double moment(int j) const;      // int s^j f(s) ds
    double inner(const PiecewisePolynomial& g) const;  // int f g ds, exact
    const std::vector<PolyPiece>& pieces() const { return pieces_; }
    std::vector<double> breakpoints() const;

  private:
    std::vector<PolyPiece> pieces_;
};

// exact pointwise (I^{kappa,lambda}_- f)(y) for piecewise-polynomial f
double tfi_pwpoly_minus(const PiecewisePolynomial& f, double kappa, double lambda, double y);

// int_R (I_- f)(y) (I_- g)(y) dy.  lambda = 0 requires 0 < kappa < 1/2 and
// adds the analytic algebraic-tail correction from the moment expansion.
double tfi_inner_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g,
                         double kappa, double lambda, const QuadratureSpec& spec = {});

}  // namespace flurlab
