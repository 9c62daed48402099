#pragma once

#include <utility>
#include <vector>

#include "flurlab/linalg.hpp"
#include "flurlab/process.hpp"
#include "flurlab/tfcalc.hpp"

// Truncated-power-basis piecewise polynomial regression with one unknown
// knot: profiled least squares and the asymptotic machinery Lambda, Sigma,
// Lambda Sigma Lambda.

namespace flurlab {

struct PiecewiseModel {
    int q = 2;           // polynomial part order (basis 1, s, ..., s^{q-1})
    int p = 3;           // total basis size; knot terms (s-eta)_+^1 .. ^(p-q)
    double eta = 0.5;    // knot
    std::vector<double> a;  // p coefficients

    void validate() const;
    // basis function f_i, i = 1..p
    double basis(int i, double s) const;
    double mu(double s) const;
};

struct FitResult {
    std::vector<double> a_hat;
    double eta_hat = 0.0;
    double rss = 0.0;
    std::vector<std::pair<double, double>> eta_profile;  // coarse grid (eta, rss)
    bool degenerate = false;                              // flat profile
};

// entries f_i(j/n); throws on rank deficiency
Mat design_matrix(int q, int p, double eta, long n);

struct FitOptions {
    bool keep_profile = true;
    double golden_tol = 1e-6;
};

// profile LS: coarse midpoint grid, golden-section refinement, ties to the
// smallest eta
FitResult fit(const std::vector<double>& y, int q, int p, const FitOptions& opts = {});

// the p+1 one-sided partials (a_1..a_p, then the right eta-partial)
std::vector<PiecewisePolynomial> mu_partials_plus(const PiecewiseModel& model);

// inverse Gram matrix of the partials (exact piecewise-polynomial integrals)
Mat lambda_matrix(const PiecewiseModel& model);
Mat gram_matrix(const PiecewiseModel& model);

enum class SigmaCase { Strong, Weak, Moderate };

// Sigma matrices of the limit law.  Strong: the printed product-of-integrals
// form (see sigma_matrix_strong_coupled for the coupled candidate).  Weak and
// moderate: the operator form int (I mu_i)(I mu_k), which the simulated
// estimator matches.
Mat sigma_matrix(const PiecewiseModel& model, SigmaCase regime_case, double d,
                 double lambda_star);
Mat sigma_matrix_strong_coupled(const PiecewiseModel& model);

// Bessel/power-kernel closed forms used as cross-checks of the operator route
Mat sigma_matrix_closed_form(const PiecewiseModel& model, SigmaCase regime_case, double d,
                             double lambda_star);

Mat asymptotic_covariance(const PiecewiseModel& model, SigmaCase regime_case, double d,
                          double lambda_star);

// (M+^T M+)^{-1} M+^T at the true parameters, for the linearization check
Mat linearization_operator(const PiecewiseModel& model, long n);

std::string fit_result_to_json(const FitResult& fr);

}  // namespace flurlab
