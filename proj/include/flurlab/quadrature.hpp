#pragma once

#include <functional>
#include <vector>

#include "flurlab/special.hpp"

namespace flurlab {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
            throw DomainError("QuadratureSpec: abs_tol, rel_tol > 0 and max_subdivisions >= 1");
    }
};

struct QuadratureError : NumericalError {
    using NumericalError::NumericalError;
};

// Adaptive Gauss-Kronrod 15-point integral of f on [a,b].  Integrable endpoint
// or interior singularities of type |u-c|^alpha, alpha > -1, are handled by
// listing c in breakpoints (the initial subdivision splits there and the
// Kronrod nodes never touch interval ends).
double quad_1d(const std::function<double(double)>& f, double a, double b,
               const QuadratureSpec& spec = {}, std::vector<double> breakpoints = {});

struct Rectangle {
    double ua, ub, va, vb;
};

// Double integral of g over a rectangle with an integrable singularity on the
// diagonal u = v: the inner integral splits at v = u.
double quad_2d_singular_diagonal(const std::function<double(double, double)>& g,
                                 const Rectangle& dom, double singularity_exponent,
                                 const QuadratureSpec& spec = {});

}  // namespace flurlab
