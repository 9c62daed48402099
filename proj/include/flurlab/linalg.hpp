#pragma once

#include <cstddef>
#include <vector>

#include "flurlab/special.hpp"

namespace flurlab {

// Dense row-major matrix, sized for the small systems this project solves
// (Gram matrices, covariance grids up to 2048).
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }

    Mat transposed() const;
    Mat operator*(const Mat& o) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct CholeskyResult {
    Mat lower;
    double jitter = 0.0;  // epsilon actually added to the diagonal
};

// Cholesky of a symmetric PSD matrix, escalating a diagonal jitter up to
// max_jitter_rel * trace/n before giving up.
CholeskyResult cholesky_jittered(const Mat& m, double max_jitter_rel = 1e-10);

// Solve (L L^T) x = b given the lower factor.
std::vector<double> cholesky_solve(const Mat& lower, std::vector<double> b);

// Symmetric eigenvalues by cyclic Jacobi (small matrices only).
std::vector<double> symmetric_eigenvalues(Mat a);

// Solve the SPD system a x = b by scaled, jittered Cholesky.
std::vector<double> solve_spd(const Mat& a, const std::vector<double>& b);

Mat invert_spd(const Mat& a);

}  // namespace flurlab
