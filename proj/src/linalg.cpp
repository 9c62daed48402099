#include "flurlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace flurlab {

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw DomainError("Mat: dimension mismatch in product");
    Mat out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += aik * o(k, j);
        }
    return out;
}

namespace {

bool try_cholesky(const Mat& m, double eps, Mat& out) {
    const std::size_t n = m.rows();
    out = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j) + eps;
        for (std::size_t k = 0; k < j; ++k) diag -= out(j, k) * out(j, k);
        if (!(diag > 0.0)) return false;
        out(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= out(i, k) * out(j, k);
            out(i, j) = v / out(j, j);
        }
    }
    return true;
}

}  // namespace

CholeskyResult cholesky_jittered(const Mat& m, double max_jitter_rel) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("cholesky: square matrix required");
    const std::size_t n = m.rows();
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
    const double unit = std::max(trace / static_cast<double>(n), 1e-300);

    CholeskyResult r;
    for (double rel : {0.0, 1e-16, 1e-14, 1e-12, max_jitter_rel}) {
        if (rel > max_jitter_rel) break;
        const double eps = rel * unit;
        if (try_cholesky(m, eps, r.lower)) {
            r.jitter = eps;
            return r;
        }
    }
    throw NumericalError("cholesky: matrix indefinite beyond jitter budget");
}

std::vector<double> cholesky_solve(const Mat& lower, std::vector<double> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw DomainError("cholesky_solve: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= lower(i, k) * b[k];
        b[i] = v / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= lower(k, ii) * b[k];
        b[ii] = v / lower(ii, ii);
    }
    return b;
}

std::vector<double> symmetric_eigenvalues(Mat a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw DomainError("symmetric_eigenvalues: square matrix required");
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t =
                    ((theta >= 0.0) ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> solve_spd(const Mat& a, const std::vector<double>& b) {
    const std::size_t n = a.rows();
    // column scaling guards the ill-conditioned truncated-power Gram matrices
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(std::max(a(i, i), 1e-300));
    Mat as(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) as(i, j) = a(i, j) * scale[i] * scale[j];
    std::vector<double> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = b[i] * scale[i];
    auto ch = cholesky_jittered(as, 1e-10);
    auto xs = cholesky_solve(ch.lower, bs);
    for (std::size_t i = 0; i < n; ++i) xs[i] *= scale[i];
    return xs;
}

Mat invert_spd(const Mat& a) {
    const std::size_t n = a.rows();
    Mat inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        auto col = solve_spd(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // symmetrize
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = inv(j, i) = v;
        }
    return inv;
}

}  // namespace flurlab
