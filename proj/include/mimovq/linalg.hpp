#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ops_count.hpp"

// Small dense complex linear algebra: just what the detectors need.
// Matrices are column-major so channel columns are contiguous (PIC, MLSD and
// MRC all walk columns).  One complex multiply-accumulate is booked as four
// real MACs.

namespace mimovq {

using cdouble = std::complex<double>;

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cdouble> data;  // column-major

    CMatrix() = default;
    CMatrix(int r, int c)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}

    cdouble& operator()(int r, int c) {
        return data[static_cast<std::size_t>(c) * rows + r];
    }
    const cdouble& operator()(int r, int c) const {
        return data[static_cast<std::size_t>(c) * rows + r];
    }
    std::span<cdouble> col(int c) {
        return {data.data() + static_cast<std::size_t>(c) * rows, static_cast<std::size_t>(rows)};
    }
    std::span<const cdouble> col(int c) const {
        return {data.data() + static_cast<std::size_t>(c) * rows, static_cast<std::size_t>(rows)};
    }
};

inline CMatrix drop_column(const CMatrix& a, int c) {
    if (c < 0 || c >= a.cols) throw std::invalid_argument("drop_column: column out of range");
    CMatrix r(a.rows, a.cols - 1);
    int out = 0;
    for (int j = 0; j < a.cols; ++j) {
        if (j == c) continue;
        auto src = a.col(j);
        auto dst = r.col(out++);
        for (int i = 0; i < a.rows; ++i) dst[i] = src[i];
    }
    return r;
}

// y = A x
inline std::vector<cdouble> mat_vec(const CMatrix& a, std::span<const cdouble> x) {
    if (static_cast<int>(x.size()) != a.cols) throw std::invalid_argument("mat_vec: size mismatch");
    std::vector<cdouble> y(a.rows, cdouble(0.0, 0.0));
    for (int c = 0; c < a.cols; ++c) {
        const cdouble xc = x[c];
        auto col = a.col(c);
        for (int r = 0; r < a.rows; ++r) y[r] += col[r] * xc;
    }
    ops::add_macs(4ull * a.rows * a.cols);
    return y;
}

// q = A^H y
inline std::vector<cdouble> adjoint_vec(const CMatrix& a, std::span<const cdouble> y) {
    if (static_cast<int>(y.size()) != a.rows) throw std::invalid_argument("adjoint_vec: size mismatch");
    std::vector<cdouble> q(a.cols, cdouble(0.0, 0.0));
    for (int c = 0; c < a.cols; ++c) {
        cdouble acc(0.0, 0.0);
        auto col = a.col(c);
        for (int r = 0; r < a.rows; ++r) acc += std::conj(col[r]) * y[r];
        q[c] = acc;
    }
    ops::add_macs(4ull * a.rows * a.cols);
    return q;
}

// G = A^H A (Hermitian, computed in full)
inline CMatrix gram(const CMatrix& a) {
    CMatrix g(a.cols, a.cols);
    for (int i = 0; i < a.cols; ++i) {
        auto ci = a.col(i);
        for (int j = i; j < a.cols; ++j) {
            auto cj = a.col(j);
            cdouble acc(0.0, 0.0);
            for (int r = 0; r < a.rows; ++r) acc += std::conj(ci[r]) * cj[r];
            g(i, j) = acc;
            g(j, i) = std::conj(acc);
        }
    }
    ops::add_macs(4ull * a.rows * a.cols * (a.cols + 1) / 2);
    return g;
}

inline double norm_sq(std::span<const cdouble> v) {
    double s = 0.0;
    for (const cdouble& z : v) s += z.real() * z.real() + z.imag() * z.imag();
    ops::add_macs(2ull * v.size());
    return s;
}

inline double norm_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    ops::add_macs(v.size());
    return s;
}

// Solves G x = rhs for Hermitian positive definite G via in-place Cholesky.
// A pivot at or below the rank tolerance raises SingularMatrixError; there is
// deliberately no fallback regularization.
inline std::vector<cdouble> solve_hermitian(CMatrix g, std::vector<cdouble> rhs) {
    const int n = g.cols;
    if (g.rows != n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_hermitian: size mismatch");

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(g(i, i).real()));
    const double tol = std::max(scale, 1.0) * n * 64.0 * std::numeric_limits<double>::epsilon();

    // G = L L^H, L lower triangular stored in g.
    for (int j = 0; j < n; ++j) {
        double d = g(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(g(j, k));
        if (!(d > tol)) throw SingularMatrixError("solve_hermitian: matrix is singular to working precision");
        const double ljj = std::sqrt(d);
        g(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            cdouble acc = g(i, j);
            for (int k = 0; k < j; ++k) acc -= g(i, k) * std::conj(g(j, k));
            g(i, j) = acc / ljj;
        }
    }
    // Forward substitution: L z = rhs.
    for (int i = 0; i < n; ++i) {
        cdouble acc = rhs[i];
        for (int k = 0; k < i; ++k) acc -= g(i, k) * rhs[k];
        rhs[i] = acc / g(i, i).real();
    }
    // Back substitution: L^H x = z.
    for (int i = n - 1; i >= 0; --i) {
        cdouble acc = rhs[i];
        for (int k = i + 1; k < n; ++k) acc -= std::conj(g(k, i)) * rhs[k];
        rhs[i] = acc / g(i, i).real();
    }
    ops::add_macs(4ull * n * n * n / 3 + 8ull * n * n);
    return rhs;
}

}  // namespace mimovq
