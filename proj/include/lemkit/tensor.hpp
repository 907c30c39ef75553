#pragma once

// Minimal dense row-major matrix plus the handful of BLAS-ish kernels the
// recurrent model needs. Everything is double precision so the
// finite-difference gradient oracle is decisive.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace lemkit {

struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

using Vec = std::vector<double>;

// y += M x
inline void matvec_acc(const Tensor2& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += M^T x
inline void matvec_transpose_acc(const Tensor2& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.row(r);
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
}

// M += a b^T  (outer-product accumulate)
inline void outer_acc(Tensor2& m, const double* a, const double* b) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = m.row(r);
        const double ar = a[r];
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += ar * b[c];
    }
}

inline void axpy(Vec& y, double alpha, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace lemkit
