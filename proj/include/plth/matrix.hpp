#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace plth {

// Dense row-major matrix of doubles, sized at construction.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    const double* row(std::size_t i) const { return a.data() + i * cols; }
    double* row(std::size_t i) { return a.data() + i * cols; }

    std::size_t count() const { return rows * cols; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// y = M x.
inline void matvec(const Matrix& m, const double* x, double* y) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
}

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows);
    matvec(m, x.data(), y.data());
    return y;
}

// y = M^T x.
inline void matvec_t(const Matrix& m, const double* x, double* y) {
    for (std::size_t j = 0; j < m.cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        double xi = x[i];
        for (std::size_t j = 0; j < m.cols; ++j) y[j] += r[j] * xi;
    }
}

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace plth
