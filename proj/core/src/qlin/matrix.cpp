#include "cqp/qlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cqp::qlin {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

Complex Matrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

Matrix Matrix::operator*(const Matrix &rhs) const {
    if (cols_ != rhs.rows_) {
        throw LinearAlgebraError("matrix product: inner dimensions differ");
    }
    Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const Complex a = (*this)(r, k);
            if (a == Complex{}) {
                continue;
            }
            for (std::size_t c = 0; c < rhs.cols_; ++c) {
                out(r, c) += a * rhs(k, c);
            }
        }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw LinearAlgebraError("matrix sum: shapes differ");
    }
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out.data_[i] += rhs.data_[i];
    }
    return out;
}

Matrix Matrix::scaled(Complex factor) const {
    Matrix out = *this;
    for (auto &x : out.data_) {
        x *= factor;
    }
    return out;
}

double Matrix::max_abs_diff(const Matrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        worst = std::max(worst, std::abs(data_[i] - rhs.data_[i]));
    }
    return worst;
}

bool Matrix::approx_equal(const Matrix &rhs, double tol) const {
    return max_abs_diff(rhs) <= tol;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex x = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = x * b(br, bc);
                }
            }
        }
    }
    return out;
}

std::size_t ipow(int d, std::size_t exponent) {
    if (d < 1) {
        throw LinearAlgebraError("dimension must be positive");
    }
    std::size_t out = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        out *= static_cast<std::size_t>(d);
        if (out > (std::size_t{1} << 40)) {
            throw LinearAlgebraError("register too large");
        }
    }
    return out;
}

int mod_d(long long k, int d) {
    const long long r = k % d;
    return static_cast<int>(r < 0 ? r + d : r);
}

Complex omega(int d) {
    return omega_pow(d, 1);
}

Complex omega_pow(int d, long long k) {
    if (d < 1) {
        throw LinearAlgebraError("omega: dimension must be positive");
    }
    const int e = mod_d(k, d);
    if (e == 0) {
        return 1.0;
    }
    // Exact values on the axes keep small-d phases free of rounding noise.
    if (4 * e == d) {
        return {0.0, 1.0};
    }
    if (2 * e == d) {
        return -1.0;
    }
    if (4 * e == 3 * d) {
        return {0.0, -1.0};
    }
    const double angle = 2.0 * std::numbers::pi * e / d;
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace cqp::qlin
