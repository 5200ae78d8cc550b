#include "cqp/qlin.hpp"

#include <cmath>

namespace cqp::qlin {

namespace {

void require_dim(int d) {
    if (d < 2) {
        throw LinearAlgebraError("qudit dimension must be at least 2, got " + std::to_string(d));
    }
}

}  // namespace

bool Unitary::is_unitary(double tol) const {
    const Matrix product = matrix * matrix.adjoint();
    return product.approx_equal(Matrix::identity(matrix.rows()), tol);
}

Unitary hadamard(int d) {
    require_dim(d);
    Unitary u{d, 1, Matrix(d, d)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    // H|j> = (1/sqrt d) sum_m omega^{-jm} |m>, so column j holds that vector.
    for (int m = 0; m < d; ++m) {
        for (int j = 0; j < d; ++j) {
            u.matrix(m, j) = omega_pow(d, -static_cast<long long>(j) * m) * scale;
        }
    }
    return u;
}

Unitary pauli_x_pow(int d, long long j) {
    require_dim(d);
    Unitary u{d, 1, Matrix(d, d)};
    for (int m = 0; m < d; ++m) {
        u.matrix(mod_d(m + j, d), m) = 1.0;
    }
    return u;
}

Unitary pauli_z_pow(int d, long long k) {
    require_dim(d);
    Unitary u{d, 1, Matrix(d, d)};
    for (int m = 0; m < d; ++m) {
        u.matrix(m, m) = omega_pow(d, mod_d(k, d) * static_cast<long long>(m));
    }
    return u;
}

Unitary cnot_rshift(int d, long long k) {
    require_dim(d);
    const std::size_t n = static_cast<std::size_t>(d) * d;
    Unitary u{d, 2, Matrix(n, n)};
    for (int m = 0; m < d; ++m) {
        for (int t = 0; t < d; ++t) {
            const int shifted = mod_d(t + mod_d(k, d) * static_cast<long long>(m), d);
            u.matrix(static_cast<std::size_t>(m) * d + shifted, static_cast<std::size_t>(m) * d + t) = 1.0;
        }
    }
    return u;
}

Unitary cnot_lshift(int d) {
    return cnot_rshift(d, -1);
}

Unitary identity_gate(int d, int arity) {
    require_dim(d);
    return Unitary{d, arity, Matrix::identity(ipow(d, static_cast<std::size_t>(arity)))};
}

Unitary power(const Unitary &u, long long k) {
    Unitary base = u;
    if (k < 0) {
        base.matrix = u.matrix.adjoint();
        k = -k;
    }
    Unitary out = identity_gate(u.d, u.arity);
    while (k > 0) {
        if (k & 1) {
            out.matrix = out.matrix * base.matrix;
        }
        base.matrix = base.matrix * base.matrix;
        k >>= 1;
    }
    return out;
}

}  // namespace cqp::qlin
