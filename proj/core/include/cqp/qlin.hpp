#pragma once

// Dense linear algebra for registers of d-level quantum systems.
//
// Basis convention: a register of n qudits is indexed by integers in
// [0, d^n) whose base-d digits are the qudit values, leftmost qudit most
// significant. Every state and gate in one computation shares one d.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqp::qlin {

using Complex = std::complex<double>;

// Equality and normalization tolerance.
inline constexpr double kNormTol = 1e-9;
// Measurement outcomes below this probability are dropped.
inline constexpr double kPruneTol = 1e-12;

class LinearAlgebraError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Square-or-rectangular complex matrix, row-major.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> data() const { return data_; }

    Matrix adjoint() const;
    Complex trace() const;
    Matrix operator*(const Matrix &rhs) const;
    Matrix operator+(const Matrix &rhs) const;
    Matrix scaled(Complex factor) const;

    /// Largest entrywise modulus of the difference.
    double max_abs_diff(const Matrix &rhs) const;
    bool approx_equal(const Matrix &rhs, double tol = kNormTol) const;

    bool operator==(const Matrix &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

Matrix kron(const Matrix &a, const Matrix &b);

/// d^exponent, throwing on overflow past 2^40 amplitudes.
std::size_t ipow(int d, std::size_t exponent);

/// Reduces k into [0, d).
int mod_d(long long k, int d);

/// exp(2*pi*i/d). d = 1 is accepted and yields 1.
Complex omega(int d);

/// omega(d)^k computed from k mod d, so omega_pow(d, d) is exactly 1.
Complex omega_pow(int d, long long k);

struct Unitary {
    int d = 2;
    int arity = 1;
    Matrix matrix;

    bool is_unitary(double tol = kNormTol) const;
};

Unitary hadamard(int d);
Unitary pauli_x_pow(int d, long long j);
Unitary pauli_z_pow(int d, long long k);
/// R_C^k |m,n> = |m, n + k*m mod d>; the first qudit is the control.
Unitary cnot_rshift(int d, long long k = 1);
/// L_C |m,n> = |m, n - m mod d>.
Unitary cnot_lshift(int d);
Unitary identity_gate(int d, int arity);

/// Integer power of a unitary; negative powers use the adjoint.
Unitary power(const Unitary &u, long long k);

class PureState {
  public:
    PureState(int d, std::vector<std::string> qudits, std::vector<Complex> amps);

    /// Product of computational basis states |digits[0]> ... |digits[n-1]>.
    static PureState basis(int d, std::vector<std::string> qudits, std::span<const int> digits);
    /// The zero-qudit state (amplitude vector [1]).
    static PureState empty(int d);

    int dim() const { return d_; }
    std::size_t num_qudits() const { return qudits_.size(); }
    const std::vector<std::string> &qudits() const { return qudits_; }
    const std::vector<Complex> &amps() const { return amps_; }
    Complex amp(std::size_t i) const { return amps_[i]; }

    double norm_squared() const;
    /// Position of a qudit name; throws on unknown names.
    std::size_t position(const std::string &name) const;

    /// Reorders the register so that qudits appear in `order` (a permutation).
    PureState reordered(const std::vector<std::string> &order) const;
    PureState renamed(std::vector<std::string> names) const;

  private:
    int d_;
    std::vector<std::string> qudits_;
    std::vector<Complex> amps_;
};

PureState tensor(const PureState &a, const PureState &b);
Complex inner(const PureState &a, const PureState &b);

/// Generalized Bell state (1/sqrt d) sum_j omega^{-jn} |j> |j+m>.
PureState bell_state(int d, int n, int m, std::string first = "A", std::string second = "B");

/// Applies u to `targets` (in order) and the identity elsewhere.
PureState apply_gate(const PureState &s, const Unitary &u, const std::vector<std::string> &targets);

struct MeasurementBranch {
    std::size_t outcome = 0;
    double weight = 0.0;
    PureState post_state;
};

/// Computational-basis measurement of `targets`. Outcome digits follow the
/// order of `targets` (first target most significant). Branches with
/// probability at most kPruneTol are omitted.
std::vector<MeasurementBranch> measure_qudits(const PureState &s, const std::vector<std::string> &targets);

class DensityMatrix {
  public:
    DensityMatrix(int d, std::vector<std::string> qudits, Matrix matrix);

    static DensityMatrix ketbra(const PureState &s);

    int dim() const { return d_; }
    const std::vector<std::string> &qudits() const { return qudits_; }
    const Matrix &matrix() const { return matrix_; }

    bool is_hermitian(double tol = kNormTol) const;
    bool has_unit_trace(double tol = kNormTol) const;
    /// Eigenvalues >= -tol, tested by Cholesky factorization of rho + tol*I.
    bool is_positive_semidefinite(double tol = kNormTol) const;

    DensityMatrix weighted_sum(const DensityMatrix &other, double w_self, double w_other) const;

  private:
    int d_;
    std::vector<std::string> qudits_;
    Matrix matrix_;
};

/// Reduced density matrix over `keep`, ordered as listed.
DensityMatrix partial_trace(const PureState &s, const std::vector<std::string> &keep);
DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep);

/// <psi| rho |psi> for a pure state on the same number of qudits.
double fidelity(const DensityMatrix &rho, const PureState &psi);

}  // namespace cqp::qlin
