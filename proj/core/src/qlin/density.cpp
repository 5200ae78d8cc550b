#include "cqp/qlin.hpp"
#include "register_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace cqp::qlin {

namespace {

struct TraceLayout {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> traced;
};

TraceLayout trace_layout(int d, const std::vector<std::string> &all, const std::vector<std::string> &keep) {
    std::vector<std::size_t> keep_pos;
    std::unordered_set<std::string> seen;
    for (const auto &k : keep) {
        const auto it = std::find(all.begin(), all.end(), k);
        if (it == all.end()) {
            throw LinearAlgebraError("partial_trace: unknown qudit '" + k + "'");
        }
        if (!seen.insert(k).second) {
            throw LinearAlgebraError("partial_trace: duplicate qudit '" + k + "'");
        }
        keep_pos.push_back(static_cast<std::size_t>(it - all.begin()));
    }
    std::vector<std::size_t> traced_pos;
    for (std::size_t p = 0; p < all.size(); ++p) {
        if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end()) {
            traced_pos.push_back(p);
        }
    }
    const std::size_t n = all.size();
    return {detail::sub_offsets(d, n, keep_pos), detail::sub_offsets(d, n, traced_pos)};
}

}  // namespace

DensityMatrix::DensityMatrix(int d, std::vector<std::string> qudits, Matrix matrix)
    : d_(d), qudits_(std::move(qudits)), matrix_(std::move(matrix)) {
    const std::size_t size = ipow(d, qudits_.size());
    if (matrix_.rows() != size || matrix_.cols() != size) {
        throw LinearAlgebraError("density matrix shape does not match d^n");
    }
}

DensityMatrix DensityMatrix::ketbra(const PureState &s) {
    const auto &a = s.amps();
    Matrix m(a.size(), a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a.size(); ++c) {
            m(r, c) = a[r] * std::conj(a[c]);
        }
    }
    return DensityMatrix(s.dim(), s.qudits(), std::move(m));
}

bool DensityMatrix::is_hermitian(double tol) const {
    return matrix_.approx_equal(matrix_.adjoint(), tol);
}

bool DensityMatrix::has_unit_trace(double tol) const {
    return std::abs(matrix_.trace() - Complex{1.0}) <= tol;
}

bool DensityMatrix::is_positive_semidefinite(double tol) const {
    // Cholesky of rho + tol*I succeeds iff every eigenvalue exceeds -tol.
    const std::size_t n = matrix_.rows();
    Matrix a = matrix_;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) += tol;
    }
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * std::conj(l(j, k));
        }
        if (diag.real() <= 0.0) {
            return false;
        }
        const double root = std::sqrt(diag.real());
        l(j, j) = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = s / root;
        }
    }
    return true;
}

DensityMatrix DensityMatrix::weighted_sum(const DensityMatrix &other, double w_self, double w_other) const {
    if (other.qudits_.size() != qudits_.size() || other.d_ != d_) {
        throw LinearAlgebraError("weighted_sum: registers differ");
    }
    return DensityMatrix(d_, qudits_, matrix_.scaled(w_self) + other.matrix_.scaled(w_other));
}

DensityMatrix partial_trace(const PureState &s, const std::vector<std::string> &keep) {
    const auto layout = trace_layout(s.dim(), s.qudits(), keep);
    const auto &amps = s.amps();
    const std::size_t k = layout.kept.size();
    Matrix out(k, k);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            Complex acc = 0.0;
            for (const auto e : layout.traced) {
                acc += amps[layout.kept[r] + e] * std::conj(amps[layout.kept[c] + e]);
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix(s.dim(), keep, std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep) {
    const auto layout = trace_layout(rho.dim(), rho.qudits(), keep);
    const auto &m = rho.matrix();
    const std::size_t k = layout.kept.size();
    Matrix out(k, k);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            Complex acc = 0.0;
            for (const auto e : layout.traced) {
                acc += m(layout.kept[r] + e, layout.kept[c] + e);
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix(rho.dim(), keep, std::move(out));
}

double fidelity(const DensityMatrix &rho, const PureState &psi) {
    const auto &a = psi.amps();
    const auto &m = rho.matrix();
    if (m.rows() != a.size()) {
        throw LinearAlgebraError("fidelity: register sizes differ");
    }
    Complex acc = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a.size(); ++c) {
            acc += std::conj(a[r]) * m(r, c) * a[c];
        }
    }
    return acc.real();
}

}  // namespace cqp::qlin
