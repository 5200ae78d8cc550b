#include "cqp/qlin.hpp"
#include "register_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace cqp::qlin {

namespace {

using detail::stride_of;

std::vector<std::size_t> target_positions(const PureState &s, const std::vector<std::string> &targets) {
    std::vector<std::size_t> out;
    std::unordered_set<std::string> seen;
    for (const auto &t : targets) {
        if (!seen.insert(t).second) {
            throw LinearAlgebraError("duplicate target qudit '" + t + "'");
        }
        out.push_back(s.position(t));
    }
    return out;
}

bool targets_zero(std::size_t index, int d, std::size_t n, const std::vector<std::size_t> &positions) {
    for (const auto p : positions) {
        if ((index / stride_of(d, n, p)) % d != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

PureState::PureState(int d, std::vector<std::string> qudits, std::vector<Complex> amps)
    : d_(d), qudits_(std::move(qudits)), amps_(std::move(amps)) {
    if (d < 2) {
        throw LinearAlgebraError("qudit dimension must be at least 2");
    }
    if (amps_.size() != ipow(d, qudits_.size())) {
        throw LinearAlgebraError("amplitude vector length does not match d^n");
    }
    std::unordered_set<std::string> seen;
    for (const auto &q : qudits_) {
        if (!seen.insert(q).second) {
            throw LinearAlgebraError("duplicate qudit name '" + q + "'");
        }
    }
    if (std::abs(norm_squared() - 1.0) > kNormTol) {
        throw LinearAlgebraError("state is not normalized");
    }
}

PureState PureState::basis(int d, std::vector<std::string> qudits, std::span<const int> digits) {
    if (digits.size() != qudits.size()) {
        throw LinearAlgebraError("basis: one digit per qudit required");
    }
    std::size_t index = 0;
    for (const int digit : digits) {
        if (digit < 0 || digit >= d) {
            throw LinearAlgebraError("basis: digit out of range");
        }
        index = index * d + digit;
    }
    std::vector<Complex> amps(ipow(d, qudits.size()));
    amps[index] = 1.0;
    return PureState(d, std::move(qudits), std::move(amps));
}

PureState PureState::empty(int d) {
    return PureState(d, {}, {Complex{1.0}});
}

double PureState::norm_squared() const {
    double total = 0.0;
    for (const auto &a : amps_) {
        total += std::norm(a);
    }
    return total;
}

std::size_t PureState::position(const std::string &name) const {
    const auto it = std::find(qudits_.begin(), qudits_.end(), name);
    if (it == qudits_.end()) {
        throw LinearAlgebraError("unknown qudit '" + name + "'");
    }
    return static_cast<std::size_t>(it - qudits_.begin());
}

PureState PureState::reordered(const std::vector<std::string> &order) const {
    if (order.size() != qudits_.size()) {
        throw LinearAlgebraError("reorder: not a permutation of the register");
    }
    const std::size_t n = qudits_.size();
    std::vector<std::size_t> src_stride(n);
    for (std::size_t i = 0; i < n; ++i) {
        src_stride[i] = stride_of(d_, n, position(order[i]));
    }
    std::vector<Complex> out(amps_.size());
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        std::size_t rem = idx;
        std::size_t src = 0;
        for (std::size_t i = n; i-- > 0;) {
            src += (rem % d_) * src_stride[i];
            rem /= d_;
        }
        out[idx] = amps_[src];
    }
    return PureState(d_, order, std::move(out));
}

PureState PureState::renamed(std::vector<std::string> names) const {
    if (names.size() != qudits_.size()) {
        throw LinearAlgebraError("rename: name count mismatch");
    }
    return PureState(d_, std::move(names), amps_);
}

PureState tensor(const PureState &a, const PureState &b) {
    if (a.dim() != b.dim()) {
        throw LinearAlgebraError("tensor: dimensions differ");
    }
    std::vector<std::string> names = a.qudits();
    names.insert(names.end(), b.qudits().begin(), b.qudits().end());
    std::vector<Complex> amps;
    amps.reserve(a.amps().size() * b.amps().size());
    for (const auto &x : a.amps()) {
        for (const auto &y : b.amps()) {
            amps.push_back(x * y);
        }
    }
    return PureState(a.dim(), std::move(names), std::move(amps));
}

Complex inner(const PureState &a, const PureState &b) {
    if (a.amps().size() != b.amps().size()) {
        throw LinearAlgebraError("inner: register sizes differ");
    }
    Complex total = 0.0;
    for (std::size_t i = 0; i < a.amps().size(); ++i) {
        total += std::conj(a.amp(i)) * b.amp(i);
    }
    return total;
}

PureState bell_state(int d, int n, int m, std::string first, std::string second) {
    if (n < 0 || n >= d || m < 0 || m >= d) {
        throw LinearAlgebraError("bell_state: indices must lie in [0, d)");
    }
    std::vector<Complex> amps(static_cast<std::size_t>(d) * d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < d; ++j) {
        amps[static_cast<std::size_t>(j) * d + mod_d(j + m, d)] =
            omega_pow(d, -static_cast<long long>(j) * n) * scale;
    }
    return PureState(d, {std::move(first), std::move(second)}, std::move(amps));
}

PureState apply_gate(const PureState &s, const Unitary &u, const std::vector<std::string> &targets) {
    if (u.d != s.dim()) {
        throw LinearAlgebraError("apply_gate: gate dimension differs from state dimension");
    }
    if (targets.size() != static_cast<std::size_t>(u.arity)) {
        throw LinearAlgebraError("apply_gate: gate arity " + std::to_string(u.arity) + " but " +
                                 std::to_string(targets.size()) + " targets");
    }
    const int d = s.dim();
    const std::size_t n = s.num_qudits();
    const auto positions = target_positions(s, targets);
    const auto offsets = detail::sub_offsets(d, n, positions);
    const std::size_t block = offsets.size();

    const auto &in = s.amps();
    std::vector<Complex> out(in.size());
    std::vector<Complex> gathered(block);
    for (std::size_t base = 0; base < in.size(); ++base) {
        if (!targets_zero(base, d, n, positions)) {
            continue;
        }
        for (std::size_t k = 0; k < block; ++k) {
            gathered[k] = in[base + offsets[k]];
        }
        for (std::size_t r = 0; r < block; ++r) {
            Complex acc = 0.0;
            for (std::size_t c = 0; c < block; ++c) {
                acc += u.matrix(r, c) * gathered[c];
            }
            out[base + offsets[r]] = acc;
        }
    }
    return PureState(d, s.qudits(), std::move(out));
}

std::vector<MeasurementBranch> measure_qudits(const PureState &s, const std::vector<std::string> &targets) {
    const int d = s.dim();
    const std::size_t n = s.num_qudits();
    const auto positions = target_positions(s, targets);
    const std::size_t outcomes = ipow(d, positions.size());

    // Sub-index of every basis state restricted to the targets.
    const auto &amps = s.amps();
    std::vector<std::size_t> outcome_of(amps.size());
    std::vector<double> weight(outcomes, 0.0);
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        std::size_t m = 0;
        for (const auto p : positions) {
            m = m * d + (idx / stride_of(d, n, p)) % d;
        }
        outcome_of[idx] = m;
        weight[m] += std::norm(amps[idx]);
    }

    std::vector<MeasurementBranch> branches;
    for (std::size_t m = 0; m < outcomes; ++m) {
        if (weight[m] <= kPruneTol) {
            continue;
        }
        const double scale = 1.0 / std::sqrt(weight[m]);
        std::vector<Complex> post(amps.size());
        for (std::size_t idx = 0; idx < amps.size(); ++idx) {
            if (outcome_of[idx] == m) {
                post[idx] = amps[idx] * scale;
            }
        }
        branches.push_back({m, weight[m], PureState(d, s.qudits(), std::move(post))});
    }
    return branches;
}

}  // namespace cqp::qlin
