#pragma once

#include "cqp/qlin.hpp"

namespace cqp::qlin::detail {

// Stride of the qudit at `position` in a register of n qudits.
inline std::size_t stride_of(int d, std::size_t n, std::size_t position) {
    return ipow(d, n - 1 - position);
}

// Offsets of the d^r sub-basis states spanned by `positions`, with the
// first listed position as the most significant digit of the sub-index.
inline std::vector<std::size_t> sub_offsets(int d, std::size_t n, const std::vector<std::size_t> &positions) {
    const std::size_t r = positions.size();
    const std::size_t count = ipow(d, r);
    std::vector<std::size_t> offsets(count, 0);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t rem = k;
        std::size_t off = 0;
        for (std::size_t t = r; t-- > 0;) {
            off += (rem % d) * stride_of(d, n, positions[t]);
            rem /= d;
        }
        offsets[k] = off;
    }
    return offsets;
}

}  // namespace cqp::qlin::detail
