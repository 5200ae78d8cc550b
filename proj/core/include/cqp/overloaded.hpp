#pragma once

namespace cqp {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace cqp
