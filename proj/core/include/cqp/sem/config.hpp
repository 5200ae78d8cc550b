#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cqp/lang/ast.hpp"
#include "cqp/qlin.hpp"

namespace cqp::sem {

/// One branch of a (possibly mixed) configuration. `values[k]` is the
/// measured value this branch substitutes for placeholder column k.
struct Component {
    double weight = 1.0;
    qlin::PureState state;
    std::vector<long long> values;
};

/// A configuration (σ; ω; P), generalised to a weighted mixture of
/// components that share one term. Measured values that still differ
/// between components appear in the term as placeholders (MixRef).
///
/// All components' states range over the same qudit list. Qudits that
/// left through a visible output are listed in `env` in the order they
/// left; every other qudit is in `owned`.
struct Configuration {
    int d = 2;
    std::vector<std::string> owned;
    std::vector<std::string> env;
    std::vector<Component> components;
    lang::ProcPtr term;
    int columns = 0;
    int external_channels = 0;  // channel names received from outside so far

    const std::vector<std::string> &qudits() const { return components.front().state.qudits(); }
    bool is_mixed() const { return components.size() > 1; }
};

/// An item of an input or output label.
struct LabelItem {
    enum class Kind { Int, Qudit, Channel, Gate };
    Kind kind = Kind::Int;
    long long value = 0;  // Int value, or the input-family index for received qudits
    std::string name;     // qudit, channel or gate name

    bool operator==(const LabelItem &) const = default;
};

struct Label {
    enum class Kind { Tau, In, Out, Prob };
    Kind kind = Kind::Tau;
    std::string chan;
    std::vector<LabelItem> items;
    double prob = 1.0;
    std::vector<long long> outcome;  // Prob: the values fixed by the collapse

    static Label tau() { return {}; }

    /// Human readable, e.g. "tau", "c?[q<0>]", "d![q#2]", "prob 0.25 (0,1)".
    std::string str() const;
    /// Identity of the label for matching between processes: names of
    /// transmitted qudits are left out, and so is the probability.
    std::string key() const;
};

class SemanticsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace cqp::sem
