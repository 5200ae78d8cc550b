#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqp/lang/ast.hpp"
#include "cqp/sem/config.hpp"

namespace cqp::sem {

/// What the environment may send on free channels.
struct InputSpace {
    std::vector<long long> values;             // for Int binders
    std::vector<qlin::PureState> qudit_states;  // single-qudit states for Qdit binders
};

struct Transition {
    Label label;
    Configuration target;
};

struct StepResult {
    /// True when the next move reads a measured value that still differs
    /// between components; all transitions are then Prob collapses.
    bool probabilistic = false;
    std::vector<Transition> transitions;
};

/// Initial configuration of the program's main process: definitions are
/// expanded, free names become channels, and the result is normalised.
Configuration initial_configuration(const lang::Program &prog);
Configuration initial_configuration(const lang::ProcPtr &term, int d);

/// All transitions enabled in `c`. Targets are normalised.
StepResult step(const Configuration &c, const InputSpace &inputs);

/// One reduction of `e` in configuration `c`, or nullopt when `e` is
/// already a value. Placeholder operands are handled componentwise, so the
/// result may carry a new placeholder column.
struct ExprStep {
    Configuration config;
    lang::ExprPtr expr;
};
std::optional<ExprStep> reduce_expr(const Configuration &c, const lang::ExprPtr &e);

/// Structural normalisation followed by canonical renaming of qudits and
/// restricted channels, global-phase removal and merging of components
/// that are indistinguishable.
void normalize(Configuration &c);

/// Key identifying a normalised configuration up to the tolerances above.
std::string canonical_key(const Configuration &c);

/// Restricted channels are the names created by `new`.
bool is_restricted_channel(const std::string &name);

}  // namespace cqp::sem
