#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqp/equiv/bisim.hpp"
#include "cqp/lang/ast.hpp"

namespace cqp::protocols {

/// Source text of the teleportation program and of the identity wire it
/// is checked against. Both leave the dimension to the caller.
extern const char *const kTeleportSource;
extern const char *const kQWireSource;

lang::Program teleport_program(int d);
lang::Program qwire_program(int d);

/// Faulty variants used to check that the checker notices broken corrections.
enum class Mutant { DropZ, DropX, RightShiftEntangle };
std::string_view mutant_name(Mutant m);
lang::Program teleport_mutant(int d, Mutant m);

/// Nodes grouped by the visible labels seen on the way to them: none,
/// the input on c, or the input followed by the output on d.
struct ClassAudit {
    std::size_t before_input = 0;
    std::size_t after_input = 0;
    std::size_t after_output = 0;
    std::size_t ambiguous = 0;          // reachable under two different histories
    std::size_t unexpected = 0;         // a history outside the three above
    std::size_t active_after_output = 0;  // visible moves left after the output

    bool ok() const { return ambiguous == 0 && unexpected == 0 && active_after_output == 0; }
};

struct OutcomeRow {
    std::vector<long long> outcome;  // (M1, M2)
    double weight = 0.0;
    double fidelity = 0.0;   // <psi| rho_out |psi>
    double rho_error = 0.0;  // max entry difference to |psi><psi|
};

struct ProtocolReport {
    int d = 2;
    equiv::EquivalenceVerdict verdict;
    ClassAudit class_audit;
    std::string probe_state;  // input the table was computed for
    std::vector<OutcomeRow> outcomes;
    // Worst values over every input state of the family.
    double max_weight_error = 0.0;
    double max_rho_error = 0.0;
    double min_fidelity = 1.0;
};

struct VerifyOptions {
    std::vector<qlin::PureState> input_states;  // empty means the default family
    std::string family_name = "default";
    std::size_t max_nodes = 200000;
    bool parallel = true;
    int max_dim = 7;
};

/// Outcome rows of the teleport program fed `input`, read off its LTS.
std::vector<OutcomeRow> outcome_table(int d, const qlin::PureState &input, std::size_t max_nodes = 200000);

/// F-class audit over the teleport LTS for one input state.
ClassAudit audit_classes(const sem::Lts &lts);

/// Checks teleportation against the wire at dimension d. Throws
/// sem::NodeBudgetExceeded when d exceeds opts.max_dim or the node budget.
ProtocolReport verify_teleport(int d, const VerifyOptions &opts = {});

std::string report_to_text(const ProtocolReport &r);
std::string report_to_json(const ProtocolReport &r, int indent = 2);

}  // namespace cqp::protocols
