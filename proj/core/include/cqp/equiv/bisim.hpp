#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqp/lang/ast.hpp"
#include "cqp/sem/lts.hpp"

namespace cqp::equiv {

inline constexpr double kRhoTol = 1e-8;
inline constexpr double kProbTol = 1e-9;

/// A path in the LTS: nodes[0] --labels[0]--> nodes[1] ...
struct Trace {
    std::vector<std::size_t> nodes;
    std::vector<std::string> labels;
};

/// Why two nodes are not related. `condition` is one of "I" (silent
/// step), "II" (output values), "II(c)" (environment density after an
/// output), "III" (input) or "IV" (collapse probabilities); it names the
/// innermost failure found by following the distinguishing moves.
struct Counterexample {
    std::string condition;
    std::string detail;
    Trace left;   // from the first initial node
    Trace right;  // from the second initial node
    std::vector<std::string> chain;  // conditions passed through on the way
};

struct PbbResult {
    bool bisimilar = false;
    std::vector<std::vector<std::size_t>> classes;
    std::vector<int> block;  // class index per node
    std::optional<Counterexample> counterexample;
    int rounds = 0;
    bool audit_passed = true;
    std::vector<std::string> audit_failures;
};

/// Coarsest probabilistic branching bisimulation on `lts`; decides whether
/// t0 and u0 are related. Silent moves in weak transitions include
/// collapse steps. The final partition is re-checked condition by
/// condition against the definition, with environment densities
/// recomputed from the configurations.
PbbResult check_pbb(const sem::Lts &lts, std::size_t t0, std::size_t u0);

struct MemberVerdict {
    std::size_t index = 0;
    std::string state;  // amplitudes of the input state
    bool bisimilar = false;
    std::size_t nodes_left = 0;
    std::size_t nodes_right = 0;
    std::vector<std::vector<std::size_t>> classes;
    std::optional<Counterexample> counterexample;
    bool audit_passed = true;
};

struct EquivalenceVerdict {
    bool bisimilar = false;
    int d = 2;
    std::vector<long long> value_domain;
    std::string family;  // description of the input family
    std::vector<MemberVerdict> members;
    std::optional<Counterexample> counterexample;  // from the first failing member
    std::optional<std::size_t> failing_member;
    bool audit_passed = true;
};

class InterfaceMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FullOptions {
    std::vector<long long> value_domain;        // empty means 0..d-1
    std::vector<qlin::PureState> input_states;  // empty means sem::default_family(d)
    std::string family_name = "default";
    std::size_t max_nodes = 200000;
    bool parallel = true;
};

/// Runs check_pbb on the two programs once per input state, with that
/// state as the only qudit the environment can send, and conjoins the
/// results. Both programs must typecheck; their free channels and
/// dimensions must agree.
EquivalenceVerdict check_full_bisim(const lang::Program &p, const lang::Program &q, const FullOptions &opts = {});

std::string verdict_to_json(const EquivalenceVerdict &v, int indent = 2);
std::string verdict_to_text(const EquivalenceVerdict &v);

}  // namespace cqp::equiv
