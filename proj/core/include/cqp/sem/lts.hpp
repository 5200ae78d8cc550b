#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqp/lang/ast.hpp"
#include "cqp/sem/step.hpp"

namespace cqp::sem {

struct LtsEdge {
    std::size_t source = 0;
    Label label;
    std::size_t target = 0;
};

struct LtsNode {
    Configuration config;
    std::string key;
    bool probabilistic = false;
    std::vector<std::size_t> out;  // indices into Lts::edges
};

/// Transition system over canonical configurations. Node 0 is the initial
/// node; nodes are numbered in breadth-first discovery order.
struct Lts {
    int d = 2;
    std::vector<LtsNode> nodes;
    std::vector<LtsEdge> edges;
    std::size_t initial = 0;

    std::size_t size() const { return nodes.size(); }
};

struct BuildOptions {
    std::vector<long long> value_domain;        // empty means 0..d-1
    std::vector<qlin::PureState> input_states;  // empty means default_family(d)
    std::size_t max_nodes = 200000;
};

class NodeBudgetExceeded : public std::runtime_error {
  public:
    explicit NodeBudgetExceeded(std::size_t budget)
        : std::runtime_error("state space exceeds the node budget of " + std::to_string(budget)),
          budget_(budget) {}
    std::size_t budget() const { return budget_; }

  private:
    std::size_t budget_;
};

Lts build_lts(const lang::Program &prog, const BuildOptions &opts = {});
Lts build_lts(const Configuration &initial, const BuildOptions &opts = {});

/// Single-qudit input states: the d basis states, the d states H|j>, and
/// `random_count` Haar-random states drawn from `seed`.
std::vector<qlin::PureState> basis_family(int d);
std::vector<qlin::PureState> hadamard_family(int d);
std::vector<qlin::PureState> random_family(int d, int count, unsigned long long seed);
std::vector<qlin::PureState> default_family(int d, unsigned long long seed = 2024);

std::string lts_to_json(const Lts &lts, int indent = 2);
std::string lts_to_dot(const Lts &lts);

}  // namespace cqp::sem
