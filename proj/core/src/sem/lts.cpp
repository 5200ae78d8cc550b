#include "cqp/sem/lts.hpp"

#include <deque>
#include <numeric>
#include <random>
#include <unordered_map>

namespace cqp::sem {

namespace {

InputSpace input_space(int d, const BuildOptions &opts) {
    InputSpace in;
    in.values = opts.value_domain;
    if (in.values.empty()) {
        in.values.resize(static_cast<std::size_t>(d));
        std::iota(in.values.begin(), in.values.end(), 0LL);
    }
    in.qudit_states = opts.input_states.empty() ? default_family(d) : opts.input_states;
    for (const auto &s : in.qudit_states) {
        if (s.num_qudits() != 1 || s.dim() != d) {
            throw SemanticsError("input states must be single qudits of dimension " + std::to_string(d));
        }
    }
    return in;
}

}  // namespace

Lts build_lts(const lang::Program &prog, const BuildOptions &opts) {
    return build_lts(initial_configuration(prog), opts);
}

Lts build_lts(const Configuration &initial, const BuildOptions &opts) {
    const auto inputs = input_space(initial.d, opts);
    Lts lts;
    lts.d = initial.d;
    std::unordered_map<std::string, std::size_t> index;

    auto intern = [&](Configuration c) {
        auto key = canonical_key(c);
        const auto it = index.find(key);
        if (it != index.end()) {
            return it->second;
        }
        if (lts.nodes.size() >= opts.max_nodes) {
            throw NodeBudgetExceeded(opts.max_nodes);
        }
        const auto id = lts.nodes.size();
        index.emplace(key, id);
        lts.nodes.push_back(LtsNode{std::move(c), std::move(key), false, {}});
        return id;
    };

    lts.initial = intern(initial);
    for (std::size_t n = 0; n < lts.nodes.size(); ++n) {
        auto result = step(lts.nodes[n].config, inputs);
        lts.nodes[n].probabilistic = result.probabilistic;
        for (auto &t : result.transitions) {
            const auto target = intern(std::move(t.target));
            // Collapses that land on the same node add up; other duplicates
            // are dropped.
            bool merged = false;
            for (auto e : lts.nodes[n].out) {
                auto &edge = lts.edges[e];
                if (edge.target != target || edge.label.kind != t.label.kind) {
                    continue;
                }
                if (t.label.kind == Label::Kind::Prob) {
                    edge.label.prob += t.label.prob;
                    merged = true;
                } else if (edge.label.key() == t.label.key() && edge.label.items == t.label.items) {
                    merged = true;
                }
                if (merged) {
                    break;
                }
            }
            if (!merged) {
                lts.nodes[n].out.push_back(lts.edges.size());
                lts.edges.push_back(LtsEdge{n, std::move(t.label), target});
            }
        }
    }
    return lts;
}

std::vector<qlin::PureState> basis_family(int d) {
    std::vector<qlin::PureState> out;
    for (int j = 0; j < d; ++j) {
        out.push_back(qlin::PureState::basis(d, {"in"}, std::span<const int>(&j, 1)));
    }
    return out;
}

std::vector<qlin::PureState> hadamard_family(int d) {
    std::vector<qlin::PureState> out;
    const auto h = qlin::hadamard(d);
    for (const auto &b : basis_family(d)) {
        out.push_back(qlin::apply_gate(b, h, {"in"}));
    }
    return out;
}

std::vector<qlin::PureState> random_family(int d, int count, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<qlin::PureState> out;
    for (int k = 0; k < count; ++k) {
        std::vector<qlin::Complex> amps(static_cast<std::size_t>(d));
        double norm = 0.0;
        for (auto &a : amps) {
            a = {gauss(rng), gauss(rng)};
            norm += std::norm(a);
        }
        for (auto &a : amps) {
            a /= std::sqrt(norm);
        }
        out.emplace_back(d, std::vector<std::string>{"in"}, std::move(amps));
    }
    return out;
}

std::vector<qlin::PureState> default_family(int d, unsigned long long seed) {
    auto out = basis_family(d);
    for (auto &s : hadamard_family(d)) {
        out.push_back(std::move(s));
    }
    for (auto &s : random_family(d, 1, seed)) {
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cqp::sem
