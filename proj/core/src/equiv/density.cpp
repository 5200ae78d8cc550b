#include "cqp/equiv/density.hpp"

namespace cqp::equiv {

qlin::DensityMatrix reduced_density(const sem::Configuration &c, const std::vector<std::string> &keep) {
    if (c.components.empty()) {
        throw sem::SemanticsError("configuration without components");
    }
    std::optional<qlin::DensityMatrix> acc;
    for (const auto &comp : c.components) {
        auto part = qlin::partial_trace(comp.state, keep);
        acc = acc ? acc->weighted_sum(part, 1.0, comp.weight) : part.weighted_sum(part, comp.weight, 0.0);
    }
    return *acc;
}

qlin::DensityMatrix env_density(const sem::Configuration &c) {
    return reduced_density(c, c.env);
}

ConfigDensity rho_of(const sem::Configuration &c, const std::optional<std::vector<std::string>> &subset) {
    ConfigDensity out{reduced_density(c, c.qudits()), env_density(c), std::nullopt};
    if (subset) {
        out.subset = reduced_density(c, *subset);
    }
    return out;
}

double mu(const sem::Lts &lts, std::size_t t, std::size_t u) {
    const auto &node = lts.nodes.at(t);
    if (!node.probabilistic) {
        return t == u ? 1.0 : 0.0;
    }
    double p = 0.0;
    for (auto e : node.out) {
        const auto &edge = lts.edges[e];
        if (edge.label.kind == sem::Label::Kind::Prob && edge.target == u) {
            p += edge.label.prob;
        }
    }
    return p;
}

std::pair<sem::Lts, std::size_t> disjoint_union(const sem::Lts &a, const sem::Lts &b) {
    if (a.d != b.d) {
        throw std::invalid_argument("cannot combine transition systems of different dimension");
    }
    sem::Lts out = a;
    const std::size_t node_offset = a.nodes.size();
    const std::size_t edge_offset = a.edges.size();
    for (auto node : b.nodes) {
        for (auto &e : node.out) {
            e += edge_offset;
        }
        out.nodes.push_back(std::move(node));
    }
    for (auto edge : b.edges) {
        edge.source += node_offset;
        edge.target += node_offset;
        out.edges.push_back(std::move(edge));
    }
    return {std::move(out), node_offset};
}

}  // namespace cqp::equiv
