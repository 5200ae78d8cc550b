#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqp/qlin.hpp"
#include "cqp/sem/lts.hpp"

namespace cqp::equiv {

/// Density matrices of a configuration: the whole register, the qudits
/// the process no longer owns, and optionally a chosen subset. For mixed
/// configurations each is the weighted sum over components.
struct ConfigDensity {
    qlin::DensityMatrix full;
    qlin::DensityMatrix env;
    std::optional<qlin::DensityMatrix> subset;
};

/// Reduced density matrix of `keep` (in that order), summed over components.
qlin::DensityMatrix reduced_density(const sem::Configuration &c, const std::vector<std::string> &keep);

ConfigDensity rho_of(const sem::Configuration &c, const std::optional<std::vector<std::string>> &subset = {});

/// Environment part only; cheaper than rho_of when that is all one needs.
qlin::DensityMatrix env_density(const sem::Configuration &c);

/// Probability of the one-step move t -> u: the collapse weight when t is
/// probabilistic, 1 when t == u and t is not, 0 otherwise.
double mu(const sem::Lts &lts, std::size_t t, std::size_t u);

/// Nodes of `b` are renumbered after those of `a`; returns the union and
/// the offset of b's nodes.
std::pair<sem::Lts, std::size_t> disjoint_union(const sem::Lts &a, const sem::Lts &b);

}  // namespace cqp::equiv
