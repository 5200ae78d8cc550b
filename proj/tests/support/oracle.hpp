#pragma once

// Reference computations for tests. Deliberately naive: explicit index
// loops over dense matrices, written from the defining formulas and
// sharing no code with the library.

#include <complex>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Vec = std::vector<C>;
using Mat = std::vector<std::vector<C>>;

Mat zeros(std::size_t n);
Mat eye(std::size_t n);
Mat mul(const Mat &a, const Mat &b);
Mat adjoint(const Mat &a);
Mat kron(const Mat &a, const Mat &b);
Vec mat_vec(const Mat &m, const Vec &v);
double max_diff(const Mat &a, const Mat &b);
double max_diff(const Vec &a, const Vec &b);
C dot(const Vec &a, const Vec &b);  // <a|b>
Mat outer(const Vec &a);            // |a><a|

// exp(2 pi i k / d), evaluated directly from the angle.
C phase(int d, long long k);

// Gate matrices straight from their action on basis states.
Mat hadamard(int d);  // H|j> = d^-1/2 sum_m w^{-jm} |m>
Mat shift(int d, long long j);  // X^j|m> = |m+j>
Mat clock(int d, long long k);  // Z^k|m> = w^{km}|m>
Mat right_shift(int d);  // |m,n> -> |m,n+m>
Mat left_shift(int d);   // |m,n> -> |m,n-m>

Vec bell(int d, int n, int m);  // d^-1/2 sum_j w^{-jn} |j>|j+m>

// Digits of basis index i for n qudits, most significant first.
std::vector<int> digits(std::size_t i, int d, int n);
std::size_t index_of(const std::vector<int> &digits, int d);

// Applies an r-qudit gate to the qudits at `pos` (in order) of an
// n-qudit register.
Vec apply_on(const Vec &v, int d, int n, const Mat &gate, const std::vector<int> &pos);

// Weight of each outcome when measuring the qudits at `pos`: tr(P_m rho P_m)
// with P_m the projector onto basis states whose measured digits spell m.
std::map<std::size_t, double> projector_weights(const Vec &v, int d, int n, const std::vector<int> &pos);

// Reduced density matrix of rho (n qudits) on the qudits at `keep`, in
// that order.
Mat partial_trace(const Mat &rho, int d, int n, const std::vector<int> &keep);

Vec random_state(std::mt19937_64 &rng, std::size_t dim);

// Teleportation circuit on registers [x, z, y]: x holds the input, z and y
// the shared pair. Returns, per outcome (M1 from z, M2 from x), the
// probability and Bob's corrected qudit.
struct TeleportBranch {
    int m1 = 0;
    int m2 = 0;
    double weight = 0.0;
    Vec bob;
};
std::vector<TeleportBranch> teleport(int d, const Vec &input);

// Textbook branching bisimulation on a plain LTS, by iterated removal of
// violating pairs. Labels equal to "tau" are silent.
struct PlainLts {
    std::size_t size = 0;
    std::vector<std::tuple<std::size_t, std::string, std::size_t>> edges;
};
std::set<std::pair<std::size_t, std::size_t>> branching_bisimilarity(const PlainLts &lts);

}  // namespace oracle
