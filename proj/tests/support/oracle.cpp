#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

Mat zeros(std::size_t n) {
    return Mat(n, std::vector<C>(n, 0.0));
}

Mat eye(std::size_t n) {
    auto m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = 1.0;
    }
    return m;
}

Mat mul(const Mat &a, const Mat &b) {
    const std::size_t n = a.size(), k = b.size(), m = b[0].size();
    Mat out(n, std::vector<C>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < k; ++l) {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    return out;
}

Mat adjoint(const Mat &a) {
    Mat out(a[0].size(), std::vector<C>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[0].size(); ++j) {
            out[j][i] = std::conj(a[i][j]);
        }
    }
    return out;
}

Mat kron(const Mat &a, const Mat &b) {
    const std::size_t n = a.size(), m = b.size();
    auto out = zeros(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
    return out;
}

Vec mat_vec(const Mat &m, const Vec &v) {
    Vec out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += m[i][j] * v[j];
        }
    }
    return out;
}

double max_diff(const Mat &a, const Mat &b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
        }
    }
    return worst;
}

double max_diff(const Vec &a, const Vec &b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

C dot(const Vec &a, const Vec &b) {
    C acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

Mat outer(const Vec &a) {
    auto m = zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            m[i][j] = a[i] * std::conj(a[j]);
        }
    }
    return m;
}

C phase(int d, long long k) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / d);
}

static std::size_t wrap(long long v, int d) {
    return static_cast<std::size_t>(((v % d) + d) % d);
}

Mat hadamard(int d) {
    auto m = zeros(d);
    for (int j = 0; j < d; ++j) {
        for (int r = 0; r < d; ++r) {
            m[r][j] = phase(d, -static_cast<long long>(j) * r) / std::sqrt(static_cast<double>(d));
        }
    }
    return m;
}

Mat shift(int d, long long j) {
    auto m = zeros(d);
    for (int c = 0; c < d; ++c) {
        m[wrap(c + j, d)][c] = 1.0;
    }
    return m;
}

Mat clock(int d, long long k) {
    auto m = zeros(d);
    for (int c = 0; c < d; ++c) {
        m[c][c] = phase(d, k * c);
    }
    return m;
}

Mat right_shift(int d) {
    auto m = zeros(static_cast<std::size_t>(d * d));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            m[a * d + wrap(b + a, d)][a * d + b] = 1.0;
        }
    }
    return m;
}

Mat left_shift(int d) {
    auto m = zeros(static_cast<std::size_t>(d * d));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            m[a * d + wrap(b - a, d)][a * d + b] = 1.0;
        }
    }
    return m;
}

Vec bell(int d, int n, int m) {
    Vec v(static_cast<std::size_t>(d * d), 0.0);
    for (int j = 0; j < d; ++j) {
        v[j * d + wrap(j + m, d)] = phase(d, -static_cast<long long>(j) * n) / std::sqrt(static_cast<double>(d));
    }
    return v;
}

std::vector<int> digits(std::size_t i, int d, int n) {
    std::vector<int> out(n);
    for (int k = n - 1; k >= 0; --k) {
        out[k] = static_cast<int>(i % d);
        i /= d;
    }
    return out;
}

std::size_t index_of(const std::vector<int> &digits, int d) {
    std::size_t i = 0;
    for (int x : digits) {
        i = i * d + x;
    }
    return i;
}

Vec apply_on(const Vec &v, int d, int n, const Mat &gate, const std::vector<int> &pos) {
    Vec out(v.size(), 0.0);
    for (std::size_t col = 0; col < v.size(); ++col) {
        if (v[col] == C(0.0)) {
            continue;
        }
        auto dig = digits(col, d, n);
        std::vector<int> sub;
        for (int p : pos) {
            sub.push_back(dig[p]);
        }
        const auto in = index_of(sub, d);
        for (std::size_t row = 0; row < gate.size(); ++row) {
            if (gate[row][in] == C(0.0)) {
                continue;
            }
            auto rd = digits(row, d, static_cast<int>(pos.size()));
            auto target = dig;
            for (std::size_t k = 0; k < pos.size(); ++k) {
                target[pos[k]] = rd[k];
            }
            out[index_of(target, d)] += gate[row][in] * v[col];
        }
    }
    return out;
}

std::map<std::size_t, double> projector_weights(const Vec &v, int d, int n, const std::vector<int> &pos) {
    const auto rho = outer(v);
    std::size_t outcomes = 1;
    for (std::size_t k = 0; k < pos.size(); ++k) {
        outcomes *= d;
    }
    std::map<std::size_t, double> out;
    for (std::size_t m = 0; m < outcomes; ++m) {
        const auto want = digits(m, d, static_cast<int>(pos.size()));
        // P_m is diagonal, so tr(P rho P) only touches diagonal entries it keeps.
        C tr = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto dig = digits(i, d, n);
            bool keep = true;
            for (std::size_t k = 0; k < pos.size(); ++k) {
                keep = keep && dig[pos[k]] == want[k];
            }
            if (keep) {
                tr += rho[i][i];
            }
        }
        out[m] = tr.real();
    }
    return out;
}

Mat partial_trace(const Mat &rho, int d, int n, const std::vector<int> &keep) {
    std::size_t kdim = 1;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        kdim *= d;
    }
    auto out = zeros(kdim);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto di = digits(i, d, n);
        for (std::size_t j = 0; j < rho.size(); ++j) {
            const auto dj = digits(j, d, n);
            bool same_rest = true;
            for (int q = 0; q < n && same_rest; ++q) {
                const bool kept = std::find(keep.begin(), keep.end(), q) != keep.end();
                same_rest = kept || di[q] == dj[q];
            }
            if (!same_rest) {
                continue;
            }
            std::vector<int> ri, rj;
            for (int q : keep) {
                ri.push_back(di[q]);
                rj.push_back(dj[q]);
            }
            out[index_of(ri, d)][index_of(rj, d)] += rho[i][j];
        }
    }
    return out;
}

Vec random_state(std::mt19937_64 &rng, std::size_t dim) {
    std::normal_distribution<double> g;
    Vec v(dim);
    double norm = 0.0;
    for (auto &a : v) {
        a = C(g(rng), g(rng));
        norm += std::norm(a);
    }
    for (auto &a : v) {
        a /= std::sqrt(norm);
    }
    return v;
}

std::vector<TeleportBranch> teleport(int d, const Vec &input) {
    const int n = 3;  // x, z, y
    Vec s(static_cast<std::size_t>(d * d * d), 0.0);
    for (int a = 0; a < d; ++a) {
        s[index_of({a, 0, 0}, d)] = input[a];
    }
    s = apply_on(s, d, n, hadamard(d), {1});
    s = apply_on(s, d, n, right_shift(d), {1, 2});
    s = apply_on(s, d, n, left_shift(d), {0, 1});
    s = apply_on(s, d, n, hadamard(d), {0});

    std::vector<TeleportBranch> out;
    for (int m1 = 0; m1 < d; ++m1) {
        for (int m2 = 0; m2 < d; ++m2) {
            Vec bob(d, 0.0);
            double w = 0.0;
            for (int y = 0; y < d; ++y) {
                bob[y] = s[index_of({m2, m1, y}, d)];
                w += std::norm(bob[y]);
            }
            for (auto &a : bob) {
                a /= std::sqrt(w);
            }
            bob = mat_vec(shift(d, -m1), bob);
            bob = mat_vec(clock(d, m2), bob);
            out.push_back({m1, m2, w, bob});
        }
    }
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> branching_bisimilarity(const PlainLts &lts) {
    const std::size_t n = lts.size;
    std::vector<std::vector<std::pair<std::string, std::size_t>>> out(n);
    for (const auto &[s, a, t] : lts.edges) {
        out[s].push_back({a, t});
    }
    // tau-closure
    std::vector<std::set<std::size_t>> weak(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> todo{s};
        weak[s].insert(s);
        while (!todo.empty()) {
            const auto x = todo.back();
            todo.pop_back();
            for (const auto &[a, y] : out[x]) {
                if (a == "tau" && weak[s].insert(y).second) {
                    todo.push_back(y);
                }
            }
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            rel.insert({s, t});
        }
    }
    auto matched = [&](std::size_t s, const std::string &a, std::size_t s1, std::size_t t) {
        if (a == "tau" && rel.contains({s1, t})) {
            return true;
        }
        for (auto t1 : weak[t]) {
            if (!rel.contains({s, t1})) {
                continue;
            }
            for (const auto &[b, t2] : out[t1]) {
                if (b == a && rel.contains({s1, t2})) {
                    return true;
                }
            }
        }
        return false;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = rel.begin(); it != rel.end();) {
            const auto [s, t] = *it;
            bool ok = true;
            for (const auto &[a, s1] : out[s]) {
                ok = ok && matched(s, a, s1, t);
            }
            for (const auto &[a, t1] : out[t]) {
                ok = ok && matched(t, a, t1, s);
            }
            if (ok) {
                ++it;
            } else {
                it = rel.erase(it);
                rel.erase({t, s});
                changed = true;
                it = rel.begin();
            }
        }
    }
    return rel;
}

}  // namespace oracle
