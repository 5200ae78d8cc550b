#include "cqp/equiv/bisim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include <cstdio>
#include <future>

#include <nlohmann/json.hpp>

#include "cqp/equiv/density.hpp"
#include "cqp/lang/pretty.hpp"
#include "cqp/lang/typecheck.hpp"

namespace cqp::equiv {

namespace {

using sem::Label;
using sem::Lts;

bool is_silent(const Label &l) {
    return l.kind == Label::Kind::Tau || l.kind == Label::Kind::Prob;
}

long long quantize(double p) {
    return std::llround(p / kProbTol);
}

// Environment densities after outputs, identified up to kRhoTol.
class RhoTable {
  public:
    int intern(const qlin::DensityMatrix &rho) {
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            const auto &r = reps_[i];
            if (r.rows() == rho.matrix().rows() && r.max_abs_diff(rho.matrix()) <= kRhoTol) {
                return static_cast<int>(i);
            }
        }
        reps_.push_back(rho.matrix());
        return static_cast<int>(reps_.size() - 1);
    }

  private:
    std::vector<qlin::Matrix> reps_;
};

struct Prepared {
    const Lts &lts;
    std::vector<std::string> key;  // label key, outputs extended by their density id
    std::vector<int> rho_id;       // -1 unless an output

    explicit Prepared(const Lts &l) : lts(l), key(l.edges.size()), rho_id(l.edges.size(), -1) {
        RhoTable table;
        std::map<std::size_t, int> by_target;
        for (std::size_t e = 0; e < l.edges.size(); ++e) {
            const auto &edge = l.edges[e];
            key[e] = edge.label.key();
            if (edge.label.kind == Label::Kind::Out) {
                auto it = by_target.find(edge.target);
                if (it == by_target.end()) {
                    it = by_target.emplace(edge.target, table.intern(env_density(l.nodes[edge.target].config))).first;
                }
                rho_id[e] = it->second;
                key[e] += "#rho" + std::to_string(it->second);
            }
        }
    }
};

// Nodes reachable from s by silent moves that stay inside s's block,
// with BFS parents (edge index) for path reconstruction.
struct InertReach {
    std::vector<std::size_t> nodes;
    std::map<std::size_t, std::size_t> parent_edge;
};

InertReach inert_reach(const Lts &lts, std::size_t s, const std::vector<int> &block) {
    InertReach r;
    r.nodes.push_back(s);
    std::set<std::size_t> seen{s};
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        for (auto e : lts.nodes[r.nodes[i]].out) {
            const auto &edge = lts.edges[e];
            if (is_silent(edge.label) && block[edge.target] == block[s] && seen.insert(edge.target).second) {
                r.nodes.push_back(edge.target);
                r.parent_edge[edge.target] = e;
            }
        }
    }
    return r;
}

using Signature = std::set<std::pair<std::string, int>>;
using Distribution = std::map<int, long long>;

Signature signature(const Prepared &prep, const InertReach &reach, std::size_t s, const std::vector<int> &block,
                    std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> *witness = nullptr) {
    Signature sig;
    for (auto n : reach.nodes) {
        for (auto e : prep.lts.nodes[n].out) {
            const auto &edge = prep.lts.edges[e];
            if (is_silent(edge.label) && block[edge.target] == block[s]) {
                continue;
            }
            std::pair<std::string, int> item{prep.key[e], block[edge.target]};
            if (sig.insert(item).second && witness) {
                (*witness)[item] = {n, e};
            }
        }
    }
    return sig;
}

Distribution distribution(const Lts &lts, std::size_t s, const std::vector<int> &block) {
    Distribution out;
    if (!lts.nodes[s].probabilistic) {
        out[block[s]] = quantize(1.0);
        return out;
    }
    std::map<int, double> mass;
    for (auto e : lts.nodes[s].out) {
        const auto &edge = lts.edges[e];
        if (edge.label.kind == Label::Kind::Prob) {
            mass[block[edge.target]] += edge.label.prob;
        }
    }
    for (const auto &[b, p] : mass) {
        out[b] = quantize(p);
    }
    return out;
}

std::vector<std::vector<int>> refine(const Prepared &prep) {
    const auto &lts = prep.lts;
    const std::size_t n = lts.nodes.size();
    std::vector<std::vector<int>> history{std::vector<int>(n, 0)};
    int count = n > 0 ? 1 : 0;
    while (true) {
        const auto &block = history.back();
        std::map<std::tuple<int, Signature, Distribution>, int> ids;
        std::vector<int> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            auto key = std::make_tuple(block[s], signature(prep, inert_reach(lts, s, block), s, block),
                                       distribution(lts, s, block));
            const auto it = ids.emplace(std::move(key), static_cast<int>(ids.size())).first;
            next[s] = it->second;
        }
        const int next_count = static_cast<int>(ids.size());
        if (next_count == count) {
            break;
        }
        count = next_count;
        history.push_back(std::move(next));
    }
    return history;
}

class Explainer {
  public:
    Explainer(const Prepared &prep, const std::vector<std::vector<int>> &history)
        : prep_(prep), lts_(prep.lts), history_(history) {}

    Counterexample explain(std::size_t t0, std::size_t u0) {
        Counterexample cx;
        cx.left.nodes = {t0};
        cx.right.nodes = {u0};
        descend(t0, u0, cx.left, cx.right, cx);
        return cx;
    }

  private:
    const Prepared &prep_;
    const Lts &lts_;
    const std::vector<std::vector<int>> &history_;

    int split_round(std::size_t x, std::size_t y) const {
        for (std::size_t r = 0; r < history_.size(); ++r) {
            if (history_[r][x] != history_[r][y]) {
                return static_cast<int>(r);
            }
        }
        return -1;
    }

    void append_inert(Trace &trace, const InertReach &reach, std::size_t to) const {
        std::vector<std::size_t> edges;
        for (auto at = to; reach.parent_edge.contains(at); at = lts_.edges[reach.parent_edge.at(at)].source) {
            edges.push_back(reach.parent_edge.at(at));
        }
        for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
            append_edge(trace, *it);
        }
    }

    void append_edge(Trace &trace, std::size_t e) const {
        trace.labels.push_back(lts_.edges[e].label.str());
        trace.nodes.push_back(lts_.edges[e].target);
    }

    static std::string condition_for(const Label &l) {
        switch (l.kind) {
        case Label::Kind::Tau:
            return "I";
        case Label::Kind::Out:
            return "II";
        case Label::Kind::In:
            return "III";
        case Label::Kind::Prob:
            return "IV";
        }
        return "?";
    }

    // x and y are in different final blocks; find why.
    void descend(std::size_t x, std::size_t y, Trace &left, Trace &right, Counterexample &cx) {
        const int r = split_round(x, y);
        const auto &block = history_.at(static_cast<std::size_t>(r - 1));
        const auto rx = inert_reach(lts_, x, block);
        const auto ry = inert_reach(lts_, y, block);
        std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> wx;
        std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> wy;
        const auto sx = signature(prep_, rx, x, block, &wx);
        const auto sy = signature(prep_, ry, y, block, &wy);

        if (sx != sy) {
            // Take a move one side has and the other cannot match.
            bool swapped = false;
            auto missing = std::find_if(sx.begin(), sx.end(), [&](const auto &item) { return !sy.contains(item); });
            if (missing == sx.end()) {
                swapped = true;
                missing = std::find_if(sy.begin(), sy.end(), [&](const auto &item) { return !sx.contains(item); });
            }
            const auto &[node, edge] = swapped ? wy.at(*missing) : wx.at(*missing);
            Trace &mover = swapped ? right : left;
            Trace &other = swapped ? left : right;
            const auto &mover_reach = swapped ? ry : rx;
            const auto &other_reach = swapped ? rx : ry;
            append_inert(mover, mover_reach, node);
            append_edge(mover, edge);
            const auto &label = lts_.edges[edge].label;
            const auto a = lts_.edges[edge].target;

            // Best response on the other side: same label, target split last.
            std::optional<std::size_t> same_key;
            std::optional<std::size_t> same_base;
            int best = -1;
            for (auto m : other_reach.nodes) {
                for (auto e : lts_.nodes[m].out) {
                    if (prep_.key[e] == prep_.key[edge]) {
                        const int sr = split_round(a, lts_.edges[e].target);
                        if (sr > best) {
                            best = sr;
                            same_key = e;
                        }
                    } else if (!same_base && label.kind == Label::Kind::Out &&
                               lts_.edges[e].label.key() == label.key()) {
                        same_base = e;
                    }
                }
            }
            const auto side = swapped ? "right" : "left";
            if (same_key) {
                append_inert(other, other_reach, lts_.edges[*same_key].source);
                append_edge(other, *same_key);
                cx.chain.push_back(condition_for(label));
                descend(swapped ? lts_.edges[*same_key].target : a, swapped ? a : lts_.edges[*same_key].target,
                        left, right, cx);
                return;
            }
            if (same_base) {
                append_inert(other, other_reach, lts_.edges[*same_base].source);
                append_edge(other, *same_base);
                const auto ra = env_density(lts_.nodes[a].config);
                const auto rb = env_density(lts_.nodes[lts_.edges[*same_base].target].config);
                cx.condition = "II(c)";
                cx.detail = "after " + label.str() + " the environment density matrices differ (max entry difference " +
                            std::to_string(ra.matrix().max_abs_diff(rb.matrix())) + ")";
                cx.chain.push_back(cx.condition);
                return;
            }
            cx.condition = condition_for(label);
            cx.detail = std::string("the ") + side + " side can do " + label.str() +
                        " and the other side has no matching move";
            cx.chain.push_back(cx.condition);
            return;
        }

        // Same moves, different collapse probabilities.
        auto dx = distribution(lts_, x, block);
        auto dy = distribution(lts_, y, block);
        std::set<int> blocks;
        for (const auto &[b, _] : dx) {
            blocks.insert(b);
        }
        for (const auto &[b, _] : dy) {
            blocks.insert(b);
        }
        int target_block = -1;
        bool swapped = false;
        for (int b : blocks) {
            const auto px = dx.contains(b) ? dx.at(b) : 0;
            const auto py = dy.contains(b) ? dy.at(b) : 0;
            if (px != py) {
                target_block = b;
                swapped = py > px;
                break;
            }
        }
        if (target_block < 0) {
            cx.condition = "?";
            cx.detail = "internal: nodes split without a visible difference";
            return;
        }
        const std::size_t hi = swapped ? y : x;
        const std::size_t lo = swapped ? x : y;
        Trace &hi_trace = swapped ? right : left;
        Trace &lo_trace = swapped ? left : right;

        std::size_t a = hi;
        for (auto e : lts_.nodes[hi].out) {
            if (lts_.edges[e].label.kind == Label::Kind::Prob && block[lts_.edges[e].target] == target_block) {
                append_edge(hi_trace, e);
                a = lts_.edges[e].target;
                break;
            }
        }
        std::size_t b = lo;
        std::optional<std::size_t> b_edge;
        int best = -1;
        for (auto e : lts_.nodes[lo].out) {
            const auto &edge = lts_.edges[e];
            if (edge.label.kind == Label::Kind::Prob && block[edge.target] != target_block) {
                const int sr = split_round(a, edge.target);
                if (sr > best) {
                    best = sr;
                    b_edge = e;
                }
            }
        }
        if (b_edge) {
            append_edge(lo_trace, *b_edge);
            b = lts_.edges[*b_edge].target;
        }
        const double px = (dx.contains(target_block) ? dx.at(target_block) : 0) * kProbTol;
        const double py = (dy.contains(target_block) ? dy.at(target_block) : 0) * kProbTol;
        cx.chain.push_back("IV");
        cx.condition = "IV";
        cx.detail = "collapse probabilities into one class differ: " + std::to_string(px) + " vs " + std::to_string(py);
        if (a == hi && b == lo) {
            return;
        }
        descend(swapped ? b : a, swapped ? a : b, left, right, cx);
    }
};

class Auditor {
  public:
    Auditor(const Lts &lts, const std::vector<int> &block) : lts_(lts), block_(block) {}

    std::vector<std::string> run(const std::vector<std::vector<std::size_t>> &classes) {
        std::vector<std::string> failures;
        for (const auto &cls : classes) {
            const bool all_pairs = cls.size() <= 200;
            for (std::size_t i = 0; i < cls.size(); ++i) {
                for (std::size_t j = 0; j < cls.size(); ++j) {
                    if (i == j || (!all_pairs && i != 0 && j != 0)) {
                        continue;
                    }
                    check_pair(cls[i], cls[j], failures);
                    if (failures.size() > 20) {
                        return failures;
                    }
                }
            }
        }
        return failures;
    }

  private:
    const Lts &lts_;
    const std::vector<int> &block_;
    std::map<std::size_t, std::vector<std::size_t>> weak_;
    std::map<std::size_t, qlin::DensityMatrix> rho_;

    // u => u': any number of silent moves, regardless of classes.
    const std::vector<std::size_t> &weak(std::size_t u) {
        auto it = weak_.find(u);
        if (it != weak_.end()) {
            return it->second;
        }
        std::vector<std::size_t> out{u};
        std::set<std::size_t> seen{u};
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (auto e : lts_.nodes[out[i]].out) {
                const auto &edge = lts_.edges[e];
                if (is_silent(edge.label) && seen.insert(edge.target).second) {
                    out.push_back(edge.target);
                }
            }
        }
        return weak_.emplace(u, std::move(out)).first->second;
    }

    const qlin::DensityMatrix &rho_env(std::size_t n) {
        auto it = rho_.find(n);
        if (it == rho_.end()) {
            it = rho_.emplace(n, rho_of(lts_.nodes[n].config).env).first;
        }
        return it->second;
    }

    std::map<int, double> mass(std::size_t s) {
        std::map<int, double> out;
        for (std::size_t v = 0; v < lts_.nodes.size(); ++v) {
            const double m = mu(lts_, s, v);
            if (m > 0.0) {
                out[block_[v]] += m;
            }
        }
        return out;
    }

    bool matched(std::size_t t, std::size_t t_next, const Label &label, std::size_t u, bool optional_tau) {
        if (optional_tau && block_[t_next] == block_[t]) {
            return true;
        }
        for (auto u1 : weak(u)) {
            if (block_[u1] != block_[t]) {
                continue;
            }
            for (auto e : lts_.nodes[u1].out) {
                const auto &edge = lts_.edges[e];
                if (edge.label.kind != label.kind || edge.label.key() != label.key() ||
                    block_[edge.target] != block_[t_next]) {
                    continue;
                }
                if (label.kind == Label::Kind::Out &&
                    rho_env(t_next).matrix().max_abs_diff(rho_env(edge.target).matrix()) > kRhoTol) {
                    continue;
                }
                return true;
            }
        }
        return false;
    }

    void check_pair(std::size_t t, std::size_t u, std::vector<std::string> &failures) {
        const auto pair_text = "(" + std::to_string(t) + "," + std::to_string(u) + ")";
        for (auto e : lts_.nodes[t].out) {
            const auto &edge = lts_.edges[e];
            switch (edge.label.kind) {
            case Label::Kind::Tau:
                if (!lts_.nodes[t].probabilistic && !matched(t, edge.target, edge.label, u, true)) {
                    failures.push_back("I fails for " + pair_text);
                }
                break;
            case Label::Kind::Out:
                if (!matched(t, edge.target, edge.label, u, false)) {
                    failures.push_back("II fails for " + pair_text + " on " + edge.label.str());
                }
                break;
            case Label::Kind::In:
                if (!matched(t, edge.target, edge.label, u, false)) {
                    failures.push_back("III fails for " + pair_text + " on " + edge.label.str());
                }
                break;
            case Label::Kind::Prob:
                break;
            }
        }
        if (lts_.nodes[t].probabilistic) {
            const auto mt = mass(t);
            const auto mu_ = mass(u);
            std::set<int> blocks;
            for (const auto &[b, _] : mt) {
                blocks.insert(b);
            }
            for (const auto &[b, _] : mu_) {
                blocks.insert(b);
            }
            for (int b : blocks) {
                const double a = mt.contains(b) ? mt.at(b) : 0.0;
                const double c = mu_.contains(b) ? mu_.at(b) : 0.0;
                if (std::abs(a - c) > 10 * kProbTol) {
                    failures.push_back("IV fails for " + pair_text);
                    break;
                }
            }
        }
    }
};

}  // namespace

PbbResult check_pbb(const Lts &lts, std::size_t t0, std::size_t u0) {
    if (t0 >= lts.nodes.size() || u0 >= lts.nodes.size()) {
        throw std::out_of_range("check_pbb: node index out of range");
    }
    const Prepared prep(lts);
    const auto history = refine(prep);
    const auto &block = history.back();

    PbbResult result;
    result.rounds = static_cast<int>(history.size());
    result.block = block;
    const int count = block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1;
    result.classes.resize(static_cast<std::size_t>(count));
    for (std::size_t s = 0; s < block.size(); ++s) {
        result.classes[static_cast<std::size_t>(block[s])].push_back(s);
    }
    result.bisimilar = block[t0] == block[u0];
    if (!result.bisimilar) {
        result.counterexample = Explainer(prep, history).explain(t0, u0);
    }
    result.audit_failures = Auditor(lts, block).run(result.classes);
    result.audit_passed = result.audit_failures.empty();
    return result;
}

namespace {

std::string state_text(const qlin::PureState &s) {
    std::string out = "[";
    char buf[64];
    for (std::size_t i = 0; i < s.amps().size(); ++i) {
        const auto a = s.amps()[i];
        std::snprintf(buf, sizeof buf, "%s%.6g%+.6gi", i ? ", " : "", a.real() == 0.0 ? 0.0 : a.real(),
                      a.imag() == 0.0 ? 0.0 : a.imag());
        out += buf;
    }
    return out + "]";
}

std::string interface_text(const std::map<std::string, lang::TypeExpr> &chans) {
    std::string out = "{";
    bool first = true;
    for (const auto &[name, type] : chans) {
        out += (first ? "" : ", ") + name + ":" + lang::pretty(type);
        first = false;
    }
    return out + "}";
}

MemberVerdict check_member(const lang::Program &p, const lang::Program &q, const sem::BuildOptions &build,
                           std::size_t index) {
    const auto left = sem::build_lts(p, build);
    const auto right = sem::build_lts(q, build);
    const auto [joined, offset] = disjoint_union(left, right);
    auto pbb = check_pbb(joined, left.initial, offset + right.initial);

    MemberVerdict m;
    m.index = index;
    m.state = state_text(build.input_states.front());
    m.bisimilar = pbb.bisimilar;
    m.nodes_left = left.size();
    m.nodes_right = right.size();
    m.classes = std::move(pbb.classes);
    m.counterexample = std::move(pbb.counterexample);
    m.audit_passed = pbb.audit_passed;
    return m;
}

nlohmann::json trace_json(const Trace &t) {
    return {{"nodes", t.nodes}, {"labels", t.labels}};
}

}  // namespace

EquivalenceVerdict check_full_bisim(const lang::Program &p, const lang::Program &q, const FullOptions &opts) {
    const auto tp = lang::typecheck(p);
    if (!tp.ok) {
        throw lang::TypeError(*tp.error);
    }
    const auto tq = lang::typecheck(q);
    if (!tq.ok) {
        throw lang::TypeError(*tq.error);
    }
    if (p.dim != q.dim) {
        throw InterfaceMismatch("dimensions differ: " + std::to_string(p.dim) + " vs " + std::to_string(q.dim));
    }
    if (tp.free_channels != tq.free_channels) {
        throw InterfaceMismatch("free channels differ: " + interface_text(tp.free_channels) + " vs " +
                                interface_text(tq.free_channels));
    }

    EquivalenceVerdict v;
    v.d = p.dim;
    v.value_domain = opts.value_domain;
    if (v.value_domain.empty()) {
        for (int k = 0; k < v.d; ++k) {
            v.value_domain.push_back(k);
        }
    }
    v.family = opts.family_name;
    const auto family = opts.input_states.empty() ? sem::default_family(v.d) : opts.input_states;

    auto build_for = [&](std::size_t i) {
        sem::BuildOptions b;
        b.value_domain = v.value_domain;
        b.input_states = {family[i]};
        b.max_nodes = opts.max_nodes;
        return b;
    };
    if (opts.parallel && family.size() > 1) {
        std::vector<std::future<MemberVerdict>> jobs;
        for (std::size_t i = 0; i < family.size(); ++i) {
            jobs.push_back(std::async(std::launch::async, [&, i] { return check_member(p, q, build_for(i), i); }));
        }
        for (auto &j : jobs) {
            v.members.push_back(j.get());
        }
    } else {
        for (std::size_t i = 0; i < family.size(); ++i) {
            v.members.push_back(check_member(p, q, build_for(i), i));
        }
    }

    v.bisimilar = true;
    for (const auto &m : v.members) {
        v.audit_passed = v.audit_passed && m.audit_passed;
        if (!m.bisimilar && v.bisimilar) {
            v.bisimilar = false;
            v.failing_member = m.index;
            v.counterexample = m.counterexample;
        }
    }
    return v;
}

std::string verdict_to_json(const EquivalenceVerdict &v, int indent) {
    nlohmann::json j;
    j["bisimilar"] = v.bisimilar;
    j["dimension"] = v.d;
    j["value_domain"] = v.value_domain;
    j["family"] = v.family;
    j["audit_passed"] = v.audit_passed;
    j["members"] = nlohmann::json::array();
    for (const auto &m : v.members) {
        j["members"].push_back({{"index", m.index},
                                {"state", m.state},
                                {"bisimilar", m.bisimilar},
                                {"nodes_left", m.nodes_left},
                                {"nodes_right", m.nodes_right},
                                {"class_count", m.classes.size()},
                                {"classes", m.classes},
                                {"audit_passed", m.audit_passed}});
    }
    if (v.failing_member) {
        j["failing_member"] = *v.failing_member;
    } else {
        j["failing_member"] = nullptr;
    }
    if (v.counterexample) {
        const auto &cx = *v.counterexample;
        j["counterexample"] = {{"condition", cx.condition},
                               {"detail", cx.detail},
                               {"chain", cx.chain},
                               {"left", trace_json(cx.left)},
                               {"right", trace_json(cx.right)}};
    } else {
        j["counterexample"] = nullptr;
    }
    return j.dump(indent);
}

std::string verdict_to_text(const EquivalenceVerdict &v) {
    std::string out = v.bisimilar ? "bisimilar" : "NOT bisimilar";
    out += " (d=" + std::to_string(v.d) + ", family " + v.family + ", " + std::to_string(v.members.size()) +
           " input states)\n";
    for (const auto &m : v.members) {
        out += "  state " + std::to_string(m.index) + " " + m.state + ": " + (m.bisimilar ? "ok" : "differs") + ", " +
               std::to_string(m.nodes_left) + "+" + std::to_string(m.nodes_right) + " nodes, " +
               std::to_string(m.classes.size()) + " classes\n";
    }
    if (v.counterexample) {
        const auto &cx = *v.counterexample;
        out += "counterexample (state " + std::to_string(*v.failing_member) + "), condition " + cx.condition + ": " +
               cx.detail + "\n";
        auto show = [&](const char *side, const Trace &t) {
            out += std::string("  ") + side + ":";
            for (const auto &l : t.labels) {
                out += " --" + l + "->";
            }
            out += "\n";
        };
        show("left ", cx.left);
        show("right", cx.right);
    }
    if (!v.audit_passed) {
        out += "warning: audit of the final partition found violations\n";
    }
    return out;
}

}  // namespace cqp::equiv
