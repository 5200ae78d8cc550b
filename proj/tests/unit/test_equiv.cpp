#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "classical.hpp"
#include "cqp/equiv/bisim.hpp"
#include "cqp/equiv/density.hpp"
#include "cqp/lang/parser.hpp"
#include "cqp/lang/typecheck.hpp"
#include "oracle.hpp"

using namespace cqp;
using namespace cqp::equiv;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lang::Program corpus(const std::string &name, int d) {
    return lang::parse_program(slurp(std::filesystem::path(CQP_CORPUS_DIR) / "protocols" / name), d);
}

sem::Configuration mixture(int d, std::vector<std::pair<double, qlin::PureState>> parts, std::vector<std::string> owned) {
    sem::Configuration c;
    c.d = d;
    for (auto &[w, s] : parts) {
        c.components.push_back({w, s, {}});
    }
    const auto &all = c.qudits();
    for (const auto &q : all) {
        if (std::find(owned.begin(), owned.end(), q) == owned.end()) {
            c.env.push_back(q);
        }
    }
    c.owned = std::move(owned);
    c.term = lang::nil();
    return c;
}

qlin::PureState ket(int d, const std::string &name, int digit) {
    return qlin::PureState::basis(d, {name}, std::span<const int>(&digit, 1));
}

PbbResult compare(const std::string &p, const std::string &q, int d = 2) {
    sem::BuildOptions o;
    o.input_states = {sem::basis_family(d)[0]};
    const auto a = sem::build_lts(lang::parse_program("main = " + p, d), o);
    const auto b = sem::build_lts(lang::parse_program("main = " + q, d), o);
    const auto [u, off] = disjoint_union(a, b);
    return check_pbb(u, a.initial, off + b.initial);
}

// Every step of a trace must be an edge of the LTS with that label.
void expect_replayable(const sem::Lts &lts, const Trace &t) {
    ASSERT_EQ(t.nodes.size(), t.labels.size() + 1);
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        bool found = false;
        for (auto e : lts.nodes.at(t.nodes[i]).out) {
            found = found || (lts.edges[e].target == t.nodes[i + 1] && lts.edges[e].label.str() == t.labels[i]);
        }
        EXPECT_TRUE(found) << "step " << i << ": " << t.labels[i];
    }
}

}  // namespace

TEST(Density, PureKetbra) {
    const auto s = qlin::bell_state(2, 0, 0, "a", "b");
    const auto c = mixture(2, {{1.0, s}}, {});
    const auto r = rho_of(c);
    EXPECT_TRUE(r.full.matrix().approx_equal(qlin::DensityMatrix::ketbra(s).matrix(), 1e-12));
}

TEST(Density, MixedIsWeightedSum) {
    const auto c = mixture(2, {{0.5, ket(2, "a", 0)}, {0.5, ket(2, "a", 1)}}, {});
    const auto r = rho_of(c, std::vector<std::string>{"a"});
    EXPECT_TRUE(r.full.matrix().approx_equal(qlin::Matrix::identity(2).scaled(0.5), 1e-12));
    ASSERT_TRUE(r.subset.has_value());
    EXPECT_TRUE(r.subset->matrix().approx_equal(r.full.matrix(), 1e-12));
}

TEST(Density, EnvironmentOfBellPair) {
    const auto c = mixture(2, {{1.0, qlin::bell_state(2, 0, 0, "q1", "q2")}}, {"q1"});
    EXPECT_TRUE(env_density(c).matrix().approx_equal(qlin::Matrix::identity(2).scaled(0.5), 1e-12));
    EXPECT_THROW(rho_of(c, std::vector<std::string>{"zz"}), std::exception);
}

TEST(Mu, ThreeCases) {
    sem::BuildOptions o;
    o.input_states = {sem::basis_family(2)[0]};
    const auto lts = sem::build_lts(corpus("teleport.cqp", 2), o);
    std::size_t p = lts.size();
    for (std::size_t i = 0; i < lts.size(); ++i) {
        if (lts.nodes[i].probabilistic) {
            p = i;
        }
    }
    ASSERT_LT(p, lts.size());
    EXPECT_DOUBLE_EQ(mu(lts, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(mu(lts, p, p), 0.0);
    EXPECT_NEAR(mu(lts, p, lts.edges[lts.nodes[p].out[0]].target), 0.25, 1e-12);
    EXPECT_DOUBLE_EQ(mu(lts, 0, 1), 0.0);
}

TEST(Pbb, Reflexive) {
    const auto lts = sem::build_lts(corpus("teleport.cqp", 2));
    const auto r = check_pbb(lts, 0, 0);
    EXPECT_TRUE(r.bisimilar);
    EXPECT_TRUE(r.audit_passed);
}

TEST(Pbb, IdempotentChoice) {
    const auto r = compare("c![0].0 + c![0].0", "c![0].0");
    EXPECT_TRUE(r.bisimilar);
    EXPECT_TRUE(r.audit_passed);
}

TEST(Pbb, CoinIsNotConstant) {
    const auto r = compare("(qdit q){q *= H}.c![measure q].0", "c![0].0");
    EXPECT_FALSE(r.bisimilar);
    ASSERT_TRUE(r.counterexample.has_value());
    const auto &cond = r.counterexample->condition;
    EXPECT_TRUE(cond == "IV" || cond == "II") << cond;
}

TEST(Pbb, HiddenMeasurementIsInvisible) {
    // measuring a qudit nobody sees the result of is a silent step
    EXPECT_TRUE(compare("(qdit q){q *= H}.[measure q].c![1].0", "c![1].0").bisimilar);
}

TEST(Pbb, FairCoinsAgree) {
    const auto r = compare("(qdit q){q *= H}.c![measure q].0", "(qdit p){p *= X}.{p *= H}.c![measure p].0");
    EXPECT_TRUE(r.bisimilar);
}

TEST(Pbb, DifferentOutputStatesDiffer) {
    const auto r = compare("(qdit q){q *= H}.c![q].0", "(qdit q)c![q].0");
    ASSERT_FALSE(r.bisimilar);
    EXPECT_EQ(r.counterexample->condition, "II(c)");
}

TEST(Pbb, ClassicalSuiteMatchesReference) {
    for (const auto &tc : classical::suite()) {
        const auto ref = oracle::branching_bisimilarity(tc.lts);
        EXPECT_EQ(ref.contains({tc.left, tc.right}), tc.expected) << tc.name;
        const auto r = check_pbb(classical::to_lts(tc.lts), tc.left, tc.right);
        EXPECT_EQ(r.bisimilar, tc.expected) << tc.name;
        EXPECT_TRUE(r.audit_passed) << tc.name;
        for (std::size_t s = 0; s < tc.lts.size; ++s) {
            for (std::size_t t = 0; t < tc.lts.size; ++t) {
                EXPECT_EQ(r.block[s] == r.block[t], ref.contains({s, t})) << tc.name << " " << s << "," << t;
            }
        }
    }
}

TEST(Pbb, PartitionIsConsistent) {
    const auto lts = sem::build_lts(corpus("broken_teleport.cqp", 2));
    const auto r = check_pbb(lts, 0, 0);
    EXPECT_LE(static_cast<std::size_t>(r.rounds), lts.size() + 1);
    std::size_t total = 0;
    for (std::size_t k = 0; k < r.classes.size(); ++k) {
        for (auto n : r.classes[k]) {
            EXPECT_EQ(r.block[n], static_cast<int>(k));
        }
        total += r.classes[k].size();
    }
    EXPECT_EQ(total, lts.size());
}

TEST(Pbb, CounterexampleReplays) {
    sem::BuildOptions o;
    o.input_states = {sem::hadamard_family(2)[0]};
    const auto a = sem::build_lts(corpus("broken_teleport.cqp", 2), o);
    const auto b = sem::build_lts(corpus("qwire.cqp", 2), o);
    const auto [u, off] = disjoint_union(a, b);
    const auto r = check_pbb(u, a.initial, off + b.initial);
    ASSERT_FALSE(r.bisimilar);
    ASSERT_TRUE(r.counterexample.has_value());
    const auto &cx = *r.counterexample;
    EXPECT_EQ(cx.condition, "II(c)");
    EXPECT_EQ(cx.left.nodes.front(), a.initial);
    EXPECT_EQ(cx.right.nodes.front(), off + b.initial);
    expect_replayable(u, cx.left);
    expect_replayable(u, cx.right);
}

TEST(FullBisim, TeleportAndWire) {
    const auto v = check_full_bisim(corpus("teleport.cqp", 2), corpus("qwire.cqp", 2));
    EXPECT_TRUE(v.bisimilar);
    EXPECT_TRUE(v.audit_passed);
    EXPECT_EQ(v.members.size(), 5u);
    EXPECT_EQ(v.value_domain, (std::vector<long long>{0, 1}));
}

TEST(FullBisim, SequentialEqualsParallel) {
    FullOptions o;
    o.parallel = false;
    const auto a = check_full_bisim(corpus("broken_teleport.cqp", 3), corpus("qwire.cqp", 3), o);
    const auto b = check_full_bisim(corpus("broken_teleport.cqp", 3), corpus("qwire.cqp", 3));
    EXPECT_EQ(verdict_to_json(a), verdict_to_json(b));
    EXPECT_FALSE(a.bisimilar);
    EXPECT_EQ(a.counterexample->condition, "II(c)");
}

TEST(FullBisim, WireIsReflexive) {
    EXPECT_TRUE(check_full_bisim(corpus("qwire.cqp", 3), corpus("qwire.cqp", 3)).bisimilar);
}

TEST(FullBisim, Preconditions) {
    const auto wire = corpus("qwire.cqp", 2);
    EXPECT_THROW(check_full_bisim(wire, lang::parse_program("main = c?[x:Qdit].f![x].0")), InterfaceMismatch);
    EXPECT_THROW(check_full_bisim(wire, corpus("qwire.cqp", 3)), InterfaceMismatch);
    EXPECT_THROW(check_full_bisim(wire, lang::parse_program("main = (qdit q)c![q].d![q].0")), lang::TypeError);
}

TEST(FullBisim, JsonShape) {
    const auto v = check_full_bisim(corpus("broken_teleport.cqp", 2), corpus("qwire.cqp", 2));
    const auto j = nlohmann::json::parse(verdict_to_json(v));
    EXPECT_FALSE(j["bisimilar"].get<bool>());
    EXPECT_EQ(j["counterexample"]["condition"], "II(c)");
    EXPECT_EQ(j["family"], "default");
    EXPECT_EQ(j["members"].size(), 5u);
    EXPECT_NE(verdict_to_text(v).find("NOT bisimilar"), std::string::npos);
}
