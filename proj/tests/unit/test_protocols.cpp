#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cqp/equiv/density.hpp"
#include "cqp/lang/parser.hpp"
#include "cqp/lang/pretty.hpp"
#include "cqp/lang/typecheck.hpp"
#include "cqp/protocols/teleport.hpp"
#include "cqp/sem/lts.hpp"
#include "oracle.hpp"

using namespace cqp;
using namespace cqp::protocols;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

qlin::PureState as_state(int d, const oracle::Vec &v) {
    return qlin::PureState(d, {"in"}, std::vector<qlin::Complex>(v.begin(), v.end()));
}

}  // namespace

TEST(Programs, RoundTripAndTypecheck) {
    for (int d : {2, 3, 5}) {
        const auto t = teleport_program(d);
        EXPECT_TRUE(lang::equal(lang::parse_program(lang::pretty(t)), t));
        EXPECT_TRUE(lang::typecheck(t).ok) << d;
        EXPECT_TRUE(lang::typecheck(qwire_program(d)).ok) << d;
        EXPECT_EQ(t.dim, d);
    }
}

TEST(Programs, MatchBundledSources) {
    const auto dir = std::filesystem::path(CQP_CORPUS_DIR) / "protocols";
    EXPECT_TRUE(lang::equal(lang::parse_program(slurp(dir / "teleport.cqp")), teleport_program(2)));
    EXPECT_TRUE(lang::equal(lang::parse_program(slurp(dir / "qwire.cqp")), qwire_program(2)));
    EXPECT_TRUE(
        lang::equal(lang::parse_program(slurp(dir / "broken_teleport.cqp")), teleport_mutant(2, Mutant::DropZ)));
}

TEST(Programs, WireLts) {
    sem::BuildOptions o;
    o.input_states = {sem::basis_family(2)[0]};
    const auto lts = sem::build_lts(qwire_program(2), o);
    ASSERT_EQ(lts.edges.size(), 2u);
    EXPECT_EQ(lts.edges[0].label.kind, sem::Label::Kind::In);
    EXPECT_EQ(lts.edges[1].label.kind, sem::Label::Kind::Out);
    qlin::Matrix zero(2, 2);
    zero(0, 0) = 1.0;
    EXPECT_TRUE(equiv::env_density(lts.nodes[lts.edges[1].target].config).matrix().approx_equal(zero, 1e-12));
}

TEST(Programs, EntanglingPrefixGivesBellPair) {
    for (int d : {2, 3, 5}) {
        const auto c = sem::initial_configuration(teleport_program(d));
        // initial node: (qdit y,z) allocated; apply the two prefix actions
        auto res = sem::step(c, {});
        ASSERT_EQ(res.transitions.size(), 1u);
        res = sem::step(res.transitions[0].target, {});
        ASSERT_EQ(res.transitions.size(), 1u);
        const auto &after = res.transitions[0].target;
        ASSERT_EQ(after.components.size(), 1u);
        const auto &s = after.components[0].state;
        ASSERT_EQ(s.num_qudits(), 2u);
        // canonical order puts z (the control) wherever it is first mentioned
        const auto bell = oracle::bell(d, 0, 0);
        const oracle::Vec got(s.amps().begin(), s.amps().end());
        EXPECT_LT(oracle::max_diff(got, bell), 1e-10) << d;
    }
}

TEST(Outcomes, MatchCircuit) {
    std::mt19937_64 rng(3);
    for (int d : {2, 3}) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto v = oracle::random_state(rng, d);
            const auto rows = outcome_table(d, as_state(d, v));
            const auto ref = oracle::teleport(d, v);
            ASSERT_EQ(rows.size(), static_cast<std::size_t>(d * d));
            for (const auto &row : rows) {
                const auto &b = ref.at(static_cast<std::size_t>(row.outcome.at(0) * d + row.outcome.at(1)));
                EXPECT_NEAR(row.weight, b.weight, 1e-12);
                EXPECT_NEAR(row.weight, 1.0 / (d * d), 1e-9);
                EXPECT_NEAR(row.fidelity, 1.0, 1e-9);
                EXPECT_LT(row.rho_error, 1e-8);
                EXPECT_NEAR(std::abs(oracle::dot(b.bob, v)), 1.0, 1e-9);
            }
        }
    }
}

TEST(Verify, DimensionTwo) {
    const auto r = verify_teleport(2);
    EXPECT_TRUE(r.verdict.bisimilar);
    EXPECT_TRUE(r.class_audit.ok());
    EXPECT_GT(r.class_audit.before_input, 0u);
    EXPECT_GT(r.class_audit.after_input, 0u);
    EXPECT_GT(r.class_audit.after_output, 0u);
    ASSERT_EQ(r.outcomes.size(), 4u);
    double total = 0.0;
    for (const auto &row : r.outcomes) {
        EXPECT_NEAR(row.weight, 0.25, 1e-9);
        EXPECT_NEAR(row.fidelity, 1.0, 1e-9);
        total += row.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_LT(r.max_rho_error, 1e-8);
    EXPECT_LT(r.max_weight_error, 1e-9);
}

TEST(Verify, DimensionThree) {
    const auto r = verify_teleport(3);
    EXPECT_TRUE(r.verdict.bisimilar);
    ASSERT_EQ(r.outcomes.size(), 9u);
    for (const auto &row : r.outcomes) {
        EXPECT_NEAR(row.weight, 1.0 / 9, 1e-9);
    }
    EXPECT_NE(report_to_json(r).find("\"class_audit\""), std::string::npos);
}

TEST(Verify, BudgetAndDomain) {
    VerifyOptions o;
    o.max_dim = 3;
    EXPECT_THROW(verify_teleport(4, o), sem::NodeBudgetExceeded);
    EXPECT_THROW(verify_teleport(1), std::invalid_argument);
}

TEST(ClassAudit, BrokenProtocolStillHasThreeClasses) {
    // the audit is about shape, not correctness
    const auto lts = sem::build_lts(teleport_mutant(2, Mutant::DropX));
    EXPECT_TRUE(audit_classes(lts).ok());
}

TEST(ClassAudit, FlagsOutputBeforeInput) {
    const auto lts = sem::build_lts(lang::parse_program("main = (qdit q)d![q].c?[x:Qdit].d![x].0"));
    EXPECT_FALSE(audit_classes(lts).ok());
}
