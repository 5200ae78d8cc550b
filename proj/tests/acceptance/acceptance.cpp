// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "classical.hpp"
#include "cli.hpp"
#include "cqp/equiv/bisim.hpp"
#include "cqp/equiv/density.hpp"
#include "cqp/lang/parser.hpp"
#include "cqp/lang/pretty.hpp"
#include "cqp/lang/typecheck.hpp"
#include "cqp/protocols/teleport.hpp"
#include "cqp/qlin.hpp"
#include "cqp/sem/lts.hpp"
#include "gen.hpp"
#include "oracle.hpp"

using namespace cqp;

namespace {

const std::filesystem::path kCorpus = CQP_CORPUS_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string &why) {
        if (pass) {
            detail << "first failure: " << why << "; ";
        }
        pass = false;
    }
};

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

oracle::Mat to_oracle(const qlin::Matrix &m) {
    oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[r][c] = m(r, c);
        }
    }
    return out;
}

std::vector<std::string> names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        out.push_back("q" + std::to_string(i));
    }
    return out;
}

qlin::PureState from_vec(int d, std::vector<std::string> qudits, const oracle::Vec &v) {
    return qlin::PureState(d, std::move(qudits), std::vector<qlin::Complex>(v.begin(), v.end()));
}

// --- 1 -----------------------------------------------------------------

void teleport_equals_wire(Outcome &o) {
    const auto start = std::chrono::steady_clock::now();
    for (int d : {2, 3, 5}) {
        const std::vector<std::string> args{"cqp",
                                            "equiv",
                                            (kCorpus / "protocols/teleport.cqp").string(),
                                            (kCorpus / "protocols/qwire.cqp").string(),
                                            "--dim",
                                            std::to_string(d),
                                            "--format",
                                            "text"};
        std::vector<const char *> argv;
        for (const auto &a : args) {
            argv.push_back(a.c_str());
        }
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        const auto first = out.str().substr(0, out.str().find('\n'));
        o.detail << "d=" << d << " exit " << code << "; ";
        if (code != 0 || first.rfind("bisimilar", 0) != 0) {
            o.fail("d=" + std::to_string(d) + ": " + first + err.str());
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << secs << " s";
    if (secs >= 60.0) {
        o.fail("took " + std::to_string(secs) + " s");
    }
}

// --- 2 -----------------------------------------------------------------

void mutants_are_killed(Outcome &o) {
    using protocols::Mutant;
    for (int d : {2, 3}) {
        for (auto m : {Mutant::DropZ, Mutant::DropX, Mutant::RightShiftEntangle}) {
            const auto v = equiv::check_full_bisim(protocols::teleport_mutant(d, m), protocols::qwire_program(d));
            const std::string tag = std::string(protocols::mutant_name(m)) + " d=" + std::to_string(d);
            if (v.bisimilar) {
                o.detail << tag << " survives; ";
                o.fail(tag + " is bisimilar to the wire");
                continue;
            }
            const auto &cond = v.counterexample->condition;
            o.detail << tag << " " << cond << "; ";
            if (cond != "II(c)" && cond != "IV" && cond != "II") {
                o.fail(tag + " killed by condition " + cond);
            }
        }
    }
}

// --- 3 -----------------------------------------------------------------

void measurement_weights(Outcome &o) {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    double worst_sum = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 3);
        const int n = 1 + static_cast<int>(rng() % 5);
        const int r = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        std::vector<int> pos(static_cast<std::size_t>(n));
        std::iota(pos.begin(), pos.end(), 0);
        std::shuffle(pos.begin(), pos.end(), rng);
        pos.resize(static_cast<std::size_t>(r));

        const auto v = oracle::random_state(rng, qlin::ipow(d, static_cast<std::size_t>(n)));
        const auto qs = names(n);
        std::vector<std::string> targets;
        for (int p : pos) {
            targets.push_back(qs[static_cast<std::size_t>(p)]);
        }
        const auto branches = qlin::measure_qudits(from_vec(d, qs, v), targets);
        auto expected = oracle::projector_weights(v, d, n, pos);

        double sum = 0.0;
        for (const auto &b : branches) {
            sum += b.weight;
            worst = std::max(worst, std::abs(b.weight - expected[b.outcome]));
            expected.erase(b.outcome);
        }
        for (const auto &[m, w] : expected) {
            if (w > qlin::kPruneTol) {
                worst = std::max(worst, w);
            }
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    o.detail << "max weight error " << worst << ", max |sum-1| " << worst_sum;
    if (worst > 1e-10) {
        o.fail("weight error");
    }
    if (worst_sum > 1e-9) {
        o.fail("weights do not sum to 1");
    }
}

// --- 4 -----------------------------------------------------------------

void gate_algebra(Outcome &o) {
    double worst = 0.0;
    for (int d = 2; d <= 8; ++d) {
        const auto h = qlin::hadamard(d);
        const auto dd = static_cast<std::size_t>(d);
        if (!h.is_unitary(1e-10)) {
            o.fail("H not unitary at d=" + std::to_string(d));
        }
        worst = std::max(worst, oracle::max_diff(to_oracle(h.matrix), oracle::hadamard(d)));
        const auto id1 = qlin::Matrix::identity(dd);
        worst = std::max(worst, qlin::power(qlin::pauli_x_pow(d, 1), d).matrix.max_abs_diff(id1));
        worst = std::max(worst, qlin::power(qlin::pauli_z_pow(d, 1), d).matrix.max_abs_diff(id1));
        const auto rl = qlin::cnot_rshift(d).matrix * qlin::cnot_lshift(d).matrix;
        worst = std::max(worst, rl.max_abs_diff(qlin::Matrix::identity(dd * dd)));

        const int zero[] = {0, 0};
        auto s = qlin::PureState::basis(d, {"a", "b"}, zero);
        s = qlin::apply_gate(s, h, {"a"});
        s = qlin::apply_gate(s, qlin::cnot_rshift(d), {"a", "b"});
        const oracle::Vec got(s.amps().begin(), s.amps().end());
        worst = std::max(worst, oracle::max_diff(got, oracle::bell(d, 0, 0)));
    }
    double ortho = 0.0;
    for (int d = 2; d <= 5; ++d) {
        std::vector<qlin::PureState> bells;
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                bells.push_back(qlin::bell_state(d, n, m));
                const oracle::Vec got(bells.back().amps().begin(), bells.back().amps().end());
                worst = std::max(worst, oracle::max_diff(got, oracle::bell(d, n, m)));
            }
        }
        for (std::size_t i = 0; i < bells.size(); ++i) {
            for (std::size_t j = 0; j < bells.size(); ++j) {
                const double want = i == j ? 1.0 : 0.0;
                ortho = std::max(ortho, std::abs(qlin::inner(bells[i], bells[j]) - want));
            }
        }
    }
    o.detail << "max entry error " << worst << ", max Bell overlap error " << ortho;
    if (worst > 1e-10 || ortho > 1e-10) {
        o.fail("tolerance");
    }
}

// --- 5 -----------------------------------------------------------------

void outcome_table(Outcome &o) {
    std::mt19937_64 rng(55);
    double weight_err = 0.0;
    double rho_err = 0.0;
    std::size_t rows = 0;
    for (int d : {2, 3, 5}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto v = oracle::random_state(rng, static_cast<std::size_t>(d));
            const auto circuit = oracle::teleport(d, v);
            const auto table = protocols::outcome_table(d, from_vec(d, {"in"}, v));
            if (table.size() != static_cast<std::size_t>(d * d)) {
                o.fail("d=" + std::to_string(d) + ": " + std::to_string(table.size()) + " outcomes");
                continue;
            }
            const auto input = oracle::outer(v);
            for (const auto &row : table) {
                const auto &branch = circuit.at(static_cast<std::size_t>(row.outcome.at(0) * d + row.outcome.at(1)));
                weight_err = std::max(weight_err, std::abs(row.weight - 1.0 / (d * d)));
                weight_err = std::max(weight_err, std::abs(branch.weight - 1.0 / (d * d)));
                rho_err = std::max(rho_err, row.rho_error);
                rho_err = std::max(rho_err, oracle::max_diff(oracle::outer(branch.bob), input));
                ++rows;
            }
        }
    }
    o.detail << rows << " rows, max weight error " << weight_err << ", max rho error " << rho_err;
    if (weight_err > 1e-9) {
        o.fail("weight");
    }
    if (rho_err > 1e-8) {
        o.fail("Bob's state");
    }
}

// --- 6 -----------------------------------------------------------------

void mixture_density(Outcome &o) {
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 2);
        const int n = 2 + static_cast<int>(rng() % 2);
        const auto dim = qlin::ipow(d, static_cast<std::size_t>(n));
        const auto qs = names(n);
        const auto a = oracle::random_state(rng, dim);
        const auto b = oracle::random_state(rng, dim);
        const double w = unit(rng);

        sem::Configuration c;
        c.d = d;
        c.components.push_back({w, from_vec(d, qs, a), {}});
        c.components.push_back({1.0 - w, from_vec(d, qs, b), {}});
        // a random split into owned and environment qudits
        for (int i = 0; i < n; ++i) {
            (rng() % 2 == 0 ? c.owned : c.env).push_back(qs[static_cast<std::size_t>(i)]);
        }
        c.term = lang::nil();

        std::vector<int> keep(static_cast<std::size_t>(n));
        std::iota(keep.begin(), keep.end(), 0);
        std::shuffle(keep.begin(), keep.end(), rng);
        keep.resize(1 + rng() % static_cast<unsigned>(n));
        std::vector<std::string> keep_names;
        for (int k : keep) {
            keep_names.push_back(qs[static_cast<std::size_t>(k)]);
        }

        auto rho = oracle::outer(a);
        const auto rho_b = oracle::outer(b);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                rho[i][j] = w * rho[i][j] + (1.0 - w) * rho_b[i][j];
            }
        }
        std::vector<int> env_pos;
        for (const auto &e : c.env) {
            env_pos.push_back(static_cast<int>(std::find(qs.begin(), qs.end(), e) - qs.begin()));
        }

        const auto got = equiv::rho_of(c, keep_names);
        worst = std::max(worst, oracle::max_diff(to_oracle(got.full.matrix()), rho));
        worst = std::max(worst, oracle::max_diff(to_oracle(got.subset->matrix()), oracle::partial_trace(rho, d, n, keep)));
        if (!env_pos.empty()) {
            worst =
                std::max(worst, oracle::max_diff(to_oracle(got.env.matrix()), oracle::partial_trace(rho, d, n, env_pos)));
        }
    }
    o.detail << "50 mixtures, max entry error " << worst;
    if (worst > 1e-12) {
        o.fail("tolerance");
    }
}

// --- 7 -----------------------------------------------------------------

void mu_exhaustive(Outcome &o) {
    const int d = 2;
    const auto lts = sem::build_lts(protocols::teleport_program(d));
    sem::InputSpace inputs;
    inputs.values = {0, 1};
    inputs.qudit_states = sem::default_family(d);

    std::map<std::string, std::size_t> by_key;
    for (std::size_t i = 0; i < lts.size(); ++i) {
        by_key[lts.nodes[i].key] = i;
    }
    std::size_t pairs = 0;
    std::size_t prob_nodes = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < lts.size(); ++t) {
        // recompute the one-step distribution from the semantics
        const auto res = sem::step(lts.nodes[t].config, inputs);
        std::map<std::size_t, double> dist;
        if (res.probabilistic) {
            ++prob_nodes;
            for (const auto &tr : res.transitions) {
                const auto it = by_key.find(sem::canonical_key(tr.target));
                if (it == by_key.end()) {
                    o.fail("collapse target missing from the LTS");
                    continue;
                }
                dist[it->second] += tr.label.prob;
            }
        } else {
            dist[t] = 1.0;
        }
        if (res.probabilistic != lts.nodes[t].probabilistic) {
            o.fail("node " + std::to_string(t) + " classified differently");
        }
        for (std::size_t u = 0; u < lts.size(); ++u) {
            const auto it = dist.find(u);
            const double want = it == dist.end() ? 0.0 : it->second;
            worst = std::max(worst, std::abs(equiv::mu(lts, t, u) - want));
            ++pairs;
        }
    }
    o.detail << lts.size() << " nodes (" << prob_nodes << " probabilistic), " << pairs << " pairs, max error "
             << worst;
    if (worst > 1e-12) {
        o.fail("mu disagrees");
    }
}

// --- 8 -----------------------------------------------------------------

void classical_regression(Outcome &o) {
    int agree = 0;
    int cases = 0;
    for (const auto &tc : classical::suite()) {
        ++cases;
        const auto ref = oracle::branching_bisimilarity(tc.lts);
        const auto r = equiv::check_pbb(classical::to_lts(tc.lts), tc.left, tc.right);
        bool same = r.bisimilar == ref.contains({tc.left, tc.right}) && r.bisimilar == tc.expected;
        for (std::size_t s = 0; s < tc.lts.size; ++s) {
            for (std::size_t t = 0; t < tc.lts.size; ++t) {
                same = same && (r.block[s] == r.block[t]) == ref.contains({s, t});
            }
        }
        if (same) {
            ++agree;
        } else {
            o.fail(tc.name);
        }
    }
    o.detail << agree << "/" << cases << " cases agree on the full partition";
    if (cases != 10) {
        o.fail("suite has " + std::to_string(cases) + " cases");
    }
}

// --- 9 -----------------------------------------------------------------

void contexts(Outcome &o) {
    const std::string teleport = slurp(kCorpus / "protocols/teleport.cqp");
    const auto main_at = teleport.find("main = ");
    const std::string defs = teleport.substr(0, main_at);
    const std::string body = teleport.substr(main_at + 7, teleport.find('\n', main_at) - main_at - 7);
    const std::string broken = slurp(kCorpus / "protocols/broken_teleport.cqp");
    const std::string broken_defs = broken.substr(0, broken.find("main = "));
    const std::string wire = "c?[x:Qdit].d![x].0";

    const std::vector<std::pair<std::string, std::string>> ctxs{
        {"restricted output, forwarded", "(new d:^[Qdit])((HOLE) | d?[w:Qdit].f![w].0)"},
        {"forwarded input", "(new c:^[Qdit])(g?[w:Qdit].c![w].0 | (HOLE))"},
        {"input prefix", "a?[n:Int].(HOLE)"},
        {"beside a coin", "(HOLE) | (qdit r){r *= H}.h![measure r].0"},
        {"both forwarded", "(new c:^[Qdit])(new d:^[Qdit])(g?[w:Qdit].c![w].0 | (HOLE) | d?[v:Qdit].f![v].0)"},
    };
    auto plug = [](std::string ctx, const std::string &hole) { return ctx.replace(ctx.find("HOLE"), 4, hole); };

    int ok = 0;
    for (const auto &[name, ctx] : ctxs) {
        const auto left = lang::parse_program(defs + "main = " + plug(ctx, body) + "\n", 2);
        const auto right = lang::parse_program("dim 2;\nmain = " + plug(ctx, wire) + "\n", 2);
        const auto v = equiv::check_full_bisim(left, right);
        // the same context must not hide a broken protocol
        const auto bad = lang::parse_program(broken_defs + "main = " + plug(ctx, body) + "\n", 2);
        const auto killed = !equiv::check_full_bisim(bad, right).bisimilar;
        if (v.bisimilar && killed) {
            ++ok;
        } else {
            o.fail(name + (v.bisimilar ? ": mutant survives" : ": not bisimilar"));
        }
    }
    o.detail << ok << "/" << ctxs.size() << " contexts preserve the equivalence and still expose the drop-z mutant";
}

// --- 10 ----------------------------------------------------------------

void front_end(Outcome &o) {
    std::mt19937_64 rng(1010);
    int round_trips = 0;
    for (int i = 0; i < 500; ++i) {
        const auto p = gen::program(rng);
        const auto text = lang::pretty(p);
        try {
            const auto back = lang::parse_program(text);
            if (lang::equal(p, back) && lang::pretty(back) == text) {
                ++round_trips;
            } else {
                o.fail("program " + std::to_string(i) + " changes on the round trip");
            }
        } catch (const std::exception &e) {
            o.fail("program " + std::to_string(i) + ": " + e.what());
        }
    }
    int accepted = 0;
    int protocols_seen = 0;
    for (const auto &entry : std::filesystem::directory_iterator(kCorpus / "protocols")) {
        ++protocols_seen;
        if (lang::typecheck(lang::parse_program(slurp(entry.path()))).ok) {
            ++accepted;
        } else {
            o.fail(entry.path().filename().string() + " rejected");
        }
    }
    int rejected = 0;
    int negatives = 0;
    for (const auto &entry : std::filesystem::directory_iterator(kCorpus / "negative")) {
        ++negatives;
        const auto text = slurp(entry.path());
        const auto at = text.find("expect: ");
        const auto code = text.substr(at + 8, text.find('\n', at) - at - 8);
        const auto r = lang::typecheck(lang::parse_program(text));
        if (!r.ok && lang::code_name(r.error->code) == code) {
            ++rejected;
        } else {
            o.fail(entry.path().filename().string() + " not rejected with " + code);
        }
    }
    o.detail << round_trips << "/500 round trips, " << accepted << "/" << protocols_seen << " protocols accepted, "
             << rejected << "/" << negatives << " negatives rejected with the expected code";
    if (negatives != 6) {
        o.fail("negative corpus has " + std::to_string(negatives) + " programs");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome &)>>> criteria{
        {"teleport equals wire (d=2,3,5)", teleport_equals_wire},
        {"mutants killed (d=2,3)", mutants_are_killed},
        {"measurement weights vs projectors", measurement_weights},
        {"gate algebra and Bell basis", gate_algebra},
        {"teleport outcome table vs circuit", outcome_table},
        {"density of mixed configurations", mixture_density},
        {"collapse probabilities on every pair", mu_exhaustive},
        {"classical branching bisimulation suite", classical_regression},
        {"contexts preserve equivalence (d=2)", contexts},
        {"parser, printer and typechecker corpus", front_end},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %-42s %.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
