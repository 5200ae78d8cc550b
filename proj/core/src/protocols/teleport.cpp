#include "cqp/protocols/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>

#include <nlohmann/json.hpp>

#include "cqp/equiv/density.hpp"
#include "cqp/lang/parser.hpp"
#include "cqp/sem/lts.hpp"

namespace cqp::protocols {

using sem::Label;

const char *const kTeleportSource =
    "Alice(c:^[Qdit], e:^[Val,Val]) = c?[x:Qdit].{x,z *= LC}.{x *= H}.e![measure z, measure x].0\n"
    "Bob(e:^[Val,Val], d:^[Qdit]) = e?[M1:Val, M2:Val].{y *= X^-M1}.{y *= Z^M2}.d![y].0\n"
    "main = (qdit y,z){z *= H}.{z,y *= RC}.(new e:^[Val,Val])(Alice(c,e) | Bob(e,d))\n";

const char *const kQWireSource = "main = c?[x:Qdit].d![x].0\n";

namespace {

std::string replace_once(std::string text, const std::string &from, const std::string &to) {
    const auto at = text.find(from);
    if (at == std::string::npos) {
        throw std::logic_error("mutation site not found: " + from);
    }
    return text.replace(at, from.size(), to);
}

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

bool visible(const Label &l) {
    return l.kind == Label::Kind::In || l.kind == Label::Kind::Out;
}

struct TableWalker {
    const sem::Lts &lts;
    const qlin::PureState &input;
    std::map<std::vector<long long>, OutcomeRow> rows;

    void walk(std::size_t n, double weight, std::vector<long long> outcome, std::size_t depth) {
        if (depth > lts.size()) {
            throw std::runtime_error("outcome table: cycle in teleport LTS");
        }
        const auto &node = lts.nodes[n];
        if (node.probabilistic) {
            for (auto e : node.out) {
                const auto &edge = lts.edges[e];
                auto next = outcome;
                next.insert(next.end(), edge.label.outcome.begin(), edge.label.outcome.end());
                walk(edge.target, weight * edge.label.prob, std::move(next), depth + 1);
            }
            return;
        }
        for (auto e : node.out) {
            const auto &edge = lts.edges[e];
            if (edge.label.kind == Label::Kind::Out && edge.label.chan == "d") {
                record(edge.target, weight, std::move(outcome));
                return;
            }
        }
        for (auto e : node.out) {
            const auto &edge = lts.edges[e];
            if (edge.label.kind == Label::Kind::Tau || edge.label.kind == Label::Kind::In) {
                walk(edge.target, weight, std::move(outcome), depth + 1);
                return;
            }
        }
        throw std::runtime_error("outcome table: run ends without output on d");
    }

    void record(std::size_t n, double weight, std::vector<long long> outcome) {
        const auto rho = equiv::env_density(lts.nodes[n].config);
        const auto psi = input.renamed(rho.qudits());
        auto &row = rows[outcome];
        row.outcome = outcome;
        row.weight += weight;
        row.fidelity = qlin::fidelity(rho, psi);
        row.rho_error = rho.matrix().max_abs_diff(qlin::DensityMatrix::ketbra(psi).matrix());
    }
};

}  // namespace

lang::Program teleport_program(int d) {
    return lang::parse_program(kTeleportSource, d);
}

lang::Program qwire_program(int d) {
    return lang::parse_program(kQWireSource, d);
}

std::string_view mutant_name(Mutant m) {
    switch (m) {
    case Mutant::DropZ:
        return "drop-z";
    case Mutant::DropX:
        return "drop-x";
    case Mutant::RightShiftEntangle:
        return "rc-for-lc";
    }
    return "?";
}

lang::Program teleport_mutant(int d, Mutant m) {
    std::string src = kTeleportSource;
    switch (m) {
    case Mutant::DropZ:
        src = replace_once(src, ".{y *= Z^M2}", "");
        break;
    case Mutant::DropX:
        src = replace_once(src, ".{y *= X^-M1}", "");
        break;
    case Mutant::RightShiftEntangle:
        src = replace_once(src, "{x,z *= LC}", "{x,z *= RC}");
        break;
    }
    return lang::parse_program(src, d);
}

std::vector<OutcomeRow> outcome_table(int d, const qlin::PureState &input, std::size_t max_nodes) {
    sem::BuildOptions b;
    b.input_states = {input};
    b.max_nodes = max_nodes;
    const auto lts = sem::build_lts(teleport_program(d), b);
    TableWalker w{lts, input, {}};
    w.walk(lts.initial, 1.0, {}, 0);
    std::vector<OutcomeRow> out;
    for (auto &[_, row] : w.rows) {
        out.push_back(std::move(row));
    }
    return out;
}

ClassAudit audit_classes(const sem::Lts &lts) {
    // Bit k set: some path reaches the node with history class k
    // (0 nothing, 1 input on c, 2 input then output on d, 3 anything else).
    std::vector<unsigned> seen(lts.size(), 0);
    std::vector<std::size_t> work{lts.initial};
    seen[lts.initial] = 1u;
    while (!work.empty()) {
        const auto n = work.back();
        work.pop_back();
        for (auto e : lts.nodes[n].out) {
            const auto &edge = lts.edges[e];
            unsigned next = 0;
            for (unsigned k = 0; k < 4; ++k) {
                if (!(seen[n] & (1u << k))) {
                    continue;
                }
                unsigned to = k;
                if (edge.label.kind == Label::Kind::In) {
                    to = k == 0 && edge.label.chan == "c" ? 1 : 3;
                } else if (edge.label.kind == Label::Kind::Out) {
                    to = k == 1 && edge.label.chan == "d" ? 2 : 3;
                }
                next |= 1u << to;
            }
            if ((seen[edge.target] | next) != seen[edge.target]) {
                seen[edge.target] |= next;
                work.push_back(edge.target);
            }
        }
    }

    ClassAudit a;
    for (std::size_t n = 0; n < lts.size(); ++n) {
        const auto mask = seen[n];
        if (mask & 8u) {
            ++a.unexpected;
        } else if (mask == 1u) {
            ++a.before_input;
        } else if (mask == 2u) {
            ++a.after_input;
        } else if (mask == 4u) {
            ++a.after_output;
            const auto &out = lts.nodes[n].out;
            if (std::any_of(out.begin(), out.end(), [&](auto e) { return visible(lts.edges[e].label); })) {
                ++a.active_after_output;
            }
        } else if (mask != 0) {
            ++a.ambiguous;
        }
    }
    return a;
}

ProtocolReport verify_teleport(int d, const VerifyOptions &opts) {
    if (d < 2) {
        throw std::invalid_argument("teleport needs d >= 2");
    }
    if (d > opts.max_dim) {
        throw sem::NodeBudgetExceeded(opts.max_nodes);
    }
    ProtocolReport r;
    r.d = d;
    const auto family = opts.input_states.empty() ? sem::default_family(d) : opts.input_states;

    equiv::FullOptions full;
    full.input_states = family;
    full.family_name = opts.family_name;
    full.max_nodes = opts.max_nodes;
    full.parallel = opts.parallel;
    r.verdict = equiv::check_full_bisim(teleport_program(d), qwire_program(d), full);

    const auto program = teleport_program(d);
    for (const auto &psi : family) {
        sem::BuildOptions b;
        b.input_states = {psi};
        b.max_nodes = opts.max_nodes;
        const auto a = audit_classes(sem::build_lts(program, b));
        r.class_audit.before_input += a.before_input;
        r.class_audit.after_input += a.after_input;
        r.class_audit.after_output += a.after_output;
        r.class_audit.ambiguous += a.ambiguous;
        r.class_audit.unexpected += a.unexpected;
        r.class_audit.active_after_output += a.active_after_output;

        const auto rows = outcome_table(d, psi, opts.max_nodes);
        const double uniform = 1.0 / (d * d);
        if (rows.size() != static_cast<std::size_t>(d * d)) {
            r.max_weight_error = std::max(r.max_weight_error, uniform);
        }
        for (const auto &row : rows) {
            r.max_weight_error = std::max(r.max_weight_error, std::abs(row.weight - uniform));
            r.max_rho_error = std::max(r.max_rho_error, row.rho_error);
            r.min_fidelity = std::min(r.min_fidelity, row.fidelity);
        }
    }
    // The table is shown for the last family member, the random state in
    // the default family.
    r.probe_state = state_text(family.back());
    r.outcomes = outcome_table(d, family.back(), opts.max_nodes);
    return r;
}

std::string report_to_text(const ProtocolReport &r) {
    char buf[160];
    std::string out = "teleport vs wire, d=" + std::to_string(r.d) + ": " +
                      (r.verdict.bisimilar ? "bisimilar" : "NOT bisimilar") + "\n";
    const auto &a = r.class_audit;
    std::snprintf(buf, sizeof buf, "  classes: %zu before input, %zu after input, %zu after output%s\n",
                  a.before_input, a.after_input, a.after_output, a.ok() ? "" : " (AUDIT FAILED)");
    out += buf;
    out += "  outcomes for input " + r.probe_state + ":\n";
    for (const auto &row : r.outcomes) {
        std::string o;
        for (auto v : row.outcome) {
            o += (o.empty() ? "" : ",") + std::to_string(v);
        }
        std::snprintf(buf, sizeof buf, "    (%s)  weight %.6g  fidelity %.6g\n", o.c_str(), row.weight, row.fidelity);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "  over the family: max weight error %.3g, max rho error %.3g, min fidelity %.6g\n",
                  r.max_weight_error, r.max_rho_error, r.min_fidelity);
    out += buf;
    return out;
}

std::string report_to_json(const ProtocolReport &r, int indent) {
    nlohmann::json j;
    j["dimension"] = r.d;
    j["bisimilar"] = r.verdict.bisimilar;
    j["verdict"] = nlohmann::json::parse(equiv::verdict_to_json(r.verdict, -1));
    const auto &a = r.class_audit;
    j["class_audit"] = {{"before_input", a.before_input},
                        {"after_input", a.after_input},
                        {"after_output", a.after_output},
                        {"ambiguous", a.ambiguous},
                        {"unexpected", a.unexpected},
                        {"active_after_output", a.active_after_output},
                        {"ok", a.ok()}};
    j["probe_state"] = r.probe_state;
    j["outcomes"] = nlohmann::json::array();
    for (const auto &row : r.outcomes) {
        j["outcomes"].push_back({{"outcome", row.outcome}, {"weight", row.weight}, {"fidelity", row.fidelity}});
    }
    j["max_weight_error"] = r.max_weight_error;
    j["max_rho_error"] = r.max_rho_error;
    j["min_fidelity"] = r.min_fidelity;
    return j.dump(indent);
}

}  // namespace cqp::protocols
