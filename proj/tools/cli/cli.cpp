#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cqp/equiv/bisim.hpp"
#include "cqp/equiv/density.hpp"
#include "cqp/lang/parser.hpp"
#include "cqp/lang/pretty.hpp"
#include "cqp/lang/subst.hpp"
#include "cqp/lang/typecheck.hpp"
#include "cqp/protocols/teleport.hpp"
#include "cqp/sem/lts.hpp"

namespace cqp::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lang::Program load(const std::string &path, const RunConfig &cfg) {
    const auto text = read_file(path);
    try {
        return lang::parse_program(text, cfg.dim);
    } catch (const lang::ParseError &e) {
        throw lang::ParseError(e.pos(), e.message() + " (in " + path + ")");
    }
}

void require_typed(const lang::Program &p, const std::string &path) {
    const auto report = lang::typecheck(p);
    if (!report.ok) {
        auto diag = *report.error;
        diag.message += " (in " + path + ")";
        throw lang::TypeError(diag);
    }
}

// Writes to --out when given, else to `out`.
void emit(const RunConfig &cfg, std::ostream &out, const std::string &text) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f || !(f << text)) {
        throw IoError("cannot write " + cfg.out);
    }
}

std::string format_or(const RunConfig &cfg, const std::string &fallback, std::initializer_list<const char *> allowed) {
    const auto f = cfg.format.empty() ? fallback : cfg.format;
    for (const auto *a : allowed) {
        if (f == a) {
            return f;
        }
    }
    throw std::invalid_argument("format '" + f + "' is not available for " + cfg.command);
}

std::string complex_text(qlin::Complex z) {
    char buf[64];
    const double re = std::abs(z.real()) < 5e-13 ? 0.0 : z.real();
    const double im = std::abs(z.imag()) < 5e-13 ? 0.0 : z.imag();
    if (im == 0.0) {
        std::snprintf(buf, sizeof buf, "%.6g", re);
    } else if (re == 0.0) {
        std::snprintf(buf, sizeof buf, "%.6gi", im);
    } else {
        std::snprintf(buf, sizeof buf, "%.6g%+.6gi", re, im);
    }
    return buf;
}

std::string state_text(const qlin::PureState &s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.amps().size(); ++i) {
        out += (i ? ", " : "") + complex_text(s.amps()[i]);
    }
    return out + "]";
}

std::string matrix_text(const qlin::Matrix &m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += "  [";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out += (c ? ", " : "") + complex_text(m(r, c));
        }
        out += "]\n";
    }
    return out;
}

nlohmann::json matrix_json(const qlin::Matrix &m) {
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Uniform double in [0,1) from 53 random bits; avoids the
// implementation-defined distributions of <random>.
double unit_draw(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int cmd_parse(const RunConfig &cfg, std::ostream &out) {
    const auto p = load(cfg.inputs.at(0), cfg);
    emit(cfg, out, lang::pretty(p) + "\n");
    return kOk;
}

int cmd_typecheck(const RunConfig &cfg, std::ostream &out) {
    const auto p = load(cfg.inputs.at(0), cfg);
    const auto report = lang::typecheck(p);
    if (!report.ok) {
        throw lang::TypeError(*report.error);
    }
    std::string text = "ok (d=" + std::to_string(p.dim) + ")\n";
    for (const auto &[name, type] : report.free_channels) {
        text += "  " + name + " : " + lang::pretty(type) + "\n";
    }
    emit(cfg, out, text);
    return kOk;
}

int cmd_run(const RunConfig &cfg, std::ostream &out) {
    const auto p = load(cfg.inputs.at(0), cfg);
    require_typed(p, cfg.inputs.at(0));
    const auto fmt = format_or(cfg, "text", {"text", "json"});
    const sem::InputSpace inputs{parse_values(cfg.values, p.dim), parse_family(cfg.family, p.dim, cfg.seed)};

    std::mt19937_64 rng(cfg.seed);
    auto c = sem::initial_configuration(p);
    std::string text = "seed " + std::to_string(cfg.seed) + ", d=" + std::to_string(p.dim) + "\n";
    nlohmann::json steps = nlohmann::json::array();
    std::size_t count = 0;
    while (true) {
        auto res = sem::step(c, inputs);
        if (res.transitions.empty()) {
            break;
        }
        if (++count > cfg.max_nodes) {
            throw sem::NodeBudgetExceeded(cfg.max_nodes);
        }
        std::size_t pick = 0;
        nlohmann::json weights = nlohmann::json::array();
        if (res.probabilistic) {
            double u = unit_draw(rng);
            pick = res.transitions.size() - 1;
            for (std::size_t i = 0; i < res.transitions.size(); ++i) {
                weights.push_back(res.transitions[i].label.prob);
            }
            for (std::size_t i = 0; i < res.transitions.size(); ++i) {
                u -= res.transitions[i].label.prob;
                if (u < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng() % res.transitions.size());
        }
        const auto &label = res.transitions[pick].label;
        nlohmann::json step{{"label", label.str()}};
        text += std::to_string(count) + ": " + label.str();
        if (res.probabilistic) {
            text += "  [weights";
            for (const auto &w : weights) {
                text += " " + complex_text(w.get<double>());
            }
            text += "]";
            step["weights"] = weights;
        }
        text += "\n";
        if (label.kind == sem::Label::Kind::In) {
            for (const auto &item : label.items) {
                if (item.kind == sem::LabelItem::Kind::Qudit) {
                    const auto sent = state_text(inputs.qudit_states.at(static_cast<std::size_t>(item.value)));
                    text += "   received state " + sent + "\n";
                    step["received"] = sent;
                }
            }
        }
        steps.push_back(std::move(step));
        c = std::move(res.transitions[pick].target);
    }

    const bool finished = c.term->as<lang::proc::Nil>() != nullptr;
    text += finished ? "terminated after " + std::to_string(count) + " steps\n"
                     : "stuck after " + std::to_string(count) + " steps: " + lang::pretty(c.term) + "\n";
    nlohmann::json j{{"seed", cfg.seed}, {"dimension", p.dim}, {"steps", steps}, {"terminated", finished}};
    if (!finished) {
        j["term"] = lang::pretty(c.term);
    }
    auto show = [&](const char *what, const std::vector<std::string> &names) {
        if (names.empty()) {
            text += std::string("no ") + what + " qudits\n";
            j[what] = nullptr;
            return;
        }
        const auto rho = equiv::reduced_density(c, names);
        std::string joined;
        for (const auto &n : names) {
            joined += (joined.empty() ? "" : " ") + n;
        }
        text += std::string(what) + " qudits " + joined + ", density matrix:\n" + matrix_text(rho.matrix());
        j[what] = {{"qudits", names}, {"matrix", matrix_json(rho.matrix())}};
    };
    show("environment", c.env);
    show("owned", c.owned);
    emit(cfg, out, fmt == "json" ? j.dump(2) + "\n" : text);
    return kOk;
}

int cmd_lts(const RunConfig &cfg, std::ostream &out) {
    const auto p = load(cfg.inputs.at(0), cfg);
    require_typed(p, cfg.inputs.at(0));
    const auto fmt = format_or(cfg, "json", {"json", "dot", "text"});
    sem::BuildOptions b;
    b.value_domain = parse_values(cfg.values, p.dim);
    b.input_states = parse_family(cfg.family, p.dim, cfg.seed);
    b.max_nodes = cfg.max_nodes;
    const auto lts = sem::build_lts(p, b);
    if (fmt == "json") {
        emit(cfg, out, sem::lts_to_json(lts));
    } else if (fmt == "dot") {
        emit(cfg, out, sem::lts_to_dot(lts));
    } else {
        emit(cfg, out, std::to_string(lts.size()) + " nodes, " + std::to_string(lts.edges.size()) + " edges\n");
    }
    return kOk;
}

int cmd_equiv(const RunConfig &cfg, std::ostream &out) {
    const auto p = load(cfg.inputs.at(0), cfg);
    const auto q = load(cfg.inputs.at(1), cfg);
    const auto fmt = format_or(cfg, "json", {"json", "text"});
    equiv::FullOptions o;
    o.value_domain = parse_values(cfg.values, p.dim);
    o.input_states = parse_family(cfg.family, p.dim, cfg.seed);
    o.family_name = cfg.family;
    o.max_nodes = cfg.max_nodes;
    o.parallel = !cfg.sequential;
    const auto v = equiv::check_full_bisim(p, q, o);
    emit(cfg, out, fmt == "json" ? equiv::verdict_to_json(v) + "\n" : equiv::verdict_to_text(v));
    return v.bisimilar ? kOk : kNotBisimilar;
}

int cmd_teleport_demo(const RunConfig &cfg, std::ostream &out) {
    const auto fmt = format_or(cfg, "text", {"text", "json"});
    const auto dims = cfg.dims.empty() ? std::vector<int>{2, 3} : cfg.dims;
    std::string text;
    auto all = nlohmann::json::array();
    bool ok = true;
    for (int d : dims) {
        protocols::VerifyOptions o;
        o.input_states = parse_family(cfg.family, d, cfg.seed);
        o.family_name = cfg.family;
        o.max_nodes = cfg.max_nodes;
        o.parallel = !cfg.sequential;
        const auto r = protocols::verify_teleport(d, o);
        ok = ok && r.verdict.bisimilar && r.class_audit.ok();
        text += protocols::report_to_text(r);
        all.push_back(nlohmann::json::parse(protocols::report_to_json(r, -1)));
    }
    emit(cfg, out, fmt == "json" ? all.dump(2) + "\n" : text);
    return ok ? kOk : kNotBisimilar;
}

}  // namespace

std::vector<long long> parse_values(const std::string &text, int d) {
    std::vector<long long> out;
    if (text.empty()) {
        for (int k = 0; k < d; ++k) {
            out.push_back(k);
        }
        return out;
    }
    try {
        if (const auto dots = text.find(".."); dots != std::string::npos) {
            const long long lo = std::stoll(text.substr(0, dots));
            const long long hi = std::stoll(text.substr(dots + 2));
            if (hi < lo) {
                throw std::invalid_argument("empty range");
            }
            for (long long v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
            return out;
        }
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ',');) {
            out.push_back(std::stoll(item));
        }
    } catch (const std::logic_error &) {
        throw std::invalid_argument("bad value domain '" + text + "' (expected lo..hi or a,b,c)");
    }
    return out;
}

std::vector<qlin::PureState> parse_family(const std::string &text, int d, unsigned long long seed) {
    if (text == "default") {
        return sem::default_family(d, seed);
    }
    if (text == "basis") {
        return sem::basis_family(d);
    }
    if (text == "basis+hadamard") {
        auto out = sem::basis_family(d);
        for (auto &s : sem::hadamard_family(d)) {
            out.push_back(std::move(s));
        }
        return out;
    }
    if (text.rfind("random:", 0) == 0) {
        const auto colon = text.find(':', 7);
        try {
            const int k = std::stoi(text.substr(7, colon == std::string::npos ? std::string::npos : colon - 7));
            const auto s = colon == std::string::npos ? seed : std::stoull(text.substr(colon + 1));
            if (k > 0) {
                return sem::random_family(d, k, s);
            }
        } catch (const std::logic_error &) {
        }
    }
    throw std::invalid_argument("unknown input family '" + text +
                                "' (expected basis, basis+hadamard, random:k:seed or default)");
}

int execute(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        if (cfg.max_nodes == 0) {
            throw std::invalid_argument("--max-nodes must be positive");
        }
        if (cfg.command == "parse") {
            return cmd_parse(cfg, out);
        }
        if (cfg.command == "typecheck") {
            return cmd_typecheck(cfg, out);
        }
        if (cfg.command == "run") {
            return cmd_run(cfg, out);
        }
        if (cfg.command == "lts") {
            return cmd_lts(cfg, out);
        }
        if (cfg.command == "equiv") {
            return cmd_equiv(cfg, out);
        }
        if (cfg.command == "teleport-demo") {
            return cmd_teleport_demo(cfg, out);
        }
        err << "error: unknown command " << cfg.command << "\n";
        return kUsage;
    } catch (const IoError &e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const lang::ParseError &e) {
        err << "syntax error: " << e.what() << "\n";
        return kSyntaxError;
    } catch (const lang::TypeError &e) {
        err << "type error: " << e.what() << "\n";
        return kTypeError;
    } catch (const lang::ExpansionError &e) {
        err << "type error: " << e.what() << "\n";
        return kTypeError;
    } catch (const sem::NodeBudgetExceeded &e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kBudgetExceeded;
    } catch (const equiv::InterfaceMismatch &e) {
        err << "interface mismatch: " << e.what() << "\n";
        return kInterfaceMismatch;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Model checker for quantum process programs (.cqp)", "cqp"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML file with default flag values; flags on the command line win");

    RunConfig cfg;
    app.add_option("--dim", cfg.dim, "Qudit dimension, overriding the file's dim header")
        ->check(CLI::Range(2, 64));
    app.add_option("--values", cfg.values, "Value domain for received integers: lo..hi or a,b,c");
    app.add_option("--family", cfg.family, "Input states: basis | basis+hadamard | random:k:seed | default");
    app.add_option("--format", cfg.format, "Output format: text | json | dot")
        ->check(CLI::IsMember({"text", "json", "dot"}));
    app.add_option("--max-nodes", cfg.max_nodes, "Node budget for state-space exploration");
    app.add_option("--seed", cfg.seed, "Seed for random input states and sampled runs");
    app.add_option("--out", cfg.out, "Write the result to this file instead of stdout");
    app.add_flag("--sequential", cfg.sequential, "Check input states one after another");

    auto file_cmd = [&](const char *name, const char *help) {
        auto *sub = app.add_subcommand(name, help)->fallthrough();
        sub->add_option("file", cfg.inputs, "Program file")->required()->expected(1);
        return sub;
    };
    file_cmd("parse", "Parse a program and print it back");
    file_cmd("typecheck", "Check typing and qudit ownership");
    file_cmd("run", "Sample one execution");
    file_cmd("lts", "Export the labelled transition system");
    auto *eq = app.add_subcommand("equiv", "Check two programs for full bisimilarity")->fallthrough();
    eq->add_option("files", cfg.inputs, "Two program files")->required()->expected(2);
    auto *demo = app.add_subcommand("teleport-demo", "Verify the built-in teleportation protocol")->fallthrough();
    demo->add_option("dims", cfg.dims, "Dimensions to check (default 2 3)")->check(CLI::Range(2, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::FileError &e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n" << "run 'cqp --help' for usage\n";
        return kUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return execute(cfg, out, err);
}

}  // namespace cqp::cli
