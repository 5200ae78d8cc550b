#include "cqp/lang/ast.hpp"
#include "cqp/overloaded.hpp"

#include <array>

namespace cqp::lang {

std::string SourcePos::str() const {
    return std::to_string(line) + ":" + std::to_string(column);
}

namespace {

struct GateInfo {
    GateKind kind;
    std::string_view name;
    int arity;
};

constexpr std::array<GateInfo, 5> kGates{{
    {GateKind::H, "H", 1},
    {GateKind::X, "X", 1},
    {GateKind::Z, "Z", 1},
    {GateKind::RC, "RC", 2},
    {GateKind::LC, "LC", 2},
}};

bool equal_all(const std::vector<ExprPtr> &a, const std::vector<ExprPtr> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!equal(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

int gate_arity(GateKind g) {
    return kGates[static_cast<std::size_t>(g)].arity;
}

std::string_view gate_name(GateKind g) {
    return kGates[static_cast<std::size_t>(g)].name;
}

std::optional<GateKind> gate_from_name(std::string_view name) {
    for (const auto &g : kGates) {
        if (g.name == name) {
            return g.kind;
        }
    }
    return std::nullopt;
}

bool Expr::is_value() const {
    return std::holds_alternative<expr::IntLit>(node) || std::holds_alternative<expr::GateLit>(node) ||
           std::holds_alternative<expr::QuditRef>(node) || std::holds_alternative<expr::ChanRef>(node) ||
           std::holds_alternative<expr::MixRef>(node) || std::holds_alternative<expr::Unit>(node);
}

ExprPtr make_expr(Expr::Node node, SourcePos pos) {
    return std::make_shared<const Expr>(Expr{std::move(node), pos});
}

ExprPtr int_lit(long long v, SourcePos pos) {
    return make_expr(expr::IntLit{v}, pos);
}

ExprPtr var(std::string name, SourcePos pos) {
    return make_expr(expr::Var{std::move(name)}, pos);
}

ExprPtr gate_lit(GateKind g, SourcePos pos) {
    return make_expr(expr::GateLit{g}, pos);
}

ProcPtr make_proc(Process::Node node, SourcePos pos) {
    return std::make_shared<const Process>(Process{std::move(node), pos});
}

ProcPtr nil() {
    static const ProcPtr shared = make_proc(proc::Nil{});
    return shared;
}

const Definition *Program::find(std::string_view name) const {
    for (const auto &d : definitions) {
        if (d.name == name) {
            return &d;
        }
    }
    return nullptr;
}

bool equal(const ExprPtr &a, const ExprPtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b) {
        return false;
    }
    return equal(*a, *b);
}

bool equal(const Expr &a, const Expr &b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        overloaded{
            [&](const expr::IntLit &x) { return x.value == std::get<expr::IntLit>(b.node).value; },
            [&](const expr::Var &x) { return x.name == std::get<expr::Var>(b.node).name; },
            [&](const expr::GateLit &x) { return x.gate == std::get<expr::GateLit>(b.node).gate; },
            [&](const expr::Measure &x) { return equal_all(x.targets, std::get<expr::Measure>(b.node).targets); },
            [&](const expr::ApplyGate &x) {
                const auto &y = std::get<expr::ApplyGate>(b.node);
                return equal_all(x.targets, y.targets) && equal(x.gate, y.gate) && equal(x.power, y.power);
            },
            [&](const expr::Plus &x) {
                const auto &y = std::get<expr::Plus>(b.node);
                return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            },
            [&](const expr::Neg &x) { return equal(x.operand, std::get<expr::Neg>(b.node).operand); },
            [&](const expr::QuditRef &x) { return x.name == std::get<expr::QuditRef>(b.node).name; },
            [&](const expr::ChanRef &x) { return x.name == std::get<expr::ChanRef>(b.node).name; },
            [&](const expr::MixRef &x) { return x.index == std::get<expr::MixRef>(b.node).index; },
            [&](const expr::Unit &) { return true; },
        },
        a.node);
}

bool equal(const ProcPtr &a, const ProcPtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b) {
        return false;
    }
    return equal(*a, *b);
}

bool equal(const Process &a, const Process &b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        overloaded{
            [&](const proc::Nil &) { return true; },
            [&](const proc::Par &x) {
                const auto &y = std::get<proc::Par>(b.node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const proc::Sum &x) {
                const auto &y = std::get<proc::Sum>(b.node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const proc::Input &x) {
                const auto &y = std::get<proc::Input>(b.node);
                return equal(x.chan, y.chan) && x.binders == y.binders && equal(x.body, y.body);
            },
            [&](const proc::Output &x) {
                const auto &y = std::get<proc::Output>(b.node);
                return equal(x.chan, y.chan) && equal_all(x.payload, y.payload) && equal(x.body, y.body);
            },
            [&](const proc::Action &x) {
                const auto &y = std::get<proc::Action>(b.node);
                return equal(x.expr, y.expr) && equal(x.body, y.body);
            },
            [&](const proc::Eval &x) {
                const auto &y = std::get<proc::Eval>(b.node);
                return equal(x.expr, y.expr) && equal(x.body, y.body);
            },
            [&](const proc::QditDecl &x) {
                const auto &y = std::get<proc::QditDecl>(b.node);
                return x.names == y.names && equal(x.body, y.body);
            },
            [&](const proc::NewChan &x) {
                const auto &y = std::get<proc::NewChan>(b.node);
                return x.name == y.name && x.type == y.type && equal(x.body, y.body);
            },
            [&](const proc::Call &x) {
                const auto &y = std::get<proc::Call>(b.node);
                return x.name == y.name && equal_all(x.args, y.args);
            },
        },
        a.node);
}

bool equal(const Program &a, const Program &b) {
    if (a.dim != b.dim || a.definitions.size() != b.definitions.size() || !equal(a.main, b.main)) {
        return false;
    }
    for (std::size_t i = 0; i < a.definitions.size(); ++i) {
        const auto &x = a.definitions[i];
        const auto &y = b.definitions[i];
        if (x.name != y.name || x.params != y.params || !equal(x.body, y.body)) {
            return false;
        }
    }
    return true;
}

}  // namespace cqp::lang
