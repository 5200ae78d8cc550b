#include "cqp/lang/pretty.hpp"

#include "cqp/overloaded.hpp"

namespace cqp::lang {

namespace {

std::string join(const std::vector<ExprPtr> &items, const char *sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += pretty(items[i]);
    }
    return out;
}

bool is_atom(const Expr &e) {
    return e.as<expr::Var>() || e.as<expr::QuditRef>() || e.as<expr::ChanRef>() || e.as<expr::GateLit>() ||
           e.as<expr::MixRef>() || e.as<expr::Unit>() || (e.as<expr::IntLit>() && e.as<expr::IntLit>()->value >= 0);
}

// Operand of unary minus or of `measure` without parentheses.
std::string unary_operand(const Expr &e) {
    if (is_atom(e) || e.as<expr::Neg>()) {
        return pretty(e);
    }
    return "(" + pretty(e) + ")";
}

std::string power_text(const Expr &p) {
    if (const auto *lit = p.as<expr::IntLit>()) {
        return lit->value == 1 ? "" : "^" + std::to_string(lit->value);
    }
    if (p.as<expr::Var>() || p.as<expr::MixRef>()) {
        return "^" + pretty(p);
    }
    if (const auto *neg = p.as<expr::Neg>()) {
        if (neg->operand->as<expr::Var>() || neg->operand->as<expr::MixRef>()) {
            return "^-" + pretty(neg->operand);
        }
        return "^-(" + pretty(neg->operand) + ")";
    }
    return "^(" + pretty(p) + ")";
}

enum class Level { Par, Sum, Prefix };

std::string process_at(const Process &p, Level level);

std::string process_at(const ProcPtr &p, Level level) {
    return process_at(*p, level);
}

std::string process_at(const Process &p, Level level) {
    return std::visit(
        overloaded{
            [&](const proc::Nil &) -> std::string { return "0"; },
            [&](const proc::Par &x) -> std::string {
                const auto right = x.right->as<proc::Par>() ? "(" + process_at(x.right, Level::Par) + ")"
                                                             : process_at(x.right, Level::Sum);
                auto text = process_at(x.left, Level::Par) + " | " + right;
                return level == Level::Par ? text : "(" + text + ")";
            },
            [&](const proc::Sum &x) -> std::string {
                const auto right = x.right->as<proc::Sum>() ? "(" + process_at(x.right, Level::Sum) + ")"
                                                             : process_at(x.right, Level::Prefix);
                auto text = process_at(x.left, Level::Sum) + " + " + right;
                return level == Level::Prefix ? "(" + text + ")" : text;
            },
            [&](const proc::Input &x) -> std::string {
                std::string binders;
                for (std::size_t i = 0; i < x.binders.size(); ++i) {
                    if (i > 0) {
                        binders += ", ";
                    }
                    binders += x.binders[i].name + ":" + pretty(x.binders[i].type);
                }
                return pretty(x.chan) + "?[" + binders + "]." + process_at(x.body, Level::Prefix);
            },
            [&](const proc::Output &x) -> std::string {
                return pretty(x.chan) + "![" + join(x.payload, ", ") + "]." + process_at(x.body, Level::Prefix);
            },
            [&](const proc::Action &x) -> std::string {
                return "{" + pretty(x.expr) + "}." + process_at(x.body, Level::Prefix);
            },
            [&](const proc::Eval &x) -> std::string {
                return "[" + pretty(x.expr) + "]." + process_at(x.body, Level::Prefix);
            },
            [&](const proc::QditDecl &x) -> std::string {
                std::string names;
                for (std::size_t i = 0; i < x.names.size(); ++i) {
                    names += (i > 0 ? "," : "") + x.names[i];
                }
                return "(qdit " + names + ")" + process_at(x.body, Level::Prefix);
            },
            [&](const proc::NewChan &x) -> std::string {
                return "(new " + x.name + ":" + pretty(x.type) + ")" + process_at(x.body, Level::Prefix);
            },
            [&](const proc::Call &x) -> std::string { return x.name + "(" + join(x.args, ",") + ")"; },
        },
        p.node);
}

}  // namespace

std::string pretty(const TypeExpr &t) {
    switch (t.kind) {
    case TypeExpr::Kind::Int:
        return "Int";
    case TypeExpr::Kind::Qdit:
        return "Qdit";
    case TypeExpr::Kind::Op:
        return "Op(" + std::to_string(t.arity) + ")";
    case TypeExpr::Kind::Chan: {
        std::string out = "^[";
        for (std::size_t i = 0; i < t.payload.size(); ++i) {
            out += (i > 0 ? "," : "") + pretty(t.payload[i]);
        }
        return out + "]";
    }
    }
    return "?";
}

std::string pretty(const ExprPtr &e) {
    return e ? pretty(*e) : std::string("<null>");
}

std::string pretty(const Expr &e) {
    return std::visit(
        overloaded{
            [](const expr::IntLit &x) -> std::string { return std::to_string(x.value); },
            [](const expr::Var &x) -> std::string { return x.name; },
            [](const expr::GateLit &x) -> std::string { return std::string(gate_name(x.gate)); },
            [](const expr::Measure &x) -> std::string {
                if (x.targets.size() == 1 && is_atom(*x.targets.front())) {
                    return "measure " + pretty(x.targets.front());
                }
                return "measure(" + join(x.targets, ", ") + ")";
            },
            [](const expr::ApplyGate &x) -> std::string {
                return join(x.targets, ",") + " *= " + pretty(x.gate) + power_text(*x.power);
            },
            [](const expr::Plus &x) -> std::string {
                const bool wrap = x.rhs->as<expr::Plus>() != nullptr;
                return pretty(x.lhs) + " + " + (wrap ? "(" + pretty(x.rhs) + ")" : pretty(x.rhs));
            },
            [](const expr::Neg &x) -> std::string {
                if (x.operand->as<expr::IntLit>()) {
                    return "-(" + pretty(x.operand) + ")";
                }
                return "-" + unary_operand(*x.operand);
            },
            [](const expr::QuditRef &x) -> std::string { return x.name; },
            [](const expr::ChanRef &x) -> std::string { return x.name; },
            [](const expr::MixRef &x) -> std::string { return "$" + std::to_string(x.index); },
            [](const expr::Unit &) -> std::string { return "()"; },
        },
        e.node);
}

std::string pretty(const ProcPtr &p) {
    return p ? pretty(*p) : std::string("<null>");
}

std::string pretty(const Process &p) {
    return process_at(p, Level::Par);
}

std::string pretty(const Program &p) {
    std::string out = "dim " + std::to_string(p.dim) + ";\n";
    for (const auto &def : p.definitions) {
        out += def.name + "(";
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            out += (i > 0 ? ", " : "") + def.params[i].name + ":" + pretty(def.params[i].type);
        }
        out += ") = " + pretty(def.body) + "\n";
    }
    out += "main = " + pretty(p.main) + "\n";
    return out;
}

}  // namespace cqp::lang
