#pragma once

// Abstract syntax of the qudit process calculus, covering both the source
// language and the run-time forms (qudit names, channel names, and
// placeholders for measured values) introduced during execution.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cqp::lang {

struct SourcePos {
    int line = 0;
    int column = 0;

    std::string str() const;
};

struct TypeExpr {
    enum class Kind { Int, Qdit, Chan, Op };

    Kind kind = Kind::Int;
    std::vector<TypeExpr> payload;  // Chan only
    int arity = 0;                  // Op only

    static TypeExpr integer() { return {Kind::Int, {}, 0}; }
    static TypeExpr qdit() { return {Kind::Qdit, {}, 0}; }
    static TypeExpr chan(std::vector<TypeExpr> payload) { return {Kind::Chan, std::move(payload), 0}; }
    static TypeExpr op(int arity) { return {Kind::Op, {}, arity}; }

    bool operator==(const TypeExpr &) const = default;
};

enum class GateKind { H, X, Z, RC, LC };

int gate_arity(GateKind g);
std::string_view gate_name(GateKind g);
std::optional<GateKind> gate_from_name(std::string_view name);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace expr {
struct IntLit {
    long long value = 0;
};
struct Var {
    std::string name;
};
struct GateLit {
    GateKind gate = GateKind::H;
};
struct Measure {
    std::vector<ExprPtr> targets;
};
struct ApplyGate {
    std::vector<ExprPtr> targets;
    ExprPtr gate;
    ExprPtr power;
};
struct Plus {
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Neg {
    ExprPtr operand;
};
// Run-time forms.
struct QuditRef {
    std::string name;
};
struct ChanRef {
    std::string name;
};
/// Placeholder for a measured value that still differs between the
/// components of a mixed configuration.
struct MixRef {
    int index = 0;
};
struct Unit {};
}  // namespace expr

struct Expr {
    using Node = std::variant<expr::IntLit, expr::Var, expr::GateLit, expr::Measure, expr::ApplyGate, expr::Plus,
                              expr::Neg, expr::QuditRef, expr::ChanRef, expr::MixRef, expr::Unit>;
    Node node;
    SourcePos pos;

    template <typename T>
    const T *as() const {
        return std::get_if<T>(&node);
    }
    bool is_value() const;
};

ExprPtr make_expr(Expr::Node node, SourcePos pos = {});
ExprPtr int_lit(long long v, SourcePos pos = {});
ExprPtr var(std::string name, SourcePos pos = {});
ExprPtr gate_lit(GateKind g, SourcePos pos = {});

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct Binder {
    std::string name;
    TypeExpr type;
    bool operator==(const Binder &) const = default;
};

namespace proc {
struct Nil {};
struct Par {
    ProcPtr left;
    ProcPtr right;
};
struct Sum {
    ProcPtr left;
    ProcPtr right;
};
struct Input {
    ExprPtr chan;
    std::vector<Binder> binders;
    ProcPtr body;
};
struct Output {
    ExprPtr chan;
    std::vector<ExprPtr> payload;
    ProcPtr body;
};
/// {e}.P
struct Action {
    ExprPtr expr;
    ProcPtr body;
};
/// [e].P
struct Eval {
    ExprPtr expr;
    ProcPtr body;
};
struct QditDecl {
    std::vector<std::string> names;
    ProcPtr body;
};
struct NewChan {
    std::string name;
    TypeExpr type;
    ProcPtr body;
};
/// Invocation of a named definition; expanded before execution.
struct Call {
    std::string name;
    std::vector<ExprPtr> args;
};
}  // namespace proc

struct Process {
    using Node = std::variant<proc::Nil, proc::Par, proc::Sum, proc::Input, proc::Output, proc::Action, proc::Eval,
                              proc::QditDecl, proc::NewChan, proc::Call>;
    Node node;
    SourcePos pos;

    template <typename T>
    const T *as() const {
        return std::get_if<T>(&node);
    }
};

ProcPtr make_proc(Process::Node node, SourcePos pos = {});
ProcPtr nil();

struct Param {
    std::string name;
    TypeExpr type;
    bool operator==(const Param &) const = default;
};

struct Definition {
    std::string name;
    std::vector<Param> params;
    ProcPtr body;
    SourcePos pos;
};

struct Program {
    int dim = 2;
    std::vector<Definition> definitions;
    ProcPtr main;

    const Definition *find(std::string_view name) const;
};

// Structural equality; source positions are ignored.
bool equal(const Expr &a, const Expr &b);
bool equal(const ExprPtr &a, const ExprPtr &b);
bool equal(const Process &a, const Process &b);
bool equal(const ProcPtr &a, const ProcPtr &b);
bool equal(const Program &a, const Program &b);

}  // namespace cqp::lang
