#include "term.hpp"

#include "cqp/overloaded.hpp"

namespace cqp::sem::detail {

using namespace lang;

namespace {

std::vector<ExprPtr> map_all(const std::vector<ExprPtr> &items, const LeafFn &f, bool &changed) {
    std::vector<ExprPtr> out;
    out.reserve(items.size());
    for (const auto &e : items) {
        out.push_back(map_leaves(e, f));
        changed = changed || out.back() != e;
    }
    return out;
}

}  // namespace

ExprPtr map_leaves(const ExprPtr &e, const LeafFn &f) {
    return std::visit(
        overloaded{
            [&](const expr::Measure &x) -> ExprPtr {
                bool changed = false;
                auto targets = map_all(x.targets, f, changed);
                return changed ? make_expr(expr::Measure{std::move(targets)}, e->pos) : e;
            },
            [&](const expr::ApplyGate &x) -> ExprPtr {
                bool changed = false;
                auto targets = map_all(x.targets, f, changed);
                auto gate = map_leaves(x.gate, f);
                auto power = map_leaves(x.power, f);
                if (!changed && gate == x.gate && power == x.power) {
                    return e;
                }
                return make_expr(expr::ApplyGate{std::move(targets), std::move(gate), std::move(power)}, e->pos);
            },
            [&](const expr::Plus &x) -> ExprPtr {
                auto l = map_leaves(x.lhs, f);
                auto r = map_leaves(x.rhs, f);
                return l == x.lhs && r == x.rhs ? e : make_expr(expr::Plus{std::move(l), std::move(r)}, e->pos);
            },
            [&](const expr::Neg &x) -> ExprPtr {
                auto o = map_leaves(x.operand, f);
                return o == x.operand ? e : make_expr(expr::Neg{std::move(o)}, e->pos);
            },
            [&](const auto &) -> ExprPtr {
                auto r = f(e);
                return r ? r : e;
            },
        },
        e->node);
}

ProcPtr map_leaves(const ProcPtr &p, const LeafFn &f) {
    return std::visit(
        overloaded{
            [&](const proc::Nil &) { return p; },
            [&](const proc::Par &x) {
                auto l = map_leaves(x.left, f);
                auto r = map_leaves(x.right, f);
                return l == x.left && r == x.right ? p : make_proc(proc::Par{std::move(l), std::move(r)}, p->pos);
            },
            [&](const proc::Sum &x) {
                auto l = map_leaves(x.left, f);
                auto r = map_leaves(x.right, f);
                return l == x.left && r == x.right ? p : make_proc(proc::Sum{std::move(l), std::move(r)}, p->pos);
            },
            [&](const proc::Input &x) {
                auto chan = map_leaves(x.chan, f);
                auto body = map_leaves(x.body, f);
                return chan == x.chan && body == x.body
                           ? p
                           : make_proc(proc::Input{std::move(chan), x.binders, std::move(body)}, p->pos);
            },
            [&](const proc::Output &x) {
                bool changed = false;
                auto chan = map_leaves(x.chan, f);
                auto payload = map_all(x.payload, f, changed);
                auto body = map_leaves(x.body, f);
                if (!changed && chan == x.chan && body == x.body) {
                    return p;
                }
                return make_proc(proc::Output{std::move(chan), std::move(payload), std::move(body)}, p->pos);
            },
            [&](const proc::Action &x) {
                auto e = map_leaves(x.expr, f);
                auto body = map_leaves(x.body, f);
                return e == x.expr && body == x.body ? p : make_proc(proc::Action{std::move(e), std::move(body)}, p->pos);
            },
            [&](const proc::Eval &x) {
                auto e = map_leaves(x.expr, f);
                auto body = map_leaves(x.body, f);
                return e == x.expr && body == x.body ? p : make_proc(proc::Eval{std::move(e), std::move(body)}, p->pos);
            },
            [&](const proc::QditDecl &x) {
                auto body = map_leaves(x.body, f);
                return body == x.body ? p : make_proc(proc::QditDecl{x.names, std::move(body)}, p->pos);
            },
            [&](const proc::NewChan &x) {
                auto body = map_leaves(x.body, f);
                return body == x.body ? p : make_proc(proc::NewChan{x.name, x.type, std::move(body)}, p->pos);
            },
            [&](const proc::Call &x) {
                bool changed = false;
                auto args = map_all(x.args, f, changed);
                return changed ? make_proc(proc::Call{x.name, std::move(args)}, p->pos) : p;
            },
        },
        p->node);
}

void for_each_leaf(const ExprPtr &e, const std::function<void(const Expr &)> &f) {
    std::visit(overloaded{
                   [&](const expr::Measure &x) {
                       for (const auto &t : x.targets) {
                           for_each_leaf(t, f);
                       }
                   },
                   [&](const expr::ApplyGate &x) {
                       for (const auto &t : x.targets) {
                           for_each_leaf(t, f);
                       }
                       for_each_leaf(x.gate, f);
                       for_each_leaf(x.power, f);
                   },
                   [&](const expr::Plus &x) {
                       for_each_leaf(x.lhs, f);
                       for_each_leaf(x.rhs, f);
                   },
                   [&](const expr::Neg &x) { for_each_leaf(x.operand, f); },
                   [&](const auto &) { f(*e); },
               },
               e->node);
}

void for_each_leaf(const ProcPtr &p, const std::function<void(const Expr &)> &f) {
    std::visit(overloaded{
                   [&](const proc::Nil &) {},
                   [&](const proc::Par &x) {
                       for_each_leaf(x.left, f);
                       for_each_leaf(x.right, f);
                   },
                   [&](const proc::Sum &x) {
                       for_each_leaf(x.left, f);
                       for_each_leaf(x.right, f);
                   },
                   [&](const proc::Input &x) {
                       for_each_leaf(x.chan, f);
                       for_each_leaf(x.body, f);
                   },
                   [&](const proc::Output &x) {
                       for_each_leaf(x.chan, f);
                       for (const auto &e : x.payload) {
                           for_each_leaf(e, f);
                       }
                       for_each_leaf(x.body, f);
                   },
                   [&](const proc::Action &x) {
                       for_each_leaf(x.expr, f);
                       for_each_leaf(x.body, f);
                   },
                   [&](const proc::Eval &x) {
                       for_each_leaf(x.expr, f);
                       for_each_leaf(x.body, f);
                   },
                   [&](const proc::QditDecl &x) { for_each_leaf(x.body, f); },
                   [&](const proc::NewChan &x) { for_each_leaf(x.body, f); },
                   [&](const proc::Call &x) {
                       for (const auto &e : x.args) {
                           for_each_leaf(e, f);
                       }
                   },
               },
               p->node);
}

ExprPtr qudit_ref(std::string name) {
    return make_expr(expr::QuditRef{std::move(name)});
}

ExprPtr chan_ref(std::string name) {
    return make_expr(expr::ChanRef{std::move(name)});
}

ExprPtr mix_ref(int index) {
    return make_expr(expr::MixRef{index});
}

ExprPtr unit_value() {
    static const ExprPtr shared = make_expr(expr::Unit{});
    return shared;
}

}  // namespace cqp::sem::detail
