#include "cqp/lang/subst.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "cqp/overloaded.hpp"

namespace cqp::lang {

namespace {

std::string fresh_name(const std::string &base) {
    static std::atomic<long> counter{0};
    return base + "#" + std::to_string(++counter);
}

void merge_first(std::map<std::string, SourcePos> &into, const std::map<std::string, SourcePos> &from) {
    for (const auto &[k, v] : from) {
        into.emplace(k, v);
    }
}

bool changed(const std::vector<ExprPtr> &a, const std::vector<ExprPtr> &b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            return true;
        }
    }
    return false;
}

std::vector<ExprPtr> substitute_all(const std::vector<ExprPtr> &items, const Substitution &s) {
    std::vector<ExprPtr> out;
    out.reserve(items.size());
    for (const auto &e : items) {
        out.push_back(substitute(e, s));
    }
    return out;
}

// Restricts `s` under binders `names`, renaming any binder that would
// capture a free variable of a replacement. Returns the possibly renamed
// binder names.
std::vector<std::string> enter_binders(const std::vector<std::string> &names, Substitution &s) {
    for (const auto &n : names) {
        s.erase(n);
    }
    std::set<std::string> captured;
    for (const auto &[_, repl] : s) {
        for (const auto &[fv, _pos] : free_vars(repl)) {
            captured.insert(fv);
        }
    }
    std::vector<std::string> out = names;
    for (auto &n : out) {
        if (captured.contains(n)) {
            const auto renamed = fresh_name(n);
            s[n] = var(renamed);
            n = renamed;
        }
    }
    return out;
}

std::map<std::string, SourcePos> free_vars_impl(const ProcPtr &p, const Program *prog,
                                                 std::vector<std::string> &stack);

std::map<std::string, SourcePos> without(std::map<std::string, SourcePos> m, const std::vector<std::string> &names) {
    for (const auto &n : names) {
        m.erase(n);
    }
    return m;
}

std::map<std::string, SourcePos> free_vars_impl(const ProcPtr &p, const Program *prog,
                                                 std::vector<std::string> &stack) {
    std::map<std::string, SourcePos> out;
    std::visit(overloaded{
                   [&](const proc::Nil &) {},
                   [&](const proc::Par &x) {
                       merge_first(out, free_vars_impl(x.left, prog, stack));
                       merge_first(out, free_vars_impl(x.right, prog, stack));
                   },
                   [&](const proc::Sum &x) {
                       merge_first(out, free_vars_impl(x.left, prog, stack));
                       merge_first(out, free_vars_impl(x.right, prog, stack));
                   },
                   [&](const proc::Input &x) {
                       merge_first(out, free_vars(x.chan));
                       std::vector<std::string> names;
                       for (const auto &b : x.binders) {
                           names.push_back(b.name);
                       }
                       merge_first(out, without(free_vars_impl(x.body, prog, stack), names));
                   },
                   [&](const proc::Output &x) {
                       merge_first(out, free_vars(x.chan));
                       for (const auto &e : x.payload) {
                           merge_first(out, free_vars(e));
                       }
                       merge_first(out, free_vars_impl(x.body, prog, stack));
                   },
                   [&](const proc::Action &x) {
                       merge_first(out, free_vars(x.expr));
                       merge_first(out, free_vars_impl(x.body, prog, stack));
                   },
                   [&](const proc::Eval &x) {
                       merge_first(out, free_vars(x.expr));
                       merge_first(out, free_vars_impl(x.body, prog, stack));
                   },
                   [&](const proc::QditDecl &x) {
                       merge_first(out, without(free_vars_impl(x.body, prog, stack), x.names));
                   },
                   [&](const proc::NewChan &x) {
                       merge_first(out, without(free_vars_impl(x.body, prog, stack), {x.name}));
                   },
                   [&](const proc::Call &x) {
                       for (const auto &e : x.args) {
                           merge_first(out, free_vars(e));
                       }
                       if (prog && std::find(stack.begin(), stack.end(), x.name) == stack.end() &&
                           prog->find(x.name)) {
                           stack.push_back(x.name);
                           merge_first(out, free_vars_impl(instantiate_call(*prog, x, p->pos), prog, stack));
                           stack.pop_back();
                       }
                   },
               },
               p->node);
    return out;
}

ProcPtr expand(const Program &prog, const ProcPtr &p, std::vector<std::string> &stack) {
    return std::visit(
        overloaded{
            [&](const proc::Nil &) { return p; },
            [&](const proc::Par &x) {
                return make_proc(proc::Par{expand(prog, x.left, stack), expand(prog, x.right, stack)}, p->pos);
            },
            [&](const proc::Sum &x) {
                return make_proc(proc::Sum{expand(prog, x.left, stack), expand(prog, x.right, stack)}, p->pos);
            },
            [&](const proc::Input &x) {
                return make_proc(proc::Input{x.chan, x.binders, expand(prog, x.body, stack)}, p->pos);
            },
            [&](const proc::Output &x) {
                return make_proc(proc::Output{x.chan, x.payload, expand(prog, x.body, stack)}, p->pos);
            },
            [&](const proc::Action &x) {
                return make_proc(proc::Action{x.expr, expand(prog, x.body, stack)}, p->pos);
            },
            [&](const proc::Eval &x) { return make_proc(proc::Eval{x.expr, expand(prog, x.body, stack)}, p->pos); },
            [&](const proc::QditDecl &x) {
                return make_proc(proc::QditDecl{x.names, expand(prog, x.body, stack)}, p->pos);
            },
            [&](const proc::NewChan &x) {
                return make_proc(proc::NewChan{x.name, x.type, expand(prog, x.body, stack)}, p->pos);
            },
            [&](const proc::Call &x) {
                if (std::find(stack.begin(), stack.end(), x.name) != stack.end()) {
                    throw ExpansionError(p->pos, "recursive definition '" + x.name + "' is not supported");
                }
                stack.push_back(x.name);
                auto body = expand(prog, instantiate_call(prog, x, p->pos), stack);
                stack.pop_back();
                return body;
            },
        },
        p->node);
}

}  // namespace

ExprPtr substitute(const ExprPtr &e, const Substitution &s) {
    if (s.empty()) {
        return e;
    }
    return std::visit(
        overloaded{
            [&](const expr::Var &x) -> ExprPtr {
                const auto it = s.find(x.name);
                return it == s.end() ? e : it->second;
            },
            [&](const expr::Measure &x) -> ExprPtr {
                auto targets = substitute_all(x.targets, s);
                return changed(targets, x.targets) ? make_expr(expr::Measure{std::move(targets)}, e->pos) : e;
            },
            [&](const expr::ApplyGate &x) -> ExprPtr {
                auto targets = substitute_all(x.targets, s);
                auto gate = substitute(x.gate, s);
                auto power = substitute(x.power, s);
                if (!changed(targets, x.targets) && gate == x.gate && power == x.power) {
                    return e;
                }
                return make_expr(expr::ApplyGate{std::move(targets), std::move(gate), std::move(power)}, e->pos);
            },
            [&](const expr::Plus &x) -> ExprPtr {
                auto l = substitute(x.lhs, s);
                auto r = substitute(x.rhs, s);
                return l == x.lhs && r == x.rhs ? e : make_expr(expr::Plus{std::move(l), std::move(r)}, e->pos);
            },
            [&](const expr::Neg &x) -> ExprPtr {
                auto o = substitute(x.operand, s);
                return o == x.operand ? e : make_expr(expr::Neg{std::move(o)}, e->pos);
            },
            [&](const auto &) -> ExprPtr { return e; },
        },
        e->node);
}

ProcPtr substitute(const ProcPtr &p, const Substitution &s) {
    if (s.empty()) {
        return p;
    }
    return std::visit(
        overloaded{
            [&](const proc::Nil &) { return p; },
            [&](const proc::Par &x) {
                auto l = substitute(x.left, s);
                auto r = substitute(x.right, s);
                return l == x.left && r == x.right ? p : make_proc(proc::Par{std::move(l), std::move(r)}, p->pos);
            },
            [&](const proc::Sum &x) {
                auto l = substitute(x.left, s);
                auto r = substitute(x.right, s);
                return l == x.left && r == x.right ? p : make_proc(proc::Sum{std::move(l), std::move(r)}, p->pos);
            },
            [&](const proc::Input &x) {
                auto chan = substitute(x.chan, s);
                std::vector<std::string> names;
                for (const auto &b : x.binders) {
                    names.push_back(b.name);
                }
                Substitution inner = s;
                const auto renamed = enter_binders(names, inner);
                auto body = substitute(x.body, inner);
                auto binders = x.binders;
                for (std::size_t i = 0; i < binders.size(); ++i) {
                    binders[i].name = renamed[i];
                }
                if (chan == x.chan && body == x.body && binders == x.binders) {
                    return p;
                }
                return make_proc(proc::Input{std::move(chan), std::move(binders), std::move(body)}, p->pos);
            },
            [&](const proc::Output &x) {
                auto chan = substitute(x.chan, s);
                auto payload = substitute_all(x.payload, s);
                auto body = substitute(x.body, s);
                if (chan == x.chan && !changed(payload, x.payload) && body == x.body) {
                    return p;
                }
                return make_proc(proc::Output{std::move(chan), std::move(payload), std::move(body)}, p->pos);
            },
            [&](const proc::Action &x) {
                auto e = substitute(x.expr, s);
                auto body = substitute(x.body, s);
                return e == x.expr && body == x.body ? p : make_proc(proc::Action{std::move(e), std::move(body)}, p->pos);
            },
            [&](const proc::Eval &x) {
                auto e = substitute(x.expr, s);
                auto body = substitute(x.body, s);
                return e == x.expr && body == x.body ? p : make_proc(proc::Eval{std::move(e), std::move(body)}, p->pos);
            },
            [&](const proc::QditDecl &x) {
                Substitution inner = s;
                auto names = enter_binders(x.names, inner);
                auto body = substitute(x.body, inner);
                return body == x.body && names == x.names
                           ? p
                           : make_proc(proc::QditDecl{std::move(names), std::move(body)}, p->pos);
            },
            [&](const proc::NewChan &x) {
                Substitution inner = s;
                auto names = enter_binders({x.name}, inner);
                auto body = substitute(x.body, inner);
                return body == x.body && names.front() == x.name
                           ? p
                           : make_proc(proc::NewChan{names.front(), x.type, std::move(body)}, p->pos);
            },
            [&](const proc::Call &x) {
                auto args = substitute_all(x.args, s);
                return changed(args, x.args) ? make_proc(proc::Call{x.name, std::move(args)}, p->pos) : p;
            },
        },
        p->node);
}

std::map<std::string, SourcePos> free_vars(const ExprPtr &e) {
    std::map<std::string, SourcePos> out;
    std::visit(overloaded{
                   [&](const expr::Var &x) { out.emplace(x.name, e->pos); },
                   [&](const expr::Measure &x) {
                       for (const auto &t : x.targets) {
                           merge_first(out, free_vars(t));
                       }
                   },
                   [&](const expr::ApplyGate &x) {
                       for (const auto &t : x.targets) {
                           merge_first(out, free_vars(t));
                       }
                       merge_first(out, free_vars(x.gate));
                       merge_first(out, free_vars(x.power));
                   },
                   [&](const expr::Plus &x) {
                       merge_first(out, free_vars(x.lhs));
                       merge_first(out, free_vars(x.rhs));
                   },
                   [&](const expr::Neg &x) { merge_first(out, free_vars(x.operand)); },
                   [&](const auto &) {},
               },
               e->node);
    return out;
}

std::map<std::string, SourcePos> free_vars(const ProcPtr &p, const Program *prog) {
    std::vector<std::string> stack;
    return free_vars_impl(p, prog, stack);
}

ProcPtr instantiate_call(const Program &prog, const proc::Call &call, SourcePos pos) {
    const Definition *def = prog.find(call.name);
    if (!def) {
        throw ExpansionError(pos, "unknown definition '" + call.name + "'");
    }
    if (def->params.size() != call.args.size()) {
        throw ExpansionError(pos, "'" + call.name + "' expects " + std::to_string(def->params.size()) +
                                      " arguments, got " + std::to_string(call.args.size()));
    }
    Substitution s;
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        s[def->params[i].name] = call.args[i];
    }
    return substitute(def->body, s);
}

ProcPtr expand_main(const Program &prog) {
    std::vector<std::string> stack;
    return expand(prog, prog.main, stack);
}

}  // namespace cqp::lang
