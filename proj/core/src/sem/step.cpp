#include "cqp/sem/step.hpp"

#include <algorithm>
#include <map>

#include "cqp/lang/pretty.hpp"
#include "cqp/lang/subst.hpp"
#include "cqp/overloaded.hpp"
#include "term.hpp"

namespace cqp::sem {

using namespace lang;

namespace {

long long value_in(const Expr &e, const Component &comp) {
    if (const auto *lit = e.as<expr::IntLit>()) {
        return lit->value;
    }
    if (const auto *m = e.as<expr::MixRef>()) {
        return comp.values.at(m->index);
    }
    throw SemanticsError("expected an integer, found " + pretty(e));
}

std::vector<std::string> qudit_targets(const Configuration &c, const std::vector<ExprPtr> &targets) {
    std::vector<std::string> names;
    for (const auto &t : targets) {
        const auto *q = t->as<expr::QuditRef>();
        if (!q) {
            throw SemanticsError("expected a qudit, found " + pretty(t));
        }
        if (std::find(c.owned.begin(), c.owned.end(), q->name) == c.owned.end()) {
            throw SemanticsError("qudit " + q->name + " is not owned");
        }
        if (std::find(names.begin(), names.end(), q->name) != names.end()) {
            throw SemanticsError("qudit " + q->name + " used twice in one operation");
        }
        names.push_back(q->name);
    }
    return names;
}

qlin::Unitary gate_unitary(int d, GateKind g, long long k) {
    switch (g) {
    case GateKind::H:
        return qlin::power(qlin::hadamard(d), ((k % 4) + 4) % 4);
    case GateKind::X:
        return qlin::pauli_x_pow(d, k);
    case GateKind::Z:
        return qlin::pauli_z_pow(d, k);
    case GateKind::RC:
        return qlin::cnot_rshift(d, k);
    case GateKind::LC:
        return qlin::cnot_rshift(d, -k);
    }
    throw SemanticsError("unknown gate");
}

// Applies an integer function componentwise. Literal operands give a
// literal; placeholder operands give a fresh placeholder column.
ExprStep arithmetic(const Configuration &c, const std::vector<ExprPtr> &operands,
                    const std::function<long long(const std::vector<long long> &)> &f) {
    const bool literal = std::all_of(operands.begin(), operands.end(),
                                     [](const ExprPtr &e) { return e->as<expr::IntLit>() != nullptr; });
    ExprStep out{c, nullptr};
    if (literal) {
        std::vector<long long> args;
        for (const auto &e : operands) {
            args.push_back(e->as<expr::IntLit>()->value);
        }
        out.expr = int_lit(f(args));
        return out;
    }
    for (auto &comp : out.config.components) {
        std::vector<long long> args;
        for (const auto &e : operands) {
            args.push_back(value_in(*e, comp));
        }
        comp.values.push_back(f(args));
    }
    out.expr = detail::mix_ref(out.config.columns++);
    return out;
}

ExprStep measure(const Configuration &c, const std::vector<std::string> &targets) {
    ExprStep out{c, nullptr};
    out.config.components.clear();
    for (const auto &comp : c.components) {
        for (auto &branch : qlin::measure_qudits(comp.state, targets)) {
            auto values = comp.values;
            values.push_back(static_cast<long long>(branch.outcome));
            out.config.components.push_back(
                Component{comp.weight * branch.weight, std::move(branch.post_state), std::move(values)});
        }
    }
    out.expr = detail::mix_ref(out.config.columns++);
    return out;
}

ExprStep apply(const Configuration &c, const std::vector<std::string> &targets, GateKind g, const Expr &power) {
    ExprStep out{c, detail::unit_value()};
    std::map<long long, qlin::Unitary> cache;
    for (auto &comp : out.config.components) {
        const long long k = value_in(power, comp);
        auto it = cache.find(k);
        if (it == cache.end()) {
            it = cache.emplace(k, gate_unitary(c.d, g, k)).first;
        }
        comp.state = qlin::apply_gate(comp.state, it->second, targets);
    }
    return out;
}

// Whether the next reduction of `e` reads a placeholder.
bool redex_reads_placeholder(const ExprPtr &e) {
    return std::visit(overloaded{
                          [&](const expr::ApplyGate &x) {
                              if (!x.gate->is_value()) {
                                  return redex_reads_placeholder(x.gate);
                              }
                              if (!x.power->is_value()) {
                                  return redex_reads_placeholder(x.power);
                              }
                              return x.power->as<expr::MixRef>() != nullptr;
                          },
                          [&](const expr::Plus &x) {
                              if (!x.lhs->is_value()) {
                                  return redex_reads_placeholder(x.lhs);
                              }
                              if (!x.rhs->is_value()) {
                                  return redex_reads_placeholder(x.rhs);
                              }
                              return x.lhs->as<expr::MixRef>() != nullptr || x.rhs->as<expr::MixRef>() != nullptr;
                          },
                          [&](const expr::Neg &x) {
                              if (!x.operand->is_value()) {
                                  return redex_reads_placeholder(x.operand);
                              }
                              return x.operand->as<expr::MixRef>() != nullptr;
                          },
                          [&](const auto &) { return false; },
                      },
                      e->node);
}

// A prefix reachable from the top of the term through | and + only.
struct Site {
    std::vector<int> path;
    ProcPtr proc;
};

void collect_sites(const ProcPtr &p, std::vector<int> &path, std::vector<Site> &out) {
    if (const auto *par = p->as<proc::Par>()) {
        path.push_back(0);
        collect_sites(par->left, path, out);
        path.back() = 1;
        collect_sites(par->right, path, out);
        path.pop_back();
    } else if (const auto *sum = p->as<proc::Sum>()) {
        path.push_back(0);
        collect_sites(sum->left, path, out);
        path.back() = 1;
        collect_sites(sum->right, path, out);
        path.pop_back();
    } else if (!p->as<proc::Nil>()) {
        out.push_back({path, p});
    }
}

// Replaces the prefix at `path`; every choice on the way resolves to the
// branch taken.
ProcPtr replace_at(const ProcPtr &p, std::span<const int> path, const ProcPtr &rep) {
    if (path.empty()) {
        return rep;
    }
    if (const auto *par = p->as<proc::Par>()) {
        if (path.front() == 0) {
            return make_proc(proc::Par{replace_at(par->left, path.subspan(1), rep), par->right}, p->pos);
        }
        return make_proc(proc::Par{par->left, replace_at(par->right, path.subspan(1), rep)}, p->pos);
    }
    const auto &sum = std::get<proc::Sum>(p->node);
    return replace_at(path.front() == 0 ? sum.left : sum.right, path.subspan(1), rep);
}

// Two prefixes may synchronise when they sit on different sides of a
// parallel composition.
bool parallel_sites(const ProcPtr &p, std::span<const int> a, std::span<const int> b) {
    const ProcPtr *node = &p;
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) {
        if (const auto *par = (*node)->as<proc::Par>()) {
            node = a[i] == 0 ? &par->left : &par->right;
        } else {
            const auto &sum = std::get<proc::Sum>((*node)->node);
            node = a[i] == 0 ? &sum.left : &sum.right;
        }
        ++i;
    }
    return i < a.size() && i < b.size() && (*node)->as<proc::Par>() != nullptr;
}

ProcPtr replace_two(const ProcPtr &p, std::span<const int> a, const ProcPtr &ra, std::span<const int> b,
                    const ProcPtr &rb) {
    if (a.front() == b.front()) {
        if (const auto *par = p->as<proc::Par>()) {
            if (a.front() == 0) {
                return make_proc(proc::Par{replace_two(par->left, a.subspan(1), ra, b.subspan(1), rb), par->right},
                                 p->pos);
            }
            return make_proc(proc::Par{par->left, replace_two(par->right, a.subspan(1), ra, b.subspan(1), rb)},
                             p->pos);
        }
        const auto &sum = std::get<proc::Sum>(p->node);
        return replace_two(a.front() == 0 ? sum.left : sum.right, a.subspan(1), ra, b.subspan(1), rb);
    }
    const auto &par = std::get<proc::Par>(p->node);
    if (a.front() == 0) {
        return make_proc(proc::Par{replace_at(par.left, a.subspan(1), ra), replace_at(par.right, b.subspan(1), rb)},
                         p->pos);
    }
    return make_proc(proc::Par{replace_at(par.left, b.subspan(1), rb), replace_at(par.right, a.subspan(1), ra)},
                     p->pos);
}

const std::string *channel_of(const ExprPtr &chan) {
    if (const auto *c = chan->as<expr::ChanRef>()) {
        return &c->name;
    }
    throw SemanticsError("expected a channel, found " + pretty(chan));
}

Transition finish(Label label, Configuration c) {
    normalize(c);
    return Transition{std::move(label), std::move(c)};
}

std::vector<Transition> collapse(const Configuration &c) {
    std::map<std::vector<long long>, std::vector<const Component *>> groups;
    for (const auto &comp : c.components) {
        groups[comp.values].push_back(&comp);
    }
    std::vector<Transition> out;
    for (const auto &[values, members] : groups) {
        double total = 0.0;
        for (const auto *m : members) {
            total += m->weight;
        }
        Configuration next = c;
        next.components.clear();
        for (const auto *m : members) {
            next.components.push_back(Component{m->weight / total, m->state, {}});
        }
        next.columns = 0;
        next.term = detail::map_leaves(c.term, [&](const ExprPtr &e) -> ExprPtr {
            if (const auto *m = e->as<expr::MixRef>()) {
                return int_lit(values.at(m->index));
            }
            return nullptr;
        });
        Label label;
        label.kind = Label::Kind::Prob;
        label.prob = total;
        label.outcome = values;
        out.push_back(finish(std::move(label), std::move(next)));
    }
    return out;
}

bool mentions_placeholder(const std::vector<ExprPtr> &payload) {
    return std::any_of(payload.begin(), payload.end(),
                       [](const ExprPtr &e) { return e->as<expr::MixRef>() != nullptr; });
}

// Possible values the environment can supply for one binder.
std::vector<LabelItem> binder_domain(const Binder &b, const InputSpace &inputs, const Configuration &c) {
    std::vector<LabelItem> out;
    switch (b.type.kind) {
    case TypeExpr::Kind::Int:
        for (auto v : inputs.values) {
            out.push_back({LabelItem::Kind::Int, v, {}});
        }
        break;
    case TypeExpr::Kind::Qdit:
        for (std::size_t i = 0; i < inputs.qudit_states.size(); ++i) {
            out.push_back({LabelItem::Kind::Qudit, static_cast<long long>(i), {}});
        }
        break;
    case TypeExpr::Kind::Chan:
        out.push_back({LabelItem::Kind::Channel, 0, "x#" + std::to_string(c.external_channels)});
        break;
    case TypeExpr::Kind::Op:
        for (auto g : {GateKind::H, GateKind::X, GateKind::Z, GateKind::RC, GateKind::LC}) {
            if (gate_arity(g) == b.type.arity) {
                out.push_back({LabelItem::Kind::Gate, 0, std::string(gate_name(g))});
            }
        }
        break;
    }
    return out;
}

void inputs_from_environment(const Configuration &c, const Site &site, const InputSpace &inputs,
                             std::vector<Transition> &out) {
    const auto &in = std::get<proc::Input>(site.proc->node);
    const auto &chan = *channel_of(in.chan);
    std::vector<std::vector<LabelItem>> domains;
    for (const auto &b : in.binders) {
        domains.push_back(binder_domain(b, inputs, c));
        if (domains.back().empty()) {
            return;
        }
    }
    std::vector<std::size_t> idx(domains.size(), 0);
    while (true) {
        Configuration next = c;
        Label label;
        label.kind = Label::Kind::In;
        label.chan = chan;
        Substitution s;
        for (std::size_t i = 0; i < domains.size(); ++i) {
            auto item = domains[i][idx[i]];
            const auto &name = in.binders[i].name;
            switch (item.kind) {
            case LabelItem::Kind::Int:
                s[name] = int_lit(item.value);
                break;
            case LabelItem::Kind::Qudit: {
                std::string q;
                for (std::size_t k = next.qudits().size();; ++k) {
                    q = "q#" + std::to_string(k);
                    const auto &names = next.qudits();
                    if (std::find(names.begin(), names.end(), q) == names.end()) {
                        break;
                    }
                }
                const auto incoming = inputs.qudit_states.at(static_cast<std::size_t>(item.value)).renamed({q});
                for (auto &comp : next.components) {
                    comp.state = qlin::tensor(comp.state, incoming);
                }
                next.owned.push_back(q);
                item.name = q;
                s[name] = detail::qudit_ref(q);
                break;
            }
            case LabelItem::Kind::Channel:
                item.name = "x#" + std::to_string(next.external_channels++);
                s[name] = detail::chan_ref(item.name);
                break;
            case LabelItem::Kind::Gate:
                s[name] = gate_lit(*gate_from_name(item.name));
                break;
            }
            label.items.push_back(std::move(item));
        }
        next.term = replace_at(c.term, site.path, substitute(in.body, s));
        out.push_back(finish(std::move(label), std::move(next)));

        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < domains[k].size()) {
                break;
            }
            idx[k] = 0;
        }
        if (k == idx.size()) {
            return;
        }
    }
}

void output_to_environment(const Configuration &c, const Site &site, std::vector<Transition> &out) {
    const auto &o = std::get<proc::Output>(site.proc->node);
    Configuration next = c;
    Label label;
    label.kind = Label::Kind::Out;
    label.chan = *channel_of(o.chan);
    for (const auto &e : o.payload) {
        if (const auto *lit = e->as<expr::IntLit>()) {
            label.items.push_back({LabelItem::Kind::Int, lit->value, {}});
        } else if (const auto *q = e->as<expr::QuditRef>()) {
            auto it = std::find(next.owned.begin(), next.owned.end(), q->name);
            if (it == next.owned.end()) {
                throw SemanticsError("output of qudit " + q->name + " which is not owned");
            }
            next.owned.erase(it);
            next.env.push_back(q->name);
            label.items.push_back({LabelItem::Kind::Qudit, 0, q->name});
        } else if (const auto *ch = e->as<expr::ChanRef>()) {
            label.items.push_back({LabelItem::Kind::Channel, 0, ch->name});
        } else if (const auto *g = e->as<expr::GateLit>()) {
            label.items.push_back({LabelItem::Kind::Gate, 0, std::string(gate_name(g->gate))});
        } else {
            throw SemanticsError("cannot output " + pretty(e));
        }
    }
    next.term = replace_at(c.term, site.path, o.body);
    out.push_back(finish(std::move(label), std::move(next)));
}

}  // namespace

std::optional<ExprStep> reduce_expr(const Configuration &c, const ExprPtr &e) {
    if (e->is_value()) {
        return std::nullopt;
    }
    // Reduces child `sub` and rebuilds the parent around the result.
    auto inner = [&](const ExprPtr &sub, const std::function<ExprPtr(ExprPtr)> &rebuild) {
        auto r = reduce_expr(c, sub);
        r->expr = rebuild(r->expr);
        return r;
    };
    return std::visit(
        overloaded{
            [&](const expr::Var &x) -> std::optional<ExprStep> {
                throw SemanticsError("unbound variable '" + x.name + "' at run time");
            },
            [&](const expr::Measure &x) -> std::optional<ExprStep> {
                return measure(c, qudit_targets(c, x.targets));
            },
            [&](const expr::ApplyGate &x) -> std::optional<ExprStep> {
                if (!x.gate->is_value()) {
                    return inner(x.gate, [&](ExprPtr g) {
                        return make_expr(expr::ApplyGate{x.targets, std::move(g), x.power}, e->pos);
                    });
                }
                if (!x.power->is_value()) {
                    return inner(x.power, [&](ExprPtr k) {
                        return make_expr(expr::ApplyGate{x.targets, x.gate, std::move(k)}, e->pos);
                    });
                }
                const auto *g = x.gate->as<expr::GateLit>();
                if (!g) {
                    throw SemanticsError("expected a gate, found " + pretty(x.gate));
                }
                const auto targets = qudit_targets(c, x.targets);
                if (static_cast<std::size_t>(gate_arity(g->gate)) != targets.size()) {
                    throw SemanticsError("gate arity mismatch in " + pretty(e));
                }
                return apply(c, targets, g->gate, *x.power);
            },
            [&](const expr::Plus &x) -> std::optional<ExprStep> {
                if (!x.lhs->is_value()) {
                    return inner(x.lhs, [&](ExprPtr l) { return make_expr(expr::Plus{std::move(l), x.rhs}, e->pos); });
                }
                if (!x.rhs->is_value()) {
                    return inner(x.rhs, [&](ExprPtr r) { return make_expr(expr::Plus{x.lhs, std::move(r)}, e->pos); });
                }
                return arithmetic(c, {x.lhs, x.rhs}, [](const auto &v) { return v[0] + v[1]; });
            },
            [&](const expr::Neg &x) -> std::optional<ExprStep> {
                if (!x.operand->is_value()) {
                    return inner(x.operand, [&](ExprPtr o) { return make_expr(expr::Neg{std::move(o)}, e->pos); });
                }
                return arithmetic(c, {x.operand}, [](const auto &v) { return -v[0]; });
            },
            [&](const auto &) -> std::optional<ExprStep> { return std::nullopt; },
        },
        e->node);
}

Configuration initial_configuration(const ProcPtr &term, int d) {
    if (d < 2) {
        throw SemanticsError("dimension must be at least 2");
    }
    Substitution free;
    for (const auto &[name, _] : free_vars(term)) {
        free[name] = detail::chan_ref(name);
    }
    Configuration c;
    c.d = d;
    c.components.push_back(Component{1.0, qlin::PureState::empty(d), {}});
    c.term = substitute(term, free);
    normalize(c);
    return c;
}

Configuration initial_configuration(const Program &prog) {
    return initial_configuration(expand_main(prog), prog.dim);
}

StepResult step(const Configuration &c, const InputSpace &inputs) {
    std::vector<Site> sites;
    std::vector<int> path;
    collect_sites(c.term, path, sites);

    StepResult result;
    std::vector<const Site *> outs;
    std::vector<const Site *> ins;
    std::vector<std::pair<const Site *, ExprPtr>> reductions;  // site, expression to reduce

    for (const auto &site : sites) {
        const auto &node = site.proc->node;
        if (const auto *a = std::get_if<proc::Action>(&node)) {
            reductions.emplace_back(&site, a->expr);
        } else if (const auto *ev = std::get_if<proc::Eval>(&node)) {
            reductions.emplace_back(&site, ev->expr);
        } else if (const auto *o = std::get_if<proc::Output>(&node)) {
            const auto pending = std::find_if(o->payload.begin(), o->payload.end(),
                                              [](const ExprPtr &e) { return !e->is_value(); });
            if (pending != o->payload.end()) {
                reductions.emplace_back(&site, *pending);
            } else {
                outs.push_back(&site);
                if (!is_restricted_channel(*channel_of(o->chan)) && mentions_placeholder(o->payload)) {
                    result.probabilistic = true;
                }
            }
        } else if (std::holds_alternative<proc::Input>(node)) {
            ins.push_back(&site);
        } else {
            throw SemanticsError("unexpected term at top level: " + pretty(site.proc));
        }
    }
    for (const auto &[site, e] : reductions) {
        if (!e->is_value() && redex_reads_placeholder(e)) {
            result.probabilistic = true;
        }
    }
    if (result.probabilistic) {
        result.transitions = collapse(c);
        return result;
    }

    for (const auto &[site, e] : reductions) {
        const auto &node = site->proc->node;
        Configuration next = c;
        ProcPtr rep;
        if (e->is_value()) {
            // {v}.P and [v].P are consumed without further effect.
            rep = std::holds_alternative<proc::Action>(node) ? std::get<proc::Action>(node).body
                                                              : std::get<proc::Eval>(node).body;
        } else {
            auto r = reduce_expr(c, e);
            next = std::move(r->config);
            if (const auto *a = std::get_if<proc::Action>(&node)) {
                rep = r->expr->is_value() ? a->body : make_proc(proc::Action{r->expr, a->body}, site->proc->pos);
            } else if (const auto *ev = std::get_if<proc::Eval>(&node)) {
                rep = r->expr->is_value() ? ev->body : make_proc(proc::Eval{r->expr, ev->body}, site->proc->pos);
            } else {
                const auto &o = std::get<proc::Output>(node);
                auto payload = o.payload;
                for (auto &p : payload) {
                    if (p == e) {
                        p = r->expr;
                        break;
                    }
                }
                rep = make_proc(proc::Output{o.chan, std::move(payload), o.body}, site->proc->pos);
            }
        }
        next.term = replace_at(c.term, site->path, rep);
        result.transitions.push_back(finish(Label::tau(), std::move(next)));
    }

    for (const auto *o : outs) {
        const auto &out = std::get<proc::Output>(o->proc->node);
        const auto &chan = *channel_of(out.chan);
        for (const auto *i : ins) {
            const auto &in = std::get<proc::Input>(i->proc->node);
            if (*channel_of(in.chan) != chan || in.binders.size() != out.payload.size() ||
                !parallel_sites(c.term, o->path, i->path)) {
                continue;
            }
            Substitution s;
            for (std::size_t k = 0; k < in.binders.size(); ++k) {
                s[in.binders[k].name] = out.payload[k];
            }
            Configuration next = c;
            next.term = replace_two(c.term, o->path, out.body, i->path, substitute(in.body, s));
            result.transitions.push_back(finish(Label::tau(), std::move(next)));
        }
        if (!is_restricted_channel(chan)) {
            output_to_environment(c, *o, result.transitions);
        }
    }
    for (const auto *i : ins) {
        const auto &in = std::get<proc::Input>(i->proc->node);
        if (!is_restricted_channel(*channel_of(in.chan))) {
            inputs_from_environment(c, *i, inputs, result.transitions);
        }
    }
    return result;
}

}  // namespace cqp::sem
