#include "cqp/lang/typecheck.hpp"

#include <algorithm>
#include <set>

#include "cqp/lang/pretty.hpp"
#include "cqp/lang/subst.hpp"
#include "cqp/overloaded.hpp"

namespace cqp::lang {

std::string_view code_name(TypeErrorCode code) {
    switch (code) {
    case TypeErrorCode::TypeMismatch:
        return "TypeMismatch";
    case TypeErrorCode::QuditDuplicated:
        return "QuditDuplicated";
    case TypeErrorCode::QuditUnowned:
        return "QuditUnowned";
    case TypeErrorCode::UnboundName:
        return "UnboundName";
    case TypeErrorCode::UnknownDefinition:
        return "UnknownDefinition";
    case TypeErrorCode::RecursiveDefinition:
        return "RecursiveDefinition";
    }
    return "?";
}

std::string TypeDiagnostic::str() const {
    std::string out = pos.str() + ": " + std::string(code_name(code)) + ": " + message;
    if (other_pos) {
        out += " (previous use at " + other_pos->str() + ")";
    }
    return out;
}

namespace {

struct Failure {
    TypeDiagnostic diag;
};

[[noreturn]] void fail(TypeErrorCode code, SourcePos pos, std::string message, std::string name = {},
                       std::optional<SourcePos> other = std::nullopt) {
    throw Failure{TypeDiagnostic{code, std::move(message), pos, std::move(name), other}};
}

struct Entry {
    TypeExpr type;
    bool consumed = false;
    SourcePos consumed_at;
};

using Env = std::map<std::string, Entry>;

// Result type of an expression; nullopt stands for the unit result of a
// gate application.
using ExprType = std::optional<TypeExpr>;

std::string type_text(const ExprType &t) {
    return t ? pretty(*t) : std::string("unit");
}

class Checker {
  public:
    explicit Checker(const Program &prog) : prog_(prog) {}

    void run() {
        Env env;
        check(prog_.main, env);
    }

    std::map<std::string, TypeExpr> free_channels;

  private:
    const Program &prog_;
    std::vector<std::string> calls_;

    // Shadows `names` for the duration of a scope and restores them after.
    struct Scope {
        Env &env;
        std::vector<std::pair<std::string, std::optional<Entry>>> saved;

        Scope(Env &e) : env(e) {}
        void bind(const std::string &name, Entry entry) {
            const auto it = env.find(name);
            saved.emplace_back(name, it == env.end() ? std::nullopt : std::optional<Entry>(it->second));
            env[name] = std::move(entry);
        }
        ~Scope() {
            for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
                if (it->second) {
                    env[it->first] = *it->second;
                } else {
                    env.erase(it->first);
                }
            }
        }
    };

    Entry &live_qudit(const ExprPtr &e, Env &env) {
        const auto *v = e->as<expr::Var>();
        if (!v) {
            fail(TypeErrorCode::TypeMismatch, e->pos, "expected a qudit name, found '" + pretty(e) + "'");
        }
        const auto it = env.find(v->name);
        if (it == env.end()) {
            fail(TypeErrorCode::QuditUnowned, e->pos, "qudit '" + v->name + "' is not owned here", v->name);
        }
        if (it->second.type.kind != TypeExpr::Kind::Qdit) {
            fail(TypeErrorCode::TypeMismatch, e->pos,
                 "'" + v->name + "' has type " + pretty(it->second.type) + ", expected Qdit", v->name);
        }
        if (it->second.consumed) {
            fail(TypeErrorCode::QuditDuplicated, e->pos, "qudit '" + v->name + "' used after it was consumed",
                 v->name, it->second.consumed_at);
        }
        return it->second;
    }

    void require_distinct(const std::vector<ExprPtr> &targets) {
        std::map<std::string, SourcePos> seen;
        for (const auto &t : targets) {
            if (const auto *v = t->as<expr::Var>()) {
                const auto [it, fresh] = seen.emplace(v->name, t->pos);
                if (!fresh) {
                    fail(TypeErrorCode::QuditDuplicated, t->pos, "qudit '" + v->name + "' appears twice", v->name,
                         it->second);
                }
            }
        }
    }

    void expect_int(const ExprPtr &e, Env &env) {
        const auto t = type_of(e, env);
        if (!t || t->kind != TypeExpr::Kind::Int) {
            fail(TypeErrorCode::TypeMismatch, e->pos, "expected Int, found " + type_text(t));
        }
    }

    ExprType type_of(const ExprPtr &e, Env &env) {
        return std::visit(
            overloaded{
                [&](const expr::IntLit &) -> ExprType { return TypeExpr::integer(); },
                [&](const expr::GateLit &x) -> ExprType { return TypeExpr::op(gate_arity(x.gate)); },
                [&](const expr::Var &x) -> ExprType {
                    const auto it = env.find(x.name);
                    if (it != env.end()) {
                        if (it->second.type.kind == TypeExpr::Kind::Qdit && it->second.consumed) {
                            fail(TypeErrorCode::QuditDuplicated, e->pos,
                                 "qudit '" + x.name + "' used after it was consumed", x.name, it->second.consumed_at);
                        }
                        return it->second.type;
                    }
                    const auto fc = free_channels.find(x.name);
                    if (fc != free_channels.end()) {
                        return fc->second;
                    }
                    fail(TypeErrorCode::UnboundName, e->pos, "unbound name '" + x.name + "'", x.name);
                },
                [&](const expr::Measure &x) -> ExprType {
                    require_distinct(x.targets);
                    std::vector<Entry *> entries;
                    for (const auto &t : x.targets) {
                        entries.push_back(&live_qudit(t, env));
                    }
                    for (auto *entry : entries) {
                        entry->consumed = true;
                        entry->consumed_at = e->pos;
                    }
                    return TypeExpr::integer();
                },
                [&](const expr::ApplyGate &x) -> ExprType {
                    require_distinct(x.targets);
                    for (const auto &t : x.targets) {
                        live_qudit(t, env);
                    }
                    const auto g = type_of(x.gate, env);
                    if (!g || g->kind != TypeExpr::Kind::Op) {
                        fail(TypeErrorCode::TypeMismatch, x.gate->pos, "expected a gate, found " + type_text(g));
                    }
                    if (static_cast<std::size_t>(g->arity) != x.targets.size()) {
                        fail(TypeErrorCode::TypeMismatch, e->pos,
                             "gate of arity " + std::to_string(g->arity) + " applied to " +
                                 std::to_string(x.targets.size()) + " qudits");
                    }
                    expect_int(x.power, env);
                    return std::nullopt;
                },
                [&](const expr::Plus &x) -> ExprType {
                    expect_int(x.lhs, env);
                    expect_int(x.rhs, env);
                    return TypeExpr::integer();
                },
                [&](const expr::Neg &x) -> ExprType {
                    expect_int(x.operand, env);
                    return TypeExpr::integer();
                },
                [&](const auto &) -> ExprType {
                    fail(TypeErrorCode::TypeMismatch, e->pos, "run-time term in source program");
                },
            },
            e->node);
    }

    // Type of a channel position. Unbound names are free channels whose
    // type is fixed by `inferred` on first use.
    TypeExpr channel_type(const ExprPtr &chan, Env &env, const TypeExpr &inferred) {
        if (const auto *v = chan->as<expr::Var>(); v && !env.contains(v->name) && !free_channels.contains(v->name)) {
            free_channels.emplace(v->name, inferred);
            return inferred;
        }
        const auto t = type_of(chan, env);
        if (!t || t->kind != TypeExpr::Kind::Chan) {
            fail(TypeErrorCode::TypeMismatch, chan->pos, "'" + pretty(chan) + "' is not a channel");
        }
        return *t;
    }

    void check(const ProcPtr &p, Env &env) {
        std::visit(overloaded{
                       [&](const proc::Nil &) {},
                       [&](const proc::Par &x) {
                           const auto left = free_vars(x.left, &prog_);
                           const auto right = free_vars(x.right, &prog_);
                           for (const auto &[name, pos] : right) {
                               const auto it = env.find(name);
                               if (it != env.end() && it->second.type.kind == TypeExpr::Kind::Qdit &&
                                   left.contains(name)) {
                                   fail(TypeErrorCode::QuditDuplicated, pos,
                                        "qudit '" + name + "' is shared by parallel processes", name,
                                        left.at(name));
                               }
                           }
                           check(x.left, env);
                           check(x.right, env);
                       },
                       [&](const proc::Sum &x) {
                           Env left = env;
                           Env right = env;
                           check(x.left, left);
                           check(x.right, right);
                           for (const auto &[name, entry] : left) {
                               if (entry.consumed != right.at(name).consumed) {
                                   fail(TypeErrorCode::TypeMismatch, p->pos,
                                        "branches of a choice must consume the same qudits ('" + name + "')",
                                        name);
                               }
                           }
                           env = std::move(left);
                       },
                       [&](const proc::Input &x) {
                           std::vector<TypeExpr> binder_types;
                           for (const auto &b : x.binders) {
                               binder_types.push_back(b.type);
                           }
                           const auto ct = channel_type(x.chan, env, TypeExpr::chan(binder_types));
                           if (ct.payload != binder_types) {
                               fail(TypeErrorCode::TypeMismatch, p->pos,
                                    "input binders do not match channel type " + pretty(ct));
                           }
                           Scope scope(env);
                           for (const auto &b : x.binders) {
                               scope.bind(b.name, Entry{b.type, false, {}});
                           }
                           check(x.body, env);
                       },
                       [&](const proc::Output &x) {
                           std::vector<TypeExpr> payload_types;
                           for (const auto &e : x.payload) {
                               const auto t = type_of(e, env);
                               if (!t) {
                                   fail(TypeErrorCode::TypeMismatch, e->pos, "cannot send the result of a gate");
                               }
                               payload_types.push_back(*t);
                           }
                           require_distinct(x.payload);
                           const auto ct = channel_type(x.chan, env, TypeExpr::chan(payload_types));
                           if (ct.payload != payload_types) {
                               std::string sent;
                               for (const auto &t : payload_types) {
                                   sent += (sent.empty() ? "" : ",") + pretty(t);
                               }
                               fail(TypeErrorCode::TypeMismatch, p->pos,
                                    "sending [" + sent + "] on a channel of type " + pretty(ct));
                           }
                           for (const auto &e : x.payload) {
                               if (const auto *v = e->as<expr::Var>()) {
                                   auto it = env.find(v->name);
                                   if (it != env.end() && it->second.type.kind == TypeExpr::Kind::Qdit) {
                                       it->second.consumed = true;
                                       it->second.consumed_at = e->pos;
                                   }
                               }
                           }
                           check(x.body, env);
                       },
                       [&](const proc::Action &x) {
                           type_of(x.expr, env);
                           check(x.body, env);
                       },
                       [&](const proc::Eval &x) {
                           type_of(x.expr, env);
                           check(x.body, env);
                       },
                       [&](const proc::QditDecl &x) {
                           Scope scope(env);
                           for (const auto &n : x.names) {
                               scope.bind(n, Entry{TypeExpr::qdit(), false, {}});
                           }
                           check(x.body, env);
                       },
                       [&](const proc::NewChan &x) {
                           Scope scope(env);
                           scope.bind(x.name, Entry{x.type, false, {}});
                           check(x.body, env);
                       },
                       [&](const proc::Call &x) { check_call(x, p->pos, env); },
                   },
                   p->node);
    }

    void check_call(const proc::Call &call, SourcePos pos, Env &env) {
        const Definition *def = prog_.find(call.name);
        if (!def) {
            fail(TypeErrorCode::UnknownDefinition, pos, "unknown process '" + call.name + "'", call.name);
        }
        if (std::find(calls_.begin(), calls_.end(), call.name) != calls_.end()) {
            fail(TypeErrorCode::RecursiveDefinition, pos, "recursive use of '" + call.name + "'", call.name);
        }
        if (def->params.size() != call.args.size()) {
            fail(TypeErrorCode::TypeMismatch, pos,
                 "'" + call.name + "' expects " + std::to_string(def->params.size()) + " arguments");
        }
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const auto &arg = call.args[i];
            const auto &want = def->params[i].type;
            if (want.kind == TypeExpr::Kind::Chan) {
                channel_type(arg, env, want);
            }
            if (want.kind == TypeExpr::Kind::Qdit) {
                live_qudit(arg, env);
            }
            const auto got = type_of(arg, env);
            if (!got || *got != want) {
                fail(TypeErrorCode::TypeMismatch, arg->pos,
                     "argument " + std::to_string(i + 1) + " of '" + call.name + "' has type " + type_text(got) +
                         ", expected " + pretty(want));
            }
        }
        calls_.push_back(call.name);
        check(instantiate_call(prog_, call, pos), env);
        calls_.pop_back();
    }
};

}  // namespace

TypingReport typecheck(const Program &prog) {
    TypingReport report;
    Checker checker(prog);
    try {
        checker.run();
    } catch (const Failure &f) {
        report.ok = false;
        report.error = f.diag;
    } catch (const ExpansionError &e) {
        report.ok = false;
        report.error = TypeDiagnostic{TypeErrorCode::UnknownDefinition, e.what(), e.pos(), {}, std::nullopt};
    }
    report.free_channels = std::move(checker.free_channels);
    return report;
}

}  // namespace cqp::lang
