#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "cqp/lang/pretty.hpp"
#include "cqp/lang/subst.hpp"
#include "cqp/overloaded.hpp"
#include "cqp/sem/step.hpp"
#include "term.hpp"

namespace cqp::sem {

using namespace lang;

namespace {

constexpr double kPhaseAnchorTol = 1e-6;
constexpr double kMergeTol = 1e-9;

std::string fresh_qudit(const Configuration &c) {
    const auto &names = c.qudits();
    for (std::size_t k = names.size();; ++k) {
        auto n = "q#" + std::to_string(k);
        if (std::find(names.begin(), names.end(), n) == names.end()) {
            return n;
        }
    }
}

std::set<std::string> channel_names(const ProcPtr &p) {
    std::set<std::string> out;
    detail::for_each_leaf(p, [&](const Expr &e) {
        if (const auto *c = e.as<expr::ChanRef>()) {
            out.insert(c->name);
        }
    });
    return out;
}

// Allocates declared qudits and restricted channels that are no longer
// guarded by a prefix, and drops inert nil branches.
ProcPtr flatten(Configuration &c, const ProcPtr &p, std::set<std::string> &chans) {
    return std::visit(
        overloaded{
            [&](const proc::Par &x) -> ProcPtr {
                auto l = flatten(c, x.left, chans);
                auto r = flatten(c, x.right, chans);
                if (l->as<proc::Nil>()) {
                    return r;
                }
                if (r->as<proc::Nil>()) {
                    return l;
                }
                return l == x.left && r == x.right ? p : make_proc(proc::Par{l, r}, p->pos);
            },
            [&](const proc::Sum &x) -> ProcPtr {
                auto l = flatten(c, x.left, chans);
                auto r = flatten(c, x.right, chans);
                if (l->as<proc::Nil>()) {
                    return r;
                }
                if (r->as<proc::Nil>()) {
                    return l;
                }
                return l == x.left && r == x.right ? p : make_proc(proc::Sum{l, r}, p->pos);
            },
            [&](const proc::QditDecl &x) -> ProcPtr {
                Substitution s;
                for (const auto &n : x.names) {
                    const auto q = fresh_qudit(c);
                    const int zero = 0;
                    const auto ket0 = qlin::PureState::basis(c.d, {q}, std::span<const int>(&zero, 1));
                    for (auto &comp : c.components) {
                        comp.state = qlin::tensor(comp.state, ket0);
                    }
                    c.owned.push_back(q);
                    s[n] = detail::qudit_ref(q);
                }
                return flatten(c, substitute(x.body, s), chans);
            },
            [&](const proc::NewChan &x) -> ProcPtr {
                std::string fresh;
                for (std::size_t k = 0;; ++k) {
                    fresh = "e#" + std::to_string(k);
                    if (!chans.contains(fresh)) {
                        break;
                    }
                }
                chans.insert(fresh);
                return flatten(c, substitute(x.body, {{x.name, detail::chan_ref(fresh)}}), chans);
            },
            [&](const proc::Call &x) -> ProcPtr {
                throw SemanticsError("unexpanded call to '" + x.name + "' at run time");
            },
            [&](const auto &) -> ProcPtr { return p; },
        },
        p->node);
}

// Drops placeholder columns the term no longer mentions, substitutes
// columns on which all components agree, and numbers the rest by first
// appearance.
void normalize_columns(Configuration &c) {
    std::vector<int> order;
    detail::for_each_leaf(c.term, [&](const Expr &e) {
        if (const auto *m = e.as<expr::MixRef>()) {
            if (std::find(order.begin(), order.end(), m->index) == order.end()) {
                order.push_back(m->index);
            }
        }
    });
    std::map<int, ExprPtr> replace;
    std::vector<int> kept;
    for (int col : order) {
        const long long v0 = c.components.front().values.at(col);
        const bool uniform = std::all_of(c.components.begin(), c.components.end(),
                                         [&](const Component &comp) { return comp.values.at(col) == v0; });
        if (uniform) {
            replace[col] = int_lit(v0);
        } else {
            replace[col] = detail::mix_ref(static_cast<int>(kept.size()));
            kept.push_back(col);
        }
    }
    bool identity = static_cast<int>(kept.size()) == c.columns;
    for (std::size_t i = 0; identity && i < kept.size(); ++i) {
        identity = kept[i] == static_cast<int>(i);
    }
    if (identity) {
        return;
    }
    c.term = detail::map_leaves(c.term, [&](const ExprPtr &e) -> ExprPtr {
        if (const auto *m = e->as<expr::MixRef>()) {
            return replace.at(m->index);
        }
        return nullptr;
    });
    for (auto &comp : c.components) {
        std::vector<long long> values;
        for (int col : kept) {
            values.push_back(comp.values.at(col));
        }
        comp.values = std::move(values);
    }
    c.columns = static_cast<int>(kept.size());
}

// Renames qudits to q#0.. in canonical order (environment first in the
// order qudits left, then owned qudits by first mention in the term, then
// owned qudits the term no longer mentions) and restricted channels to
// e#0.. by first mention.
void rename_canonically(Configuration &c) {
    std::vector<std::string> mentioned;
    std::vector<std::string> restricted;
    detail::for_each_leaf(c.term, [&](const Expr &e) {
        if (const auto *q = e.as<expr::QuditRef>()) {
            if (std::find(mentioned.begin(), mentioned.end(), q->name) == mentioned.end()) {
                mentioned.push_back(q->name);
            }
        } else if (const auto *ch = e.as<expr::ChanRef>()) {
            if (is_restricted_channel(ch->name) &&
                std::find(restricted.begin(), restricted.end(), ch->name) == restricted.end()) {
                restricted.push_back(ch->name);
            }
        }
    });

    std::vector<std::string> order = c.env;
    for (const auto &q : mentioned) {
        if (std::find(c.owned.begin(), c.owned.end(), q) == c.owned.end()) {
            throw SemanticsError("term refers to qudit " + q + " which it does not own");
        }
        order.push_back(q);
    }
    for (const auto &q : c.qudits()) {
        if (std::find(order.begin(), order.end(), q) == order.end()) {
            order.push_back(q);
        }
    }

    std::map<std::string, std::string> qmap;
    std::vector<std::string> new_names;
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_names.push_back("q#" + std::to_string(i));
        qmap[order[i]] = new_names.back();
    }
    std::map<std::string, std::string> cmap;
    for (std::size_t i = 0; i < restricted.size(); ++i) {
        cmap[restricted[i]] = "e#" + std::to_string(i);
    }

    const bool qudits_fixed = order == c.qudits() && order == new_names;
    if (!qudits_fixed) {
        for (auto &comp : c.components) {
            comp.state = comp.state.reordered(order).renamed(new_names);
        }
    }
    for (auto &q : c.env) {
        q = qmap.at(q);
    }
    std::vector<std::string> owned;
    for (std::size_t i = c.env.size(); i < order.size(); ++i) {
        owned.push_back(new_names[i]);
    }
    c.owned = std::move(owned);

    c.term = detail::map_leaves(c.term, [&](const ExprPtr &e) -> ExprPtr {
        if (const auto *q = e->as<expr::QuditRef>()) {
            const auto &n = qmap.at(q->name);
            return n == q->name ? nullptr : detail::qudit_ref(n);
        }
        if (const auto *ch = e->as<expr::ChanRef>()) {
            const auto it = cmap.find(ch->name);
            return it == cmap.end() || it->second == ch->name ? nullptr : detail::chan_ref(it->second);
        }
        return nullptr;
    });
}

qlin::PureState remove_global_phase(const qlin::PureState &s) {
    const auto &amps = s.amps();
    for (const auto &a : amps) {
        if (std::abs(a) > kPhaseAnchorTol) {
            const auto rot = std::conj(a) / std::abs(a);
            std::vector<qlin::Complex> out(amps.size());
            for (std::size_t i = 0; i < amps.size(); ++i) {
                out[i] = amps[i] * rot;
            }
            return qlin::PureState(s.dim(), s.qudits(), std::move(out));
        }
    }
    return s;
}

bool same_state(const qlin::PureState &a, const qlin::PureState &b) {
    for (std::size_t i = 0; i < a.amps().size(); ++i) {
        if (std::abs(a.amps()[i] - b.amps()[i]) > kMergeTol) {
            return false;
        }
    }
    return true;
}

double rounded(double x, double scale) {
    const double r = std::round(x * scale) / scale;
    return r == 0.0 ? 0.0 : r;
}

std::string amps_text(const qlin::PureState &s) {
    std::string out;
    char buf[64];
    for (const auto &a : s.amps()) {
        std::snprintf(buf, sizeof buf, "%.8f,%.8f;", rounded(a.real(), 1e8), rounded(a.imag(), 1e8));
        out += buf;
    }
    return out;
}

void merge_components(Configuration &c) {
    for (auto &comp : c.components) {
        comp.state = remove_global_phase(comp.state);
    }
    std::vector<Component> merged;
    for (auto &comp : c.components) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Component &m) {
            return m.values == comp.values && same_state(m.state, comp.state);
        });
        if (it == merged.end()) {
            merged.push_back(std::move(comp));
        } else {
            it->weight += comp.weight;
        }
    }
    std::vector<std::pair<std::string, Component>> keyed;
    for (auto &m : merged) {
        std::string k;
        for (auto v : m.values) {
            k += std::to_string(v) + ",";
        }
        keyed.emplace_back(k + "|" + amps_text(m.state), std::move(m));
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    c.components.clear();
    for (auto &[_, m] : keyed) {
        c.components.push_back(std::move(m));
    }
}

}  // namespace

bool is_restricted_channel(const std::string &name) {
    return name.rfind("e#", 0) == 0;
}

void normalize(Configuration &c) {
    auto chans = channel_names(c.term);
    c.term = flatten(c, c.term, chans);
    normalize_columns(c);
    rename_canonically(c);
    merge_components(c);
}

std::string canonical_key(const Configuration &c) {
    std::string key = pretty(c.term);
    key += "|d" + std::to_string(c.d) + "|o" + std::to_string(c.owned.size()) + "|e" + std::to_string(c.env.size()) +
           "|x" + std::to_string(c.external_channels);
    char buf[48];
    for (const auto &comp : c.components) {
        std::snprintf(buf, sizeof buf, "|w%.9f:", rounded(comp.weight, 1e9));
        key += buf;
        for (auto v : comp.values) {
            key += std::to_string(v) + ",";
        }
        key += amps_text(comp.state);
    }
    return key;
}

}  // namespace cqp::sem
