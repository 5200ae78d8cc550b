#include <cmath>
#include <nlohmann/json.hpp>

#include "cqp/lang/pretty.hpp"
#include "cqp/sem/lts.hpp"

namespace cqp::sem {

namespace {

using nlohmann::json;

double round9(double x) {
    const double r = std::round(x * 1e9) / 1e9;
    return r == 0.0 ? 0.0 : r;
}

const char *kind_name(Label::Kind k) {
    switch (k) {
    case Label::Kind::Tau:
        return "tau";
    case Label::Kind::In:
        return "in";
    case Label::Kind::Out:
        return "out";
    case Label::Kind::Prob:
        return "prob";
    }
    return "?";
}

json item_json(const LabelItem &item) {
    switch (item.kind) {
    case LabelItem::Kind::Int:
        return {{"int", item.value}};
    case LabelItem::Kind::Qudit:
        return item.name.empty() ? json{{"qudit", item.value}} : json{{"qudit", item.name}};
    case LabelItem::Kind::Channel:
        return {{"channel", item.name}};
    case LabelItem::Kind::Gate:
        return {{"gate", item.name}};
    }
    return {};
}

json label_json(const Label &l) {
    json j{{"kind", kind_name(l.kind)}, {"text", l.str()}};
    if (l.kind == Label::Kind::In || l.kind == Label::Kind::Out) {
        j["channel"] = l.chan;
        j["items"] = json::array();
        for (const auto &item : l.items) {
            // Input qudits are identified by their index in the input family.
            auto ij = item_json(item);
            if (l.kind == Label::Kind::In && item.kind == LabelItem::Kind::Qudit) {
                ij = {{"qudit", item.name}, {"family_index", item.value}};
            }
            j["items"].push_back(std::move(ij));
        }
    }
    if (l.kind == Label::Kind::Prob) {
        j["prob"] = round9(l.prob);
        j["outcome"] = l.outcome;
    }
    return j;
}

std::string dot_escape(const std::string &s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out;
}

}  // namespace

std::string lts_to_json(const Lts &lts, int indent) {
    json nodes = json::array();
    for (std::size_t i = 0; i < lts.nodes.size(); ++i) {
        const auto &n = lts.nodes[i];
        json comps = json::array();
        for (const auto &c : n.config.components) {
            json amps = json::array();
            for (const auto &a : c.state.amps()) {
                amps.push_back({round9(a.real()), round9(a.imag())});
            }
            comps.push_back({{"weight", round9(c.weight)}, {"values", c.values}, {"amplitudes", amps}});
        }
        nodes.push_back({{"id", i},
                         {"term", lang::pretty(n.config.term)},
                         {"probabilistic", n.probabilistic},
                         {"qudits", n.config.qudits()},
                         {"owned", n.config.owned},
                         {"environment", n.config.env},
                         {"components", comps}});
    }
    json edges = json::array();
    for (const auto &e : lts.edges) {
        edges.push_back({{"source", e.source}, {"target", e.target}, {"label", label_json(e.label)}});
    }
    json doc{{"dimension", lts.d},
             {"initial", lts.initial},
             {"node_count", lts.nodes.size()},
             {"nodes", nodes},
             {"edges", edges}};
    return doc.dump(indent) + "\n";
}

std::string lts_to_dot(const Lts &lts) {
    std::string out = "digraph lts {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (std::size_t i = 0; i < lts.nodes.size(); ++i) {
        const auto &n = lts.nodes[i];
        out += "  n" + std::to_string(i) + " [label=\"" + std::to_string(i) + ": " +
               dot_escape(lang::pretty(n.config.term)) + "\"";
        if (n.probabilistic) {
            out += ", style=dashed";
        }
        if (i == lts.initial) {
            out += ", penwidth=2";
        }
        out += "];\n";
    }
    for (const auto &e : lts.edges) {
        out += "  n" + std::to_string(e.source) + " -> n" + std::to_string(e.target) + " [label=\"" +
               dot_escape(e.label.str()) + "\"";
        if (e.label.kind == Label::Kind::Prob) {
            out += ", style=dotted";
        }
        out += "];\n";
    }
    return out + "}\n";
}

}  // namespace cqp::sem
