#include <cstdio>

#include "cqp/sem/config.hpp"

namespace cqp::sem {

namespace {

std::string item_text(const LabelItem &item, bool inbound) {
    switch (item.kind) {
    case LabelItem::Kind::Int:
        return std::to_string(item.value);
    case LabelItem::Kind::Qudit:
        return inbound ? "q<" + std::to_string(item.value) + ">" : item.name;
    case LabelItem::Kind::Channel:
    case LabelItem::Kind::Gate:
        return item.name;
    }
    return "?";
}

std::string join_items(const std::vector<LabelItem> &items, bool inbound) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i > 0 ? "," : "") + item_text(items[i], inbound);
    }
    return out;
}

}  // namespace

std::string Label::str() const {
    switch (kind) {
    case Kind::Tau:
        return "tau";
    case Kind::In:
        return chan + "?[" + join_items(items, true) + "]";
    case Kind::Out:
        return chan + "![" + join_items(items, false) + "]";
    case Kind::Prob: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", prob);
        std::string out = std::string("prob ") + buf + " (";
        for (std::size_t i = 0; i < outcome.size(); ++i) {
            out += (i > 0 ? "," : "") + std::to_string(outcome[i]);
        }
        return out + ")";
    }
    }
    return "?";
}

std::string Label::key() const {
    switch (kind) {
    case Kind::Tau:
        return "tau";
    case Kind::Prob:
        return "prob";
    case Kind::In:
        return "in:" + chan + ":" + join_items(items, true);
    case Kind::Out: {
        std::string out = "out:" + chan + ":";
        for (const auto &item : items) {
            out += item.kind == LabelItem::Kind::Qudit ? std::string("q") : item_text(item, false);
            out += ",";
        }
        return out;
    }
    }
    return "?";
}

}  // namespace cqp::sem
