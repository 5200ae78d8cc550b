#pragma once

// Traversals over run-time terms shared by the semantics.

#include <functional>

#include "cqp/lang/ast.hpp"

namespace cqp::sem::detail {

/// Returns a replacement for a leaf expression, or nullptr to keep it.
using LeafFn = std::function<lang::ExprPtr(const lang::ExprPtr &)>;

lang::ExprPtr map_leaves(const lang::ExprPtr &e, const LeafFn &f);
lang::ProcPtr map_leaves(const lang::ProcPtr &p, const LeafFn &f);

/// Visits leaf expressions in textual order.
void for_each_leaf(const lang::ExprPtr &e, const std::function<void(const lang::Expr &)> &f);
void for_each_leaf(const lang::ProcPtr &p, const std::function<void(const lang::Expr &)> &f);

lang::ExprPtr qudit_ref(std::string name);
lang::ExprPtr chan_ref(std::string name);
lang::ExprPtr mix_ref(int index);
lang::ExprPtr unit_value();

}  // namespace cqp::sem::detail
