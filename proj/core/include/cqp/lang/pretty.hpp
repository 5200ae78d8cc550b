#pragma once

#include <string>

#include "cqp/lang/ast.hpp"

namespace cqp::lang {

std::string pretty(const TypeExpr &t);
std::string pretty(const Expr &e);
std::string pretty(const ExprPtr &e);
std::string pretty(const Process &p);
std::string pretty(const ProcPtr &p);
/// Canonical program text; parse_program(pretty(p)) reproduces p.
std::string pretty(const Program &p);

}  // namespace cqp::lang
