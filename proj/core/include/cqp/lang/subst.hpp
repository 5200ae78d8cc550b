#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "cqp/lang/ast.hpp"

namespace cqp::lang {

using Substitution = std::map<std::string, ExprPtr>;

/// Replaces free occurrences of variables. Binders that would capture a
/// free variable of a substituted expression are renamed first.
ExprPtr substitute(const ExprPtr &e, const Substitution &s);
ProcPtr substitute(const ProcPtr &p, const Substitution &s);

/// Free variable names with the position of their first occurrence.
/// Calls are looked through by expanding them against `prog` when given.
std::map<std::string, SourcePos> free_vars(const ExprPtr &e);
std::map<std::string, SourcePos> free_vars(const ProcPtr &p, const Program *prog = nullptr);

class ExpansionError : public std::runtime_error {
  public:
    ExpansionError(SourcePos pos, const std::string &message)
        : std::runtime_error(pos.str() + ": " + message), pos_(pos) {}
    SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

/// Body of a call with parameters replaced by the arguments.
ProcPtr instantiate_call(const Program &prog, const proc::Call &call, SourcePos pos);

/// The main process with every call replaced by its definition body.
/// Throws ExpansionError on unknown or recursive definitions.
ProcPtr expand_main(const Program &prog);

}  // namespace cqp::lang
