#pragma once

#include <map>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>

#include "cqp/lang/ast.hpp"

namespace cqp::lang {

enum class TypeErrorCode {
    TypeMismatch,
    QuditDuplicated,
    QuditUnowned,
    UnboundName,
    UnknownDefinition,
    RecursiveDefinition,
};

std::string_view code_name(TypeErrorCode code);

struct TypeDiagnostic {
    TypeErrorCode code = TypeErrorCode::TypeMismatch;
    std::string message;
    SourcePos pos;
    std::string name;                    // offending identifier, if any
    std::optional<SourcePos> other_pos;  // earlier use for QuditDuplicated

    std::string str() const;
};

struct TypingReport {
    bool ok = true;
    std::optional<TypeDiagnostic> error;
    /// Channels used by the main process without being bound, with the
    /// types inferred from their first use.
    std::map<std::string, TypeExpr> free_channels;
};

/// Thrown by callers that need a well-typed program.
class TypeError : public std::runtime_error {
  public:
    explicit TypeError(TypeDiagnostic diag) : std::runtime_error(diag.str()), diag_(std::move(diag)) {}
    const TypeDiagnostic &diagnostic() const { return diag_; }

  private:
    TypeDiagnostic diag_;
};

/// Checks conventional typing plus linear use of qudits: sending or
/// measuring a qudit consumes it, parallel branches own disjoint qudits,
/// and both branches of a choice consume the same qudits. Definitions are
/// checked at each call site with arguments substituted, so names free in a
/// definition body resolve in the caller's scope.
TypingReport typecheck(const Program &prog);

}  // namespace cqp::lang
