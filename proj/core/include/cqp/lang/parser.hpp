#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cqp/lang/ast.hpp"

namespace cqp::lang {

class ParseError : public std::runtime_error {
  public:
    ParseError(SourcePos pos, const std::string &message)
        : std::runtime_error(pos.str() + ": " + message), pos_(pos), message_(message) {}

    SourcePos pos() const { return pos_; }
    const std::string &message() const { return message_; }

  private:
    SourcePos pos_;
    std::string message_;
};

/// Parses a whole program. A `dim d;` header sets the dimension; when
/// `dim_override` is given it takes precedence over the header, and when
/// neither is present the dimension defaults to 2.
Program parse_program(std::string_view text, std::optional<int> dim_override = std::nullopt);

/// Parses a single process term (no definitions, no header).
ProcPtr parse_process(std::string_view text);

}  // namespace cqp::lang
