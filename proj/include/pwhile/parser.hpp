// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "pwhile/ast.hpp"

namespace pwhile {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(column_)),
          line(line_),
          column(column_) {}
};

// Surface grammar (whitespace-insensitive, `#` starts a line comment):
//
//   cmd   := "skip" | "abort" | "tick" "(" rat ")" | var ":=" dist
//          | "if" "[" bexp "]" "(" bexp ")" block block
//          | "while" "[" bexp "]" "(" bexp ")" block
//          | block "<>" block | block "[" rat "]" block | cmd ";" cmd
//   block := "{" cmd "}"
//   dist  := iexp | "{" rat ":" iexp { "," rat ":" iexp } "}"
//   rat   := integer | integer "/" positive-integer
//
// `;` associates to the right. A lone block groups its command.
Command parse_program(const std::string& text);

// Cost expressions: q | nat(a) | [phi]*c | c+d | c*d | max(c,d) | ?q0 ...
CostExpr parse_cost_expr(const std::string& text);

BExp parse_bexp_text(const std::string& text);
Rat parse_rat_text(const std::string& text);

}  // namespace pwhile
