// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pwhile/ast.hpp"

namespace pwhile {

// Canonical single-line forms. parse_program(print(c)) reproduces c
// structurally; print is the key used for configuration memoization.
std::string print(const IntExpr& e);
std::string print(const BExp& e);
std::string print(const DistExpr& d);
std::string print(const Command& c);
std::string print(const CostExpr& c);
std::string print(const Store& s);

}  // namespace pwhile
