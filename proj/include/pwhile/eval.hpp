// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "pwhile/ast.hpp"

namespace pwhile {

using CoeffAssignment = std::map<std::string, Rat>;

Int eval_int(const IntExpr& e, const Store& s);
bool eval_bexp(const BExp& e, const Store& s);

// Evaluates every branch under the store and merges equal outcomes;
// the result sums to exactly 1.
std::map<Int, Rat> eval_dist(const DistExpr& d, const Store& s);

// nat(a) = max(0, a); [phi]*c is c if phi holds and 0 otherwise.
// Throws std::out_of_range on a coefficient symbol missing from `coeffs`.
Rat eval_cost(const CostExpr& c, const Store& s, const CoeffAssignment& coeffs = {});

// Capture-free substitution of `a` for `x`.
IntExpr subst_int(const IntExpr& e, const Var& x, const IntExpr& a);
BExp subst_bexp(const BExp& e, const Var& x, const IntExpr& a);

// Replaces coefficient symbols by constants (partial: unbound symbols stay).
CostExpr instantiate_coeffs(const CostExpr& c, const CoeffAssignment& coeffs);

}  // namespace pwhile
