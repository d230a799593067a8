// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pwhile/rational.hpp"

namespace pwhile {

struct Var {
    std::string name;

    Var() = default;
    explicit Var(std::string n) : name(std::move(n)) {}

    bool operator==(const Var& o) const { return name == o.name; }
    bool operator!=(const Var& o) const { return name != o.name; }
    bool operator<(const Var& o) const { return name < o.name; }
};

// ---------------------------------------------------------------------------
// Integer expressions: x | z | a + b | a - b | a * b
// ---------------------------------------------------------------------------

struct IntExprNode;
using IntExpr = std::shared_ptr<const IntExprNode>;

enum class IntOp { Add, Sub, Mul };

struct IntExprNode {
    enum class Kind { Variable, Constant, Binary };
    Kind kind;
    Var var;        // Variable
    Int value;      // Constant
    IntOp op;       // Binary
    IntExpr lhs, rhs;
};

IntExpr ivar(Var v);
IntExpr ivar(const std::string& name);
IntExpr iconst(Int z);
IntExpr iconst(long z);
IntExpr ibin(IntOp op, IntExpr a, IntExpr b);
inline IntExpr iadd(IntExpr a, IntExpr b) { return ibin(IntOp::Add, std::move(a), std::move(b)); }
inline IntExpr isub(IntExpr a, IntExpr b) { return ibin(IntOp::Sub, std::move(a), std::move(b)); }
inline IntExpr imul(IntExpr a, IntExpr b) { return ibin(IntOp::Mul, std::move(a), std::move(b)); }

// Constant folding and unit elimination only; keeps the tree shape otherwise.
IntExpr int_simplify(const IntExpr& e);

// ---------------------------------------------------------------------------
// Boolean expressions over integer comparisons
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Eq, Ge, Gt, Ne };

struct BExpNode;
using BExp = std::shared_ptr<const BExpNode>;

struct BExpNode {
    enum class Kind { Lit, Cmp, And, Or, Not };
    Kind kind;
    bool lit = false;          // Lit
    CmpOp cmp = CmpOp::Eq;     // Cmp
    IntExpr cl, cr;            // Cmp operands
    BExp l, r;                 // And/Or children, Not child in l
};

BExp btrue();
BExp bfalse();
BExp bcmp(CmpOp op, IntExpr a, IntExpr b);
BExp band(BExp a, BExp b);
BExp bor(BExp a, BExp b);
BExp bnot(BExp a);

// Literal folding for boolean connectives (true && phi -> phi, ...).
BExp bexp_simplify(const BExp& e);

// ---------------------------------------------------------------------------
// Distribution expressions: finite, probabilities sum to exactly 1
// ---------------------------------------------------------------------------

struct DistBranch {
    Rat prob;
    IntExpr expr;
};

struct DistExpr {
    std::vector<DistBranch> branches;
};

DistExpr dirac(IntExpr e);
// Throws std::invalid_argument when a probability is outside (0,1] or the sum
// differs from 1.
void validate_dist(const DistExpr& d);

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct CommandNode;
using Command = std::shared_ptr<const CommandNode>;

struct CommandNode {
    enum class Kind { Skip, Abort, Tick, Assign, If, While, NdChoice, PChoice, Seq };
    Kind kind;
    Rat rate;        // Tick, >= 0
    Var var;         // Assign target
    DistExpr dist;   // Assign source
    BExp inv, guard; // If/While annotations
    Rat prob;        // PChoice, in [0,1]
    Command a, b;    // If: then/else; While: body in a; choices and Seq: both
};

Command cskip();
Command cabort();
Command ctick(Rat rate);
Command cassign(Var x, DistExpr d);
Command cif(BExp inv, BExp guard, Command then_cmd, Command else_cmd);
Command cwhile(BExp inv, BExp guard, Command body);
Command cnd(Command a, Command b);
Command cprob(Rat p, Command a, Command b);
Command cseq(Command a, Command b);

// ---------------------------------------------------------------------------
// Stores: total maps Var -> Z, unbound variables read as 0
// ---------------------------------------------------------------------------

struct Store {
    std::map<Var, Int> bindings;

    Int get(const Var& v) const {
        auto it = bindings.find(v);
        return it == bindings.end() ? Int(0) : it->second;
    }
    Store with(const Var& v, Int z) const {
        Store s = *this;
        s.bindings[v] = std::move(z);
        return s;
    }

    bool operator==(const Store& o) const { return bindings == o.bindings; }
    bool operator<(const Store& o) const {
        return std::lexicographical_compare(
            bindings.begin(), bindings.end(), o.bindings.begin(), o.bindings.end(),
            [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                return x.second < y.second;
            });
    }
};

// ---------------------------------------------------------------------------
// Cost expressions: q | nat(a) | [phi]*c | c+d | c*d | max(c,d) | ?q_i
// ---------------------------------------------------------------------------

struct CostExprNode;
using CostExpr = std::shared_ptr<const CostExprNode>;

struct CostExprNode {
    enum class Kind { Const, Nat, Iverson, Add, Mul, Max, Coeff };
    Kind kind;
    Rat value;          // Const, >= 0
    IntExpr nat_arg;    // Nat
    BExp guard;         // Iverson
    std::string coeff;  // Coeff symbol, printed "?name"
    CostExpr a, b;      // Add/Mul/Max children; Iverson body in a
};

CostExpr cconst(Rat q);
CostExpr cconst(long q);
CostExpr cnat(IntExpr a);
CostExpr civerson(BExp guard, CostExpr body);
CostExpr cadd(CostExpr a, CostExpr b);
CostExpr cmul(CostExpr a, CostExpr b);
CostExpr cmax(CostExpr a, CostExpr b);
CostExpr ccoeff(std::string symbol);

// ---------------------------------------------------------------------------
// Structural equality and free variables
// ---------------------------------------------------------------------------

bool equal(const IntExpr& a, const IntExpr& b);
bool equal(const BExp& a, const BExp& b);
bool equal(const DistExpr& a, const DistExpr& b);
bool equal(const Command& a, const Command& b);
bool equal(const CostExpr& a, const CostExpr& b);

void collect_free_vars(const IntExpr& e, std::set<Var>& out);
void collect_free_vars(const BExp& e, std::set<Var>& out);
void collect_free_vars(const DistExpr& d, std::set<Var>& out);
void collect_free_vars(const Command& c, std::set<Var>& out);
void collect_free_vars(const CostExpr& c, std::set<Var>& out);

template <typename Node>
std::set<Var> free_vars(const Node& n) {
    std::set<Var> out;
    collect_free_vars(n, out);
    return out;
}

// Coefficient symbols occurring in a cost expression, in first-occurrence order.
std::vector<std::string> coeff_symbols(const CostExpr& c);

}  // namespace pwhile
