// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/printer.hpp"

#include <sstream>

namespace pwhile {

namespace {

// Integer expressions: additive level 1, multiplicative level 2, atoms 3.
// Left-associative; the right child of a same-level operator gets parens.
int iprec(const IntExpr& e) {
    if (e->kind != IntExprNode::Kind::Binary) return 3;
    return e->op == IntOp::Mul ? 2 : 1;
}

void print_int(std::ostream& os, const IntExpr& e, int min_prec) {
    int p = iprec(e);
    bool parens = p < min_prec;
    if (parens) os << "(";
    switch (e->kind) {
        case IntExprNode::Kind::Variable: os << e->var.name; break;
        case IntExprNode::Kind::Constant: os << e->value.get_str(); break;
        case IntExprNode::Kind::Binary: {
            const char* op = e->op == IntOp::Add ? " + " : e->op == IntOp::Sub ? " - " : " * ";
            print_int(os, e->lhs, p);
            os << op;
            print_int(os, e->rhs, p + 1);
            break;
        }
    }
    if (parens) os << ")";
}

const char* cmp_str(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return " < ";
        case CmpOp::Le: return " <= ";
        case CmpOp::Eq: return " = ";
        case CmpOp::Ge: return " >= ";
        case CmpOp::Gt: return " > ";
        case CmpOp::Ne: return " != ";
    }
    return "?";
}

// Boolean expressions: or 1, and 2, not 3, atoms 4.
int bprec(const BExp& e) {
    switch (e->kind) {
        case BExpNode::Kind::Or: return 1;
        case BExpNode::Kind::And: return 2;
        case BExpNode::Kind::Not: return 3;
        default: return 4;
    }
}

void print_bexp(std::ostream& os, const BExp& e, int min_prec) {
    int p = bprec(e);
    bool parens = p < min_prec;
    if (parens) os << "(";
    switch (e->kind) {
        case BExpNode::Kind::Lit: os << (e->lit ? "true" : "false"); break;
        case BExpNode::Kind::Cmp:
            print_int(os, e->cl, 1);
            os << cmp_str(e->cmp);
            print_int(os, e->cr, 1);
            break;
        case BExpNode::Kind::And:
            print_bexp(os, e->l, p);
            os << " && ";
            print_bexp(os, e->r, p + 1);
            break;
        case BExpNode::Kind::Or:
            print_bexp(os, e->l, p);
            os << " || ";
            print_bexp(os, e->r, p + 1);
            break;
        case BExpNode::Kind::Not:
            os << "!";
            print_bexp(os, e->l, p + 1);
            break;
    }
    if (parens) os << ")";
}

void print_dist(std::ostream& os, const DistExpr& d) {
    if (d.branches.size() == 1 && d.branches[0].prob == 1) {
        print_int(os, d.branches[0].expr, 1);
        return;
    }
    os << "{";
    bool first = true;
    for (const auto& br : d.branches) {
        if (!first) os << ", ";
        first = false;
        os << rat_str(br.prob) << ": ";
        print_int(os, br.expr, 1);
    }
    os << "}";
}

void print_cmd(std::ostream& os, const Command& c, bool atom_context);

void print_block(std::ostream& os, const Command& c) {
    os << "{ ";
    print_cmd(os, c, false);
    os << " }";
}

// atom_context demands a non-seq command; sequences get braced there.
void print_cmd(std::ostream& os, const Command& c, bool atom_context) {
    if (atom_context && c->kind == CommandNode::Kind::Seq) {
        print_block(os, c);
        return;
    }
    switch (c->kind) {
        case CommandNode::Kind::Skip: os << "skip"; break;
        case CommandNode::Kind::Abort: os << "abort"; break;
        case CommandNode::Kind::Tick: os << "tick(" << rat_str(c->rate) << ")"; break;
        case CommandNode::Kind::Assign:
            os << c->var.name << " := ";
            print_dist(os, c->dist);
            break;
        case CommandNode::Kind::If:
            os << "if [";
            print_bexp(os, c->inv, 1);
            os << "] (";
            print_bexp(os, c->guard, 1);
            os << ") ";
            print_block(os, c->a);
            os << " ";
            print_block(os, c->b);
            break;
        case CommandNode::Kind::While:
            os << "while [";
            print_bexp(os, c->inv, 1);
            os << "] (";
            print_bexp(os, c->guard, 1);
            os << ") ";
            print_block(os, c->a);
            break;
        case CommandNode::Kind::NdChoice:
            print_block(os, c->a);
            os << " <> ";
            print_block(os, c->b);
            break;
        case CommandNode::Kind::PChoice:
            print_block(os, c->a);
            os << " [" << rat_str(c->prob) << "] ";
            print_block(os, c->b);
            break;
        case CommandNode::Kind::Seq:
            // `;` is right-associated; a seq on the left needs braces.
            if (c->a->kind == CommandNode::Kind::Seq) {
                print_block(os, c->a);
            } else {
                print_cmd(os, c->a, true);
            }
            os << "; ";
            print_cmd(os, c->b, false);
            break;
    }
}

// Cost expressions: add 1, mul 2, atoms 3.
int cprec(const CostExpr& c) {
    switch (c->kind) {
        case CostExprNode::Kind::Add: return 1;
        case CostExprNode::Kind::Mul: return 2;
        default: return 3;
    }
}

void print_cost(std::ostream& os, const CostExpr& c, int min_prec) {
    int p = cprec(c);
    bool parens = p < min_prec;
    if (parens) os << "(";
    switch (c->kind) {
        case CostExprNode::Kind::Const: os << rat_str(c->value); break;
        case CostExprNode::Kind::Nat:
            os << "nat(";
            print_int(os, c->nat_arg, 1);
            os << ")";
            break;
        case CostExprNode::Kind::Iverson:
            os << "[";
            print_bexp(os, c->guard, 1);
            os << "]*";
            print_cost(os, c->a, 3);
            break;
        case CostExprNode::Kind::Add:
            print_cost(os, c->a, p);
            os << " + ";
            print_cost(os, c->b, p + 1);
            break;
        case CostExprNode::Kind::Mul:
            print_cost(os, c->a, p);
            os << "*";
            print_cost(os, c->b, p + 1);
            break;
        case CostExprNode::Kind::Max:
            os << "max(";
            print_cost(os, c->a, 1);
            os << ", ";
            print_cost(os, c->b, 1);
            os << ")";
            break;
        case CostExprNode::Kind::Coeff: os << "?" << c->coeff; break;
    }
    if (parens) os << ")";
}

}  // namespace

std::string print(const IntExpr& e) {
    std::ostringstream os;
    print_int(os, e, 1);
    return os.str();
}

std::string print(const BExp& e) {
    std::ostringstream os;
    print_bexp(os, e, 1);
    return os.str();
}

std::string print(const DistExpr& d) {
    std::ostringstream os;
    print_dist(os, d);
    return os.str();
}

std::string print(const Command& c) {
    std::ostringstream os;
    print_cmd(os, c, false);
    return os.str();
}

std::string print(const CostExpr& c) {
    std::ostringstream os;
    print_cost(os, c, 1);
    return os.str();
}

std::string print(const Store& s) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [v, z] : s.bindings) {
        if (!first) os << ", ";
        first = false;
        os << v.name << ": " << z.get_str();
    }
    os << "}";
    return os.str();
}

}  // namespace pwhile
