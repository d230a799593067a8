// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/eval.hpp"

#include <stdexcept>

namespace pwhile {

Int eval_int(const IntExpr& e, const Store& s) {
    switch (e->kind) {
        case IntExprNode::Kind::Variable: return s.get(e->var);
        case IntExprNode::Kind::Constant: return e->value;
        case IntExprNode::Kind::Binary: {
            Int a = eval_int(e->lhs, s);
            Int b = eval_int(e->rhs, s);
            switch (e->op) {
                case IntOp::Add: return a + b;
                case IntOp::Sub: return a - b;
                case IntOp::Mul: return a * b;
            }
        }
    }
    throw std::logic_error("unreachable int expression kind");
}

bool eval_bexp(const BExp& e, const Store& s) {
    switch (e->kind) {
        case BExpNode::Kind::Lit: return e->lit;
        case BExpNode::Kind::Cmp: {
            Int a = eval_int(e->cl, s);
            Int b = eval_int(e->cr, s);
            switch (e->cmp) {
                case CmpOp::Lt: return a < b;
                case CmpOp::Le: return a <= b;
                case CmpOp::Eq: return a == b;
                case CmpOp::Ge: return a >= b;
                case CmpOp::Gt: return a > b;
                case CmpOp::Ne: return a != b;
            }
            break;
        }
        case BExpNode::Kind::And: return eval_bexp(e->l, s) && eval_bexp(e->r, s);
        case BExpNode::Kind::Or: return eval_bexp(e->l, s) || eval_bexp(e->r, s);
        case BExpNode::Kind::Not: return !eval_bexp(e->l, s);
    }
    throw std::logic_error("unreachable bexp kind");
}

std::map<Int, Rat> eval_dist(const DistExpr& d, const Store& s) {
    std::map<Int, Rat> out;
    for (const auto& br : d.branches) {
        out[eval_int(br.expr, s)] += br.prob;
    }
    return out;
}

Rat eval_cost(const CostExpr& c, const Store& s, const CoeffAssignment& coeffs) {
    switch (c->kind) {
        case CostExprNode::Kind::Const: return c->value;
        case CostExprNode::Kind::Nat: {
            Int v = eval_int(c->nat_arg, s);
            return v > 0 ? rat_of(v) : Rat(0);
        }
        case CostExprNode::Kind::Iverson:
            return eval_bexp(c->guard, s) ? eval_cost(c->a, s, coeffs) : Rat(0);
        case CostExprNode::Kind::Add: return eval_cost(c->a, s, coeffs) + eval_cost(c->b, s, coeffs);
        case CostExprNode::Kind::Mul: return eval_cost(c->a, s, coeffs) * eval_cost(c->b, s, coeffs);
        case CostExprNode::Kind::Max: {
            Rat a = eval_cost(c->a, s, coeffs);
            Rat b = eval_cost(c->b, s, coeffs);
            return a >= b ? a : b;
        }
        case CostExprNode::Kind::Coeff: {
            auto it = coeffs.find(c->coeff);
            if (it == coeffs.end()) {
                throw std::out_of_range("unbound coefficient symbol ?" + c->coeff);
            }
            return it->second;
        }
    }
    throw std::logic_error("unreachable cost expression kind");
}

IntExpr subst_int(const IntExpr& e, const Var& x, const IntExpr& a) {
    switch (e->kind) {
        case IntExprNode::Kind::Variable: return e->var == x ? a : e;
        case IntExprNode::Kind::Constant: return e;
        case IntExprNode::Kind::Binary: {
            IntExpr l = subst_int(e->lhs, x, a);
            IntExpr r = subst_int(e->rhs, x, a);
            if (l == e->lhs && r == e->rhs) return e;
            return ibin(e->op, l, r);
        }
    }
    throw std::logic_error("unreachable int expression kind");
}

BExp subst_bexp(const BExp& e, const Var& x, const IntExpr& a) {
    switch (e->kind) {
        case BExpNode::Kind::Lit: return e;
        case BExpNode::Kind::Cmp: {
            IntExpr l = subst_int(e->cl, x, a);
            IntExpr r = subst_int(e->cr, x, a);
            if (l == e->cl && r == e->cr) return e;
            return bcmp(e->cmp, l, r);
        }
        case BExpNode::Kind::And: {
            BExp l = subst_bexp(e->l, x, a);
            BExp r = subst_bexp(e->r, x, a);
            if (l == e->l && r == e->r) return e;
            return band(l, r);
        }
        case BExpNode::Kind::Or: {
            BExp l = subst_bexp(e->l, x, a);
            BExp r = subst_bexp(e->r, x, a);
            if (l == e->l && r == e->r) return e;
            return bor(l, r);
        }
        case BExpNode::Kind::Not: {
            BExp l = subst_bexp(e->l, x, a);
            if (l == e->l) return e;
            return bnot(l);
        }
    }
    throw std::logic_error("unreachable bexp kind");
}

CostExpr instantiate_coeffs(const CostExpr& c, const CoeffAssignment& coeffs) {
    switch (c->kind) {
        case CostExprNode::Kind::Const:
        case CostExprNode::Kind::Nat: return c;
        case CostExprNode::Kind::Coeff: {
            auto it = coeffs.find(c->coeff);
            return it == coeffs.end() ? c : cconst(it->second);
        }
        case CostExprNode::Kind::Iverson: {
            CostExpr body = instantiate_coeffs(c->a, coeffs);
            return body == c->a ? c : civerson(c->guard, body);
        }
        case CostExprNode::Kind::Add:
        case CostExprNode::Kind::Mul:
        case CostExprNode::Kind::Max: {
            CostExpr a = instantiate_coeffs(c->a, coeffs);
            CostExpr b = instantiate_coeffs(c->b, coeffs);
            if (a == c->a && b == c->b) return c;
            auto n = std::make_shared<CostExprNode>();
            n->kind = c->kind;
            n->a = a;
            n->b = b;
            return n;
        }
    }
    throw std::logic_error("unreachable cost expression kind");
}

}  // namespace pwhile
