// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/ast.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pwhile {

std::string rat_decimal(const Rat& r, int digits) {
    mpf_class f(r, 256);
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << f;
    return os.str();
}

IntExpr ivar(Var v) {
    auto n = std::make_shared<IntExprNode>();
    n->kind = IntExprNode::Kind::Variable;
    n->var = std::move(v);
    return n;
}

IntExpr ivar(const std::string& name) { return ivar(Var(name)); }

IntExpr iconst(Int z) {
    auto n = std::make_shared<IntExprNode>();
    n->kind = IntExprNode::Kind::Constant;
    n->value = std::move(z);
    return n;
}

IntExpr iconst(long z) { return iconst(Int(z)); }

IntExpr ibin(IntOp op, IntExpr a, IntExpr b) {
    auto n = std::make_shared<IntExprNode>();
    n->kind = IntExprNode::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

namespace {

// Splits an expression into a constant-free core plus an integer offset;
// core == nullptr encodes a pure constant.
void split_offset(const IntExpr& e, IntExpr& core, Int& offset) {
    if (e->kind == IntExprNode::Kind::Constant) {
        core = nullptr;
        offset = e->value;
        return;
    }
    if (e->kind == IntExprNode::Kind::Binary &&
        (e->op == IntOp::Add || e->op == IntOp::Sub) &&
        e->rhs->kind == IntExprNode::Kind::Constant) {
        split_offset(e->lhs, core, offset);
        offset += e->op == IntOp::Add ? e->rhs->value : Int(-e->rhs->value);
        return;
    }
    core = e;
    offset = 0;
}

IntExpr rebuild_offset(const IntExpr& core, const Int& offset) {
    if (core == nullptr) return iconst(offset);
    if (offset == 0) return core;
    // fold into a leading constant of a (k - e) core
    if (core->kind == IntExprNode::Kind::Binary && core->op == IntOp::Sub &&
        core->lhs->kind == IntExprNode::Kind::Constant) {
        return isub(iconst(core->lhs->value + offset), core->rhs);
    }
    if (offset > 0) return iadd(core, iconst(offset));
    return isub(core, iconst(Int(-offset)));
}

}  // namespace

IntExpr int_simplify(const IntExpr& e) {
    if (e->kind != IntExprNode::Kind::Binary) return e;
    IntExpr a = int_simplify(e->lhs);
    IntExpr b = int_simplify(e->rhs);
    bool ca = a->kind == IntExprNode::Kind::Constant;
    bool cb = b->kind == IntExprNode::Kind::Constant;
    if (ca && cb) {
        switch (e->op) {
            case IntOp::Add: return iconst(a->value + b->value);
            case IntOp::Sub: return iconst(a->value - b->value);
            case IntOp::Mul: return iconst(a->value * b->value);
        }
    }
    switch (e->op) {
        case IntOp::Add:
            if (ca && a->value == 0) return b;
            if (cb && b->value == 0) return a;
            if (cb) {
                IntExpr core;
                Int offset;
                split_offset(iadd(a, b), core, offset);
                return rebuild_offset(core, offset);
            }
            break;
        case IntOp::Sub:
            if (cb && b->value == 0) return a;
            if (cb) {
                IntExpr core;
                Int offset;
                split_offset(isub(a, b), core, offset);
                return rebuild_offset(core, offset);
            }
            break;
        case IntOp::Mul:
            if (ca && a->value == 1) return b;
            if (cb && b->value == 1) return a;
            if ((ca && a->value == 0) || (cb && b->value == 0)) return iconst(0);
            break;
    }
    if (a == e->lhs && b == e->rhs) return e;
    return ibin(e->op, a, b);
}

BExp bexp_simplify(const BExp& e) {
    switch (e->kind) {
        case BExpNode::Kind::Lit:
        case BExpNode::Kind::Cmp: return e;
        case BExpNode::Kind::And: {
            BExp l = bexp_simplify(e->l);
            BExp r = bexp_simplify(e->r);
            if (l->kind == BExpNode::Kind::Lit) return l->lit ? r : l;
            if (r->kind == BExpNode::Kind::Lit) return r->lit ? l : r;
            if (l == e->l && r == e->r) return e;
            return band(l, r);
        }
        case BExpNode::Kind::Or: {
            BExp l = bexp_simplify(e->l);
            BExp r = bexp_simplify(e->r);
            if (l->kind == BExpNode::Kind::Lit) return l->lit ? l : r;
            if (r->kind == BExpNode::Kind::Lit) return r->lit ? r : l;
            if (l == e->l && r == e->r) return e;
            return bor(l, r);
        }
        case BExpNode::Kind::Not: {
            BExp l = bexp_simplify(e->l);
            if (l->kind == BExpNode::Kind::Lit) return l->lit ? bfalse() : btrue();
            if (l == e->l) return e;
            return bnot(l);
        }
    }
    throw std::logic_error("unreachable bexp kind");
}

BExp btrue() {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::Lit;
    n->lit = true;
    return n;
}

BExp bfalse() {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::Lit;
    n->lit = false;
    return n;
}

BExp bcmp(CmpOp op, IntExpr a, IntExpr b) {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::Cmp;
    n->cmp = op;
    n->cl = std::move(a);
    n->cr = std::move(b);
    return n;
}

BExp band(BExp a, BExp b) {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::And;
    n->l = std::move(a);
    n->r = std::move(b);
    return n;
}

BExp bor(BExp a, BExp b) {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::Or;
    n->l = std::move(a);
    n->r = std::move(b);
    return n;
}

BExp bnot(BExp a) {
    auto n = std::make_shared<BExpNode>();
    n->kind = BExpNode::Kind::Not;
    n->l = std::move(a);
    return n;
}

DistExpr dirac(IntExpr e) {
    DistExpr d;
    d.branches.push_back({Rat(1), std::move(e)});
    return d;
}

void validate_dist(const DistExpr& d) {
    if (d.branches.empty()) throw std::invalid_argument("distribution has no branches");
    Rat sum(0);
    for (const auto& br : d.branches) {
        if (br.prob <= 0 || br.prob > 1) {
            throw std::invalid_argument("distribution probability " + rat_str(br.prob) +
                                        " outside (0,1]");
        }
        sum += br.prob;
    }
    if (sum != 1) {
        throw std::invalid_argument("distribution probabilities sum to " + rat_str(sum) +
                                    " != 1");
    }
}

static Command mk(CommandNode::Kind k) {
    auto n = std::make_shared<CommandNode>();
    n->kind = k;
    return n;
}

Command cskip() { return mk(CommandNode::Kind::Skip); }
Command cabort() { return mk(CommandNode::Kind::Abort); }

Command ctick(Rat rate) {
    rate.canonicalize();
    if (rate < 0) throw std::invalid_argument("tick rate must be nonnegative");
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::Tick;
    n->rate = std::move(rate);
    return n;
}

Command cassign(Var x, DistExpr d) {
    for (auto& br : d.branches) br.prob.canonicalize();
    validate_dist(d);
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::Assign;
    n->var = std::move(x);
    n->dist = std::move(d);
    return n;
}

Command cif(BExp inv, BExp guard, Command then_cmd, Command else_cmd) {
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::If;
    n->inv = std::move(inv);
    n->guard = std::move(guard);
    n->a = std::move(then_cmd);
    n->b = std::move(else_cmd);
    return n;
}

Command cwhile(BExp inv, BExp guard, Command body) {
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::While;
    n->inv = std::move(inv);
    n->guard = std::move(guard);
    n->a = std::move(body);
    return n;
}

Command cnd(Command a, Command b) {
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::NdChoice;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

Command cprob(Rat p, Command a, Command b) {
    p.canonicalize();
    if (p < 0 || p > 1) throw std::invalid_argument("choice probability outside [0,1]");
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::PChoice;
    n->prob = std::move(p);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

Command cseq(Command a, Command b) {
    auto n = std::make_shared<CommandNode>();
    n->kind = CommandNode::Kind::Seq;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

CostExpr cconst(Rat q) {
    q.canonicalize();
    if (q < 0) throw std::invalid_argument("cost constant must be nonnegative");
    auto n = std::make_shared<CostExprNode>();
    n->kind = CostExprNode::Kind::Const;
    n->value = std::move(q);
    return n;
}

CostExpr cconst(long q) { return cconst(Rat(q)); }

CostExpr cnat(IntExpr a) {
    auto n = std::make_shared<CostExprNode>();
    n->kind = CostExprNode::Kind::Nat;
    n->nat_arg = std::move(a);
    return n;
}

CostExpr civerson(BExp guard, CostExpr body) {
    auto n = std::make_shared<CostExprNode>();
    n->kind = CostExprNode::Kind::Iverson;
    n->guard = std::move(guard);
    n->a = std::move(body);
    return n;
}

static CostExpr cbin(CostExprNode::Kind k, CostExpr a, CostExpr b) {
    auto n = std::make_shared<CostExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

CostExpr cadd(CostExpr a, CostExpr b) { return cbin(CostExprNode::Kind::Add, std::move(a), std::move(b)); }
CostExpr cmul(CostExpr a, CostExpr b) { return cbin(CostExprNode::Kind::Mul, std::move(a), std::move(b)); }
CostExpr cmax(CostExpr a, CostExpr b) { return cbin(CostExprNode::Kind::Max, std::move(a), std::move(b)); }

CostExpr ccoeff(std::string symbol) {
    auto n = std::make_shared<CostExprNode>();
    n->kind = CostExprNode::Kind::Coeff;
    n->coeff = std::move(symbol);
    return n;
}

bool equal(const IntExpr& a, const IntExpr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case IntExprNode::Kind::Variable: return a->var == b->var;
        case IntExprNode::Kind::Constant: return a->value == b->value;
        case IntExprNode::Kind::Binary:
            return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

bool equal(const BExp& a, const BExp& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case BExpNode::Kind::Lit: return a->lit == b->lit;
        case BExpNode::Kind::Cmp:
            return a->cmp == b->cmp && equal(a->cl, b->cl) && equal(a->cr, b->cr);
        case BExpNode::Kind::And:
        case BExpNode::Kind::Or: return equal(a->l, b->l) && equal(a->r, b->r);
        case BExpNode::Kind::Not: return equal(a->l, b->l);
    }
    return false;
}

bool equal(const DistExpr& a, const DistExpr& b) {
    if (a.branches.size() != b.branches.size()) return false;
    for (size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].prob != b.branches[i].prob) return false;
        if (!equal(a.branches[i].expr, b.branches[i].expr)) return false;
    }
    return true;
}

bool equal(const Command& a, const Command& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case CommandNode::Kind::Skip:
        case CommandNode::Kind::Abort: return true;
        case CommandNode::Kind::Tick: return a->rate == b->rate;
        case CommandNode::Kind::Assign: return a->var == b->var && equal(a->dist, b->dist);
        case CommandNode::Kind::If:
            return equal(a->inv, b->inv) && equal(a->guard, b->guard) && equal(a->a, b->a) &&
                   equal(a->b, b->b);
        case CommandNode::Kind::While:
            return equal(a->inv, b->inv) && equal(a->guard, b->guard) && equal(a->a, b->a);
        case CommandNode::Kind::NdChoice: return equal(a->a, b->a) && equal(a->b, b->b);
        case CommandNode::Kind::PChoice:
            return a->prob == b->prob && equal(a->a, b->a) && equal(a->b, b->b);
        case CommandNode::Kind::Seq: return equal(a->a, b->a) && equal(a->b, b->b);
    }
    return false;
}

bool equal(const CostExpr& a, const CostExpr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case CostExprNode::Kind::Const: return a->value == b->value;
        case CostExprNode::Kind::Nat: return equal(a->nat_arg, b->nat_arg);
        case CostExprNode::Kind::Iverson: return equal(a->guard, b->guard) && equal(a->a, b->a);
        case CostExprNode::Kind::Add:
        case CostExprNode::Kind::Mul:
        case CostExprNode::Kind::Max: return equal(a->a, b->a) && equal(a->b, b->b);
        case CostExprNode::Kind::Coeff: return a->coeff == b->coeff;
    }
    return false;
}

void collect_free_vars(const IntExpr& e, std::set<Var>& out) {
    switch (e->kind) {
        case IntExprNode::Kind::Variable: out.insert(e->var); break;
        case IntExprNode::Kind::Constant: break;
        case IntExprNode::Kind::Binary:
            collect_free_vars(e->lhs, out);
            collect_free_vars(e->rhs, out);
            break;
    }
}

void collect_free_vars(const BExp& e, std::set<Var>& out) {
    switch (e->kind) {
        case BExpNode::Kind::Lit: break;
        case BExpNode::Kind::Cmp:
            collect_free_vars(e->cl, out);
            collect_free_vars(e->cr, out);
            break;
        case BExpNode::Kind::And:
        case BExpNode::Kind::Or:
            collect_free_vars(e->l, out);
            collect_free_vars(e->r, out);
            break;
        case BExpNode::Kind::Not: collect_free_vars(e->l, out); break;
    }
}

void collect_free_vars(const DistExpr& d, std::set<Var>& out) {
    for (const auto& br : d.branches) collect_free_vars(br.expr, out);
}

void collect_free_vars(const Command& c, std::set<Var>& out) {
    switch (c->kind) {
        case CommandNode::Kind::Skip:
        case CommandNode::Kind::Abort:
        case CommandNode::Kind::Tick: break;
        case CommandNode::Kind::Assign:
            out.insert(c->var);
            collect_free_vars(c->dist, out);
            break;
        case CommandNode::Kind::If:
            collect_free_vars(c->inv, out);
            collect_free_vars(c->guard, out);
            collect_free_vars(c->a, out);
            collect_free_vars(c->b, out);
            break;
        case CommandNode::Kind::While:
            collect_free_vars(c->inv, out);
            collect_free_vars(c->guard, out);
            collect_free_vars(c->a, out);
            break;
        case CommandNode::Kind::NdChoice:
        case CommandNode::Kind::Seq:
            collect_free_vars(c->a, out);
            collect_free_vars(c->b, out);
            break;
        case CommandNode::Kind::PChoice:
            collect_free_vars(c->a, out);
            collect_free_vars(c->b, out);
            break;
    }
}

void collect_free_vars(const CostExpr& c, std::set<Var>& out) {
    switch (c->kind) {
        case CostExprNode::Kind::Const:
        case CostExprNode::Kind::Coeff: break;
        case CostExprNode::Kind::Nat: collect_free_vars(c->nat_arg, out); break;
        case CostExprNode::Kind::Iverson:
            collect_free_vars(c->guard, out);
            collect_free_vars(c->a, out);
            break;
        case CostExprNode::Kind::Add:
        case CostExprNode::Kind::Mul:
        case CostExprNode::Kind::Max:
            collect_free_vars(c->a, out);
            collect_free_vars(c->b, out);
            break;
    }
}

static void collect_coeffs(const CostExpr& c, std::vector<std::string>& out) {
    switch (c->kind) {
        case CostExprNode::Kind::Coeff:
            if (std::find(out.begin(), out.end(), c->coeff) == out.end()) out.push_back(c->coeff);
            break;
        case CostExprNode::Kind::Iverson: collect_coeffs(c->a, out); break;
        case CostExprNode::Kind::Add:
        case CostExprNode::Kind::Mul:
        case CostExprNode::Kind::Max:
            collect_coeffs(c->a, out);
            collect_coeffs(c->b, out);
            break;
        default: break;
    }
}

std::vector<std::string> coeff_symbols(const CostExpr& c) {
    std::vector<std::string> out;
    collect_coeffs(c, out);
    return out;
}

}  // namespace pwhile
