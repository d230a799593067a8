// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/transformer.hpp"

#include <vector>

#include "pwhile/eval.hpp"
#include "pwhile/printer.hpp"

namespace pwhile {

Expectation expectation_zero() {
    return [](const Store&) { return ExtRat(Rat(0)); };
}

Expectation expectation_of(const CostExpr& f) {
    return [f](const Store& s) { return ExtRat(eval_cost(f, s)); };
}

CostExpr subst(const CostExpr& f, const Var& x, const IntExpr& a) {
    switch (f->kind) {
        case CostExprNode::Kind::Const:
        case CostExprNode::Kind::Coeff: return f;
        case CostExprNode::Kind::Nat: {
            IntExpr arg = subst_int(f->nat_arg, x, a);
            return arg == f->nat_arg ? f : cnat(arg);
        }
        case CostExprNode::Kind::Iverson: {
            BExp g = subst_bexp(f->guard, x, a);
            CostExpr body = subst(f->a, x, a);
            if (g == f->guard && body == f->a) return f;
            return civerson(g, body);
        }
        case CostExprNode::Kind::Add: {
            CostExpr l = subst(f->a, x, a), r = subst(f->b, x, a);
            if (l == f->a && r == f->b) return f;
            return cadd(l, r);
        }
        case CostExprNode::Kind::Mul: {
            CostExpr l = subst(f->a, x, a), r = subst(f->b, x, a);
            if (l == f->a && r == f->b) return f;
            return cmul(l, r);
        }
        case CostExprNode::Kind::Max: {
            CostExpr l = subst(f->a, x, a), r = subst(f->b, x, a);
            if (l == f->a && r == f->b) return f;
            return cmax(l, r);
        }
    }
    throw std::logic_error("unreachable cost expression kind");
}

namespace {

bool is_const(const CostExpr& c) { return c->kind == CostExprNode::Kind::Const; }
bool is_zero(const CostExpr& c) { return is_const(c) && c->value == 0; }

void flatten_add(const CostExpr& c, std::vector<CostExpr>& out) {
    if (c->kind == CostExprNode::Kind::Add) {
        flatten_add(c->a, out);
        flatten_add(c->b, out);
    } else {
        out.push_back(c);
    }
}

void flatten_mul(const CostExpr& c, std::vector<CostExpr>& out) {
    if (c->kind == CostExprNode::Kind::Mul) {
        flatten_mul(c->a, out);
        flatten_mul(c->b, out);
    } else {
        out.push_back(c);
    }
}

CostExpr rebuild_add(const Rat& constant, const std::vector<CostExpr>& terms) {
    CostExpr acc = nullptr;
    if (constant != 0) acc = cconst(constant);
    for (const auto& t : terms) {
        acc = acc == nullptr ? t : cadd(acc, t);
    }
    return acc == nullptr ? cconst(0) : acc;
}

}  // namespace

CostExpr simplify(const CostExpr& c) {
    switch (c->kind) {
        case CostExprNode::Kind::Const:
        case CostExprNode::Kind::Coeff: return c;
        case CostExprNode::Kind::Nat: {
            IntExpr arg = int_simplify(c->nat_arg);
            if (arg->kind == IntExprNode::Kind::Constant) {
                return arg->value > 0 ? cconst(rat_of(arg->value)) : cconst(0);
            }
            return arg == c->nat_arg ? c : cnat(arg);
        }
        case CostExprNode::Kind::Iverson: {
            BExp guard = bexp_simplify(c->guard);
            CostExpr body = simplify(c->a);
            if (guard->kind == BExpNode::Kind::Lit) {
                return guard->lit ? body : cconst(0);
            }
            if (is_zero(body)) return body;
            // [phi]*([phi]*c) = [phi]*c
            if (body->kind == CostExprNode::Kind::Iverson && equal(body->guard, guard)) {
                return civerson(guard, body->a);
            }
            return civerson(guard, body);
        }
        case CostExprNode::Kind::Add: {
            std::vector<CostExpr> raw;
            flatten_add(c, raw);
            Rat constant(0);
            std::vector<CostExpr> terms;
            for (const auto& t : raw) {
                CostExpr s = simplify(t);
                if (s->kind == CostExprNode::Kind::Add) {
                    std::vector<CostExpr> inner;
                    flatten_add(s, inner);
                    for (const auto& u : inner) {
                        if (is_const(u)) {
                            constant += u->value;
                        } else {
                            terms.push_back(u);
                        }
                    }
                } else if (is_const(s)) {
                    constant += s->value;
                } else {
                    terms.push_back(s);
                }
            }
            return rebuild_add(constant, terms);
        }
        case CostExprNode::Kind::Mul: {
            std::vector<CostExpr> raw;
            flatten_mul(c, raw);
            Rat constant(1);
            std::vector<CostExpr> factors;
            for (const auto& t : raw) {
                CostExpr s = simplify(t);
                if (s->kind == CostExprNode::Kind::Mul) {
                    std::vector<CostExpr> inner;
                    flatten_mul(s, inner);
                    for (const auto& u : inner) {
                        if (is_const(u)) {
                            constant *= u->value;
                        } else {
                            factors.push_back(u);
                        }
                    }
                } else if (is_const(s)) {
                    constant *= s->value;
                } else {
                    factors.push_back(s);
                }
            }
            if (constant == 0) return cconst(0);
            CostExpr acc = nullptr;
            if (constant != 1 || factors.empty()) acc = cconst(constant);
            for (const auto& f : factors) {
                acc = acc == nullptr ? f : cmul(acc, f);
            }
            return acc;
        }
        case CostExprNode::Kind::Max: {
            CostExpr a = simplify(c->a);
            CostExpr b = simplify(c->b);
            if (equal(a, b)) return a;
            if (is_const(a) && is_const(b)) return a->value >= b->value ? a : b;
            // Cost expressions are nonnegative, so 0 is a unit for max.
            if (is_zero(a)) return b;
            if (is_zero(b)) return a;
            return cmax(a, b);
        }
    }
    throw std::logic_error("unreachable cost expression kind");
}

CostExpr et_symbolic(CostMode mode, const Command& c, const CostExpr& f, LoopHook& loops) {
    switch (c->kind) {
        case CommandNode::Kind::Skip: return f;
        case CommandNode::Kind::Abort: return cconst(0);
        case CommandNode::Kind::Tick:
            if (mode == CostMode::Cost) return simplify(cadd(cconst(c->rate), f));
            return f;
        case CommandNode::Kind::Assign: {
            CostExpr sum = nullptr;
            for (const auto& br : c->dist.branches) {
                CostExpr term = cmul(cconst(br.prob), subst(f, c->var, br.expr));
                sum = sum == nullptr ? term : cadd(sum, term);
            }
            return simplify(sum);
        }
        case CommandNode::Kind::If: {
            CostExpr then_part = et_symbolic(mode, c->a, f, loops);
            CostExpr else_part = et_symbolic(mode, c->b, f, loops);
            CostExpr lhs = civerson(band(c->inv, c->guard), then_part);
            CostExpr rhs = civerson(band(c->inv, bnot(c->guard)), else_part);
            return simplify(cadd(lhs, rhs));
        }
        case CommandNode::Kind::While: return loops.analyze_while(mode, c, f);
        case CommandNode::Kind::NdChoice:
            return simplify(
                cmax(et_symbolic(mode, c->a, f, loops), et_symbolic(mode, c->b, f, loops)));
        case CommandNode::Kind::PChoice: {
            CostExpr left = cmul(cconst(c->prob), et_symbolic(mode, c->a, f, loops));
            CostExpr right = cmul(cconst(Rat(1) - c->prob), et_symbolic(mode, c->b, f, loops));
            return simplify(cadd(left, right));
        }
        case CommandNode::Kind::Seq:
            return et_symbolic(mode, c->a, et_symbolic(mode, c->b, f, loops), loops);
    }
    throw std::logic_error("unreachable command kind");
}

namespace {

class RejectLoops final : public LoopHook {
  public:
    CostExpr analyze_while(CostMode, const Command& loop, const CostExpr&) override {
        throw LoopAnalysisError("loop-free transformer applied to a while command", print(loop));
    }
};

}  // namespace

CostExpr et_symbolic_loopfree(CostMode mode, const Command& c, const CostExpr& f) {
    RejectLoops reject;
    return et_symbolic(mode, c, f, reject);
}

ExtRat et_semantic_at(CostMode mode, const Command& c, const Expectation& f, long fuel,
                      const Store& s) {
    switch (c->kind) {
        case CommandNode::Kind::Skip: return f(s);
        case CommandNode::Kind::Abort: return ExtRat(Rat(0));
        case CommandNode::Kind::Tick: {
            ExtRat v = f(s);
            if (mode == CostMode::Cost) return ExtRat(Rat(c->rate)) + v;
            return v;
        }
        case CommandNode::Kind::Assign: {
            ExtRat sum{Rat(0)};
            for (const auto& [value, prob] : eval_dist(c->dist, s)) {
                sum = sum + f(s.with(c->var, value)) * prob;
            }
            return sum;
        }
        case CommandNode::Kind::If: {
            if (!eval_bexp(c->inv, s)) return ExtRat(Rat(0));
            if (eval_bexp(c->guard, s)) return et_semantic_at(mode, c->a, f, fuel, s);
            return et_semantic_at(mode, c->b, f, fuel, s);
        }
        case CommandNode::Kind::While: {
            // Kleene iterate F_fuel of the loop functional, from bottom.
            std::function<ExtRat(long, const Store&)> iterate = [&](long k,
                                                                    const Store& sigma) -> ExtRat {
                if (!eval_bexp(c->inv, sigma)) return ExtRat(Rat(0));
                if (!eval_bexp(c->guard, sigma)) return f(sigma);
                if (k <= 0) return ExtRat(Rat(0));
                Expectation rest = [&iterate, k](const Store& t) { return iterate(k - 1, t); };
                return et_semantic_at(mode, c->a, rest, k - 1, sigma);
            };
            return iterate(fuel, s);
        }
        case CommandNode::Kind::NdChoice:
            return ext_max(et_semantic_at(mode, c->a, f, fuel, s),
                           et_semantic_at(mode, c->b, f, fuel, s));
        case CommandNode::Kind::PChoice: {
            ExtRat sum{Rat(0)};
            if (c->prob > 0) sum = sum + et_semantic_at(mode, c->a, f, fuel, s) * c->prob;
            if (c->prob < 1) {
                sum = sum + et_semantic_at(mode, c->b, f, fuel, s) * (Rat(1) - c->prob);
            }
            return sum;
        }
        case CommandNode::Kind::Seq: {
            Expectation mid = [&](const Store& t) { return et_semantic_at(mode, c->b, f, fuel, t); };
            return et_semantic_at(mode, c->a, mid, fuel, s);
        }
    }
    throw std::logic_error("unreachable command kind");
}

Expectation et_semantic(CostMode mode, const Command& c, const Expectation& f, long fuel) {
    return [mode, c, f, fuel](const Store& s) { return et_semantic_at(mode, c, f, fuel, s); };
}

ExtRat et_bar(CostMode mode, const Configuration& gamma, const Expectation& f, long fuel) {
    switch (gamma.kind) {
        case Configuration::Kind::Running:
            return et_semantic_at(mode, gamma.cmd, f, fuel, gamma.store);
        case Configuration::Kind::Halted: return f(gamma.store);
        case Configuration::Kind::Aborted: return ExtRat(Rat(0));
    }
    throw std::logic_error("unreachable configuration kind");
}

}  // namespace pwhile
