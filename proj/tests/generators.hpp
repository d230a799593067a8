// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Seeded random generators for property tests: loop-free programs, stores,
// and cost expressions. Distributions are kept small and merge-friendly so
// exhaustive oracle runs stay cheap.
#pragma once

#include <random>
#include <vector>

#include "pwhile/ast.hpp"

namespace pwhile::testgen {

struct Gen {
    std::mt19937_64 rng;
    std::vector<Var> vars;

    explicit Gen(std::uint64_t seed, int n_vars = 4) : rng(seed) {
        const char* names[] = {"x", "y", "z", "w"};
        for (int i = 0; i < n_vars && i < 4; ++i) vars.emplace_back(names[i]);
    }

    long pick(long n) { return static_cast<long>(rng() % static_cast<std::uint64_t>(n)); }

    Var var() { return vars[pick(static_cast<long>(vars.size()))]; }

    IntExpr int_expr(int depth = 2) {
        if (depth <= 0 || pick(3) == 0) {
            return pick(2) == 0 ? ivar(var()) : iconst(pick(7) - 2);
        }
        switch (pick(4)) {
            case 0: return iadd(int_expr(depth - 1), int_expr(depth - 1));
            case 1: return isub(int_expr(depth - 1), int_expr(depth - 1));
            case 2: return imul(iconst(pick(3) + 1), int_expr(depth - 1));
            default: return ivar(var());
        }
    }

    BExp comparison() {
        CmpOp ops[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt, CmpOp::Ne};
        return bcmp(ops[pick(6)], int_expr(1), int_expr(1));
    }

    BExp bexp(int depth = 2) {
        if (depth <= 0 || pick(3) == 0) {
            switch (pick(4)) {
                case 0: return btrue();
                case 1: return bfalse();
                default: return comparison();
            }
        }
        switch (pick(3)) {
            case 0: return band(bexp(depth - 1), bexp(depth - 1));
            case 1: return bor(bexp(depth - 1), bexp(depth - 1));
            default: return bnot(bexp(depth - 1));
        }
    }

    DistExpr dist() {
        // 1-3 branches over var +/- small constants; exact unit mass.
        Var base = var();
        long n = 1 + pick(3);
        DistExpr d;
        auto expr = [&]() -> IntExpr {
            switch (pick(4)) {
                case 0: return iconst(pick(5) - 1);
                case 1: return ivar(base);
                case 2: return iadd(ivar(base), iconst(1 + pick(2)));
                default: return isub(ivar(base), iconst(1 + pick(2)));
            }
        };
        if (n == 1) {
            d.branches.push_back({Rat(1), expr()});
        } else if (n == 2) {
            Rat p(1 + pick(3), 4);  // 1/4, 1/2, 3/4
            d.branches.push_back({p, expr()});
            d.branches.push_back({Rat(1) - p, expr()});
        } else {
            d.branches.push_back({Rat(1, 2), expr()});
            d.branches.push_back({Rat(1, 3), expr()});
            d.branches.push_back({Rat(1, 6), expr()});
        }
        return d;
    }

    // Loop-free command of bounded depth. Aborts and unsatisfiable invariants
    // appear with low probability to exercise the bottom cases.
    Command command(int depth = 4) {
        if (depth <= 0 || pick(4) == 0) {
            switch (pick(8)) {
                case 0: return cskip();
                case 1: return cabort();
                case 2:
                case 3: return ctick(Rat(1 + pick(4), 1 + pick(2)));
                default: return cassign(var(), dist());
            }
        }
        switch (pick(5)) {
            case 0: {
                BExp inv = pick(5) == 0 ? bexp(1) : btrue();
                return cif(inv, bexp(1), command(depth - 1), command(depth - 1));
            }
            case 1: return cnd(command(depth - 1), command(depth - 1));
            case 2: {
                Rat p(pick(5), 4);  // includes the degenerate 0 and 1
                return cprob(p, command(depth - 1), command(depth - 1));
            }
            default: return cseq(command(depth - 1), command(depth - 1));
        }
    }

    Store store(long lo = -3, long hi = 5) {
        Store s;
        for (const auto& v : vars) {
            s.bindings[v] = Int(lo + pick(hi - lo + 1));
        }
        return s;
    }

    // Small pool of coefficient-free cost expressions.
    CostExpr cost_expr(int depth = 2) {
        if (depth <= 0 || pick(3) == 0) {
            switch (pick(4)) {
                case 0: return cconst(Rat(pick(5), 1 + pick(2)));
                case 1: return cconst(0);
                default: return cnat(int_expr(1));
            }
        }
        switch (pick(4)) {
            case 0: return cadd(cost_expr(depth - 1), cost_expr(depth - 1));
            case 1: return cmul(cconst(Rat(1 + pick(3), 1 + pick(2))), cost_expr(depth - 1));
            case 2: return cmax(cost_expr(depth - 1), cost_expr(depth - 1));
            default: return civerson(comparison(), cost_expr(depth - 1));
        }
    }
};

}  // namespace pwhile::testgen
