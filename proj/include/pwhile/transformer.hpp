// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>

#include "pwhile/ast.hpp"
#include "pwhile/semantics.hpp"

namespace pwhile {

// Mode flag of the generic transformer: cost counts tick weights, value
// ignores them and propagates the post-expectation only.
enum class CostMode { Cost, Value };

// Expectations as opaque callables, for property tests of the semantic
// transformer. Symbolic expectations are CostExpr.
using Expectation = std::function<ExtRat(const Store&)>;

Expectation expectation_zero();
Expectation expectation_of(const CostExpr& f);

struct LoopAnalysisError : std::runtime_error {
    std::string loop_text;
    LoopAnalysisError(const std::string& msg, std::string loop)
        : std::runtime_error(msg + " in loop: " + loop), loop_text(std::move(loop)) {}
};

// Supplies symbolic bounds for while loops encountered during et_symbolic;
// implemented by the analysis layer. Throws LoopAnalysisError on failure.
class LoopHook {
  public:
    virtual ~LoopHook() = default;
    virtual CostExpr analyze_while(CostMode mode, const Command& loop, const CostExpr& f) = 0;
};

// Structural expectation transformer. Loop-free commands are handled exactly;
// while loops are delegated to `loops`.
CostExpr et_symbolic(CostMode mode, const Command& c, const CostExpr& f, LoopHook& loops);

// Convenience for loop-free commands: any while raises LoopAnalysisError.
CostExpr et_symbolic_loopfree(CostMode mode, const Command& c, const CostExpr& f);

// Exact semantics of the transformer with while approximated by `fuel` Kleene
// iterations from the bottom expectation (a monotone under-approximation of
// the least fixed point). Exact for loop-free commands.
Expectation et_semantic(CostMode mode, const Command& c, const Expectation& f, long fuel);
ExtRat et_semantic_at(CostMode mode, const Command& c, const Expectation& f, long fuel,
                      const Store& s);

// The transformer lifted to configurations: running applies the transformer,
// halted applies the post-expectation, aborted yields 0.
ExtRat et_bar(CostMode mode, const Configuration& gamma, const Expectation& f, long fuel);

// Semantics-preserving rewriting: constant folding, units, literal Iverson
// guards, flattening of sums and products. eval_cost is invariant under it.
CostExpr simplify(const CostExpr& c);

// Substitution of `a` for `x` inside nat arguments and Iverson guards;
// purely syntactic.
CostExpr subst(const CostExpr& f, const Var& x, const IntExpr& a);

}  // namespace pwhile
