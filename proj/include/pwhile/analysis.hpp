// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pwhile/solver.hpp"
#include "pwhile/transformer.hpp"

namespace pwhile {

// A norm nat(expr): the store abstraction bounds are expressed in.
struct Norm {
    IntExpr expr;
};

enum class StrategyKind { Decompose, Invariant, Unroll };

std::string strategy_name(StrategyKind s);

struct LoopStrategy {
    StrategyKind kind = StrategyKind::Decompose;
    long fuel = 8;  // Unroll only
};

struct AnalysisOptions {
    std::vector<StrategyKind> order = {StrategyKind::Decompose, StrategyKind::Invariant,
                                       StrategyKind::Unroll};
    int min_degree = 1;  // analyze_loop pins both bounds to its degree argument
    int max_degree = 2;
    long unroll_fuel = 8;
    long refute_samples = 2000;
    std::uint64_t seed = 0;
    long concavity_trials = 200;
};

// Heuristic norm selection from the loop's guard and invariant comparisons,
// recursively including inner loops; guard first, then invariant, then inner,
// left to right, syntactic duplicates removed.
//   a > b  ->  nat(a-b)
//   a >= b ->  nat(a-b+1), nat(a-b)
//   a = b  ->  both directions
std::vector<Norm> select_norms(const Command& loop);

enum class CertKind { None, Farkas, Numeric };

struct ConstraintRecord {
    Constraint constraint;  // template symbols still free
    CertKind certificate = CertKind::None;
};

struct LoopBoundDerivation {
    std::string label;
    std::string loop_text;
    CostMode mode = CostMode::Cost;
    std::string continuation;  // printed f
    StrategyKind strategy = StrategyKind::Decompose;
    int degree = 1;
    std::vector<Norm> norms;
    CostExpr body_cost;                      // g (cost mode only, may be null)
    std::vector<CostExpr> expected_norms;    // h_i per norm
    std::vector<std::string> coefficients;   // template symbols, declaration order
    CoeffAssignment solution;
    CostExpr bound;
    std::vector<ConstraintRecord> constraints;
    bool joint = false;  // solved within an enclosing invariant system
};

// Replays a derivation: re-reduces every constraint with the solved
// coefficients, preferring a Farkas certificate and falling back to numeric
// sampling. Returns false when any constraint is refuted.
bool replay_derivation(LoopBoundDerivation& d, long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Loop analysis driver
// ---------------------------------------------------------------------------

class Analyzer final : public LoopHook {
  public:
    explicit Analyzer(AnalysisOptions opts = {});
    ~Analyzer() override;

    // Pre-assigns loop labels loop1, loop2, ... in program order.
    void register_program(const Command& root);

    CostExpr analyze_while(CostMode mode, const Command& loop, const CostExpr& f) override;

    const std::vector<LoopBoundDerivation>& derivations() const { return derivations_; }
    std::string label_of(const Command& loop);

    struct Impl;

  private:
    AnalysisOptions opts_;
    std::vector<LoopBoundDerivation> derivations_;
    std::unique_ptr<Impl> impl_;
};

// Full transformer with loop analysis; the analysis entry point.
CostExpr et_symbolic_analyzed(CostMode mode, const Command& c, const CostExpr& f,
                              const AnalysisOptions& opts,
                              std::vector<LoopBoundDerivation>* derivations = nullptr);

// Single-strategy transformer.
CostExpr et_symbolic(CostMode mode, const Command& c, const CostExpr& f,
                     const LoopStrategy& strategy);

// Analyzes one while command with a fixed strategy and degree.
struct LoopAnalysisResult {
    CostExpr bound;
    LoopBoundDerivation derivation;
};
LoopAnalysisResult analyze_loop(CostMode mode, const Command& loop, const CostExpr& f,
                                StrategyKind strategy, int degree,
                                const AnalysisOptions& opts = {});

// ---------------------------------------------------------------------------
// Upper invariants (certified / refuted / unknown)
// ---------------------------------------------------------------------------

struct InvariantVerdict {
    enum class Kind { Certified, Refuted, Unknown };
    Kind kind;
    std::optional<Store> witness;  // Refuted
    std::string detail;
};

InvariantVerdict check_upper_invariant(CostMode mode, const Command& loop, const CostExpr& f,
                                       const CostExpr& invariant, const AnalysisOptions& opts = {});

// ---------------------------------------------------------------------------
// Concavity / monotonicity of bound shapes, and the compositionality gap
// ---------------------------------------------------------------------------

// A multilinear shape over k norm slots with concrete coefficients:
// sum coeff * prod slots[idx].
struct NormShape {
    struct Term {
        Rat coeff;
        std::vector<size_t> idxs;
    };
    std::vector<Term> terms;
    size_t arity = 0;

    Rat eval(const std::vector<Rat>& args) const;
    CostExpr apply(const std::vector<CostExpr>& args) const;
    bool affine() const;
};

struct ConcavityVerdict {
    bool pass = true;
    std::string detail;  // witness description when failing
};

// Randomized per-coordinate mixing and monotonicity trials; affine shapes
// pass structurally, a deterministic small grid is searched before the
// random phase so simple witnesses are reproducible.
ConcavityVerdict concavity_check(const NormShape& h, long trials, std::uint64_t seed = 0);

struct CompositionGapReport {
    struct Row {
        Store store;
        Rat lhs, rhs;
        bool ok;
    };
    std::vector<Row> rows;
    Rat max_gap;  // max(rhs - lhs) over non-violating rows
    bool all_ok = true;
};

// Evaluates ect[C](f o norms) against ec[C] + f o (evt[C](norms)) pointwise
// on the sample, via the exact loop-free transformer.
CompositionGapReport composition_gap(const Command& c, const NormShape& f, const std::vector<Norm>& norms,
                        const std::vector<Store>& stores);

}  // namespace pwhile
