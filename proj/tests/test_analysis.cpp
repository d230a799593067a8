// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "generators.hpp"
#include "pwhile/analysis.hpp"
#include "pwhile/parser.hpp"
#include "pwhile/printer.hpp"
#include "pwhile/semantics.hpp"

using namespace pwhile;

namespace {

Store st(std::initializer_list<std::pair<const char*, long>> entries) {
    Store s;
    for (const auto& [name, value] : entries) s.bindings[Var(name)] = Int(value);
    return s;
}

Command countdown() {
    return parse_program("while [x >= 0] (x > 0) { tick(1); x := x - 1 }");
}

Command geometric() {
    return parse_program("while [true] (x = 1) { { x := 0 } [1/2] { skip }; tick(1) }");
}

Command biased_walk() {
    return parse_program(
        "while [x >= 0] (x > 0) { { x := x - 1 } [3/4] { x := x + 1 }; tick(1) }");
}

Command nested() {
    return parse_program(
        "while [x >= 0] (x > 0) { y := x; while [y >= 0] (y > 0) { tick(1); y := y - 1 }; "
        "x := x - 1 }");
}

std::vector<std::string> norm_strings(const std::vector<Norm>& norms) {
    std::vector<std::string> out;
    for (const auto& n : norms) out.push_back(print(n.expr));
    return out;
}

}  // namespace

TEST_CASE("select_norms from guards and invariants") {
    auto n1 = norm_strings(select_norms(countdown()));
    // guard x > 0 first, then the invariant's x >= 0 pair (x deduplicates)
    REQUIRE(n1.size() == 2);
    CHECK(n1[0] == "x");
    CHECK(n1[1] == "x + 1");

    auto n2 = norm_strings(
        select_norms(parse_program("while [true] (x > y) { x := x - 1 }")));
    REQUIRE(n2.size() == 1);
    CHECK(n2[0] == "x - y");

    auto n3 = select_norms(parse_program("while [true] (true) { tick(1) }"));
    CHECK(n3.empty());

    // equality guards contribute both directions
    auto n4 = norm_strings(select_norms(geometric()));
    REQUIRE(n4.size() == 4);
    CHECK(n4[0] == "x");      // x - 1 + 1
    CHECK(n4[1] == "x - 1");
    CHECK(n4[2] == "2 - x");  // 1 - x + 1
    CHECK(n4[3] == "1 - x");

    // inner loop guards are included recursively
    auto n5 = norm_strings(select_norms(nested()));
    REQUIRE(n5.size() == 4);
    CHECK(n5[0] == "x");
    CHECK(n5[1] == "x + 1");
    CHECK(n5[2] == "y");
    CHECK(n5[3] == "y + 1");
}

TEST_CASE("check_upper_invariant: countdown certified with nat(x)") {
    InvariantVerdict v = check_upper_invariant(CostMode::Cost, countdown(), cconst(0),
                                               parse_cost_expr("nat(x)"));
    CHECK(v.kind == InvariantVerdict::Kind::Certified);

    // numeric cross-check of the certified claim over a store range
    for (long x = -5; x <= 100; x += 7) {
        OracleResult o = expected_cost_oracle(countdown(), st({{"x", x}}), 500);
        REQUIRE(o.live_mass == Rat(0));
        CHECK(o.lower <= eval_cost(parse_cost_expr("nat(x)"), st({{"x", x}})));
    }
}

TEST_CASE("check_upper_invariant: half of nat(x) is refuted with witness x=1") {
    InvariantVerdict v = check_upper_invariant(CostMode::Cost, countdown(), cconst(0),
                                               parse_cost_expr("1/2*nat(x)"));
    REQUIRE(v.kind == InvariantVerdict::Kind::Refuted);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->get(Var("x")) == 1);
}

TEST_CASE("check_upper_invariant: zero cannot bound a ticking loop") {
    InvariantVerdict v =
        check_upper_invariant(CostMode::Cost, countdown(), cconst(0), cconst(0));
    REQUIRE(v.kind == InvariantVerdict::Kind::Refuted);
    REQUIRE(v.witness.has_value());
    OracleResult o = expected_cost_oracle(countdown(), *v.witness, 500);
    CHECK(o.lower > 0);
}

TEST_CASE("certified upper invariants dominate the oracle") {
    struct CaseDef {
        Command loop;
        const char* invariant;
    };
    std::vector<CaseDef> cases = {
        {countdown(), "nat(x)"},
        {countdown(), "2*nat(x)"},
        {countdown(), "nat(x) + 5"},
        {geometric(), "2*nat(x)"},
        {biased_walk(), "2*nat(x)"},
    };
    for (const auto& cd : cases) {
        CostExpr inv = parse_cost_expr(cd.invariant);
        InvariantVerdict v = check_upper_invariant(CostMode::Cost, cd.loop, cconst(0), inv);
        CAPTURE(cd.invariant);
        REQUIRE(v.kind == InvariantVerdict::Kind::Certified);
        for (long x = -3; x <= 12; ++x) {
            Store s = st({{"x", x}});
            OracleResult o = expected_cost_oracle(cd.loop, s, 400);
            CHECK(o.lower <= eval_cost(inv, s));
        }
    }
}

TEST_CASE("analyze_loop: countdown derives nat(x) at degree 1") {
    LoopAnalysisResult r =
        analyze_loop(CostMode::Cost, countdown(), cconst(0), StrategyKind::Decompose, 1);
    CHECK(print(r.bound) == "nat(x)");
    CHECK(print(r.derivation.body_cost) == "1");
    REQUIRE(r.derivation.expected_norms.size() == 2);
    CHECK(print(r.derivation.expected_norms[0]) == "nat(x - 1)");
    CHECK(print(r.derivation.expected_norms[1]) == "nat(x)");
    for (long n = 0; n <= 20; ++n) {
        OracleResult o = expected_cost_oracle(countdown(), st({{"x", n}}), 200);
        REQUIRE(o.live_mass == Rat(0));
        CHECK(o.lower == Rat(n));
        CHECK(eval_cost(r.bound, st({{"x", n}})) == Rat(n));
    }
}

TEST_CASE("analyze_loop: geometric loop bound evaluates to 2 at x=1") {
    LoopAnalysisResult r =
        analyze_loop(CostMode::Cost, geometric(), cconst(0), StrategyKind::Decompose, 1);
    CHECK(eval_cost(r.bound, st({{"x", 1}})) == Rat(2));
    OracleResult o = expected_cost_oracle(geometric(), st({{"x", 1}}), 200);
    CHECK(Rat(2) - o.lower <= Rat(1, Int(1) << 40));
}

TEST_CASE("analyze_loop: biased walk derives 2*nat(x)") {
    LoopAnalysisResult r =
        analyze_loop(CostMode::Cost, biased_walk(), cconst(0), StrategyKind::Decompose, 1);
    CHECK(print(r.bound) == "2*nat(x)");
    OracleResult o = expected_cost_oracle(biased_walk(), st({{"x", 3}}), 400);
    CHECK(Rat(6) - o.lower <= Rat(1, 1000));
    CHECK(o.lower <= Rat(6));
}

TEST_CASE("analyze_loop: invariant strategy also certifies the countdown") {
    LoopAnalysisResult r =
        analyze_loop(CostMode::Cost, countdown(), cconst(0), StrategyKind::Invariant, 1);
    CHECK(eval_cost(r.bound, st({{"x", 7}})) >= Rat(7));
    CHECK(r.derivation.strategy == StrategyKind::Invariant);
    CHECK_FALSE(r.derivation.joint);
}

TEST_CASE("analyze_loop: unroll certifies a constant-iteration loop") {
    Command loop = parse_program("while [true] (x >= 1 && x <= 2) { tick(1); x := x - 1 }");
    LoopAnalysisResult r =
        analyze_loop(CostMode::Cost, loop, cconst(0), StrategyKind::Unroll, 1);
    CHECK(r.derivation.strategy == StrategyKind::Unroll);
    for (long x = -2; x <= 6; ++x) {
        Store s = st({{"x", x}});
        OracleResult o = expected_cost_oracle(loop, s, 100);
        REQUIRE(o.live_mass == Rat(0));
        CHECK(o.lower <= eval_cost(r.bound, s));
    }
}

TEST_CASE("nested loops: modular degree-2 bound matches the triangular sum") {
    std::vector<LoopBoundDerivation> derivations;
    AnalysisOptions opts;
    CostExpr bound =
        et_symbolic_analyzed(CostMode::Cost, nested(), cconst(0), opts, &derivations);
    CHECK(print(bound) == "1/2*nat(x)*nat(x + 1)");
    for (long n = 0; n <= 10; ++n) {
        Store s = st({{"x", n}});
        OracleResult o = expected_cost_oracle(nested(), s, 600);
        REQUIRE(o.live_mass == Rat(0));
        CHECK(o.lower == Rat(n * (n + 1) / 2));
        CHECK(eval_cost(bound, s) >= o.lower);
    }

    // modularity: inner-loop systems are solved separately; no constraint of
    // the outer derivation mentions an inner template coefficient
    REQUIRE(derivations.size() >= 2);
    const LoopBoundDerivation* outer = nullptr;
    std::set<std::string> inner_syms;
    for (const auto& d : derivations) {
        if (d.label == "loop1" && d.mode == CostMode::Cost) {
            outer = &d;
        } else {
            for (const auto& sym : d.coefficients) inner_syms.insert(sym);
        }
        CHECK_FALSE(d.joint);
    }
    REQUIRE(outer != nullptr);
    CHECK(outer->degree == 2);
    CHECK(outer->strategy == StrategyKind::Decompose);
    for (const auto& rec : outer->constraints) {
        for (const auto& sym : coeff_symbols(rec.constraint.lhs)) {
            CHECK(inner_syms.count(sym) == 0);
        }
        for (const auto& sym : coeff_symbols(rec.constraint.rhs)) {
            CHECK(inner_syms.count(sym) == 0);
        }
    }
}

TEST_CASE("derivation replay verifies every recorded constraint") {
    std::vector<LoopBoundDerivation> derivations;
    AnalysisOptions opts;
    et_symbolic_analyzed(CostMode::Cost, nested(), cconst(0), opts, &derivations);
    for (auto& d : derivations) {
        CHECK(replay_derivation(d, 3000, 11));
        for (const auto& rec : d.constraints) {
            CHECK(rec.certificate == CertKind::Farkas);
        }
    }
}

TEST_CASE("concavity_check: affine shapes pass structurally") {
    NormShape h;
    h.arity = 1;
    h.terms.push_back({Rat(3), {0}});
    h.terms.push_back({Rat(2), {}});
    ConcavityVerdict v = concavity_check(h, 50);
    CHECK(v.pass);
    CHECK(v.detail.find("affine") != std::string::npos);
}

TEST_CASE("concavity_check: a square fails with a concrete witness") {
    NormShape h;
    h.arity = 1;
    h.terms.push_back({Rat(1), {0, 0}});  // n1^2
    ConcavityVerdict v = concavity_check(h, 50);
    REQUIRE_FALSE(v.pass);
    CHECK(v.detail.find("concavity violated") != std::string::npos);
}

TEST_CASE("concavity_check: multilinear products pass per-coordinate mixing") {
    NormShape h;
    h.arity = 2;
    h.terms.push_back({Rat(1), {0, 1}});  // n1*n2
    ConcavityVerdict v = concavity_check(h, 500);
    CHECK(v.pass);
}

TEST_CASE("composition_gap: identity shape on a fair assignment has gap 0") {
    Command c = parse_program("x := {1/2: 0, 1/2: 2}");
    NormShape identity;
    identity.arity = 1;
    identity.terms.push_back({Rat(1), {0}});
    std::vector<Norm> norms = {{ivar("x")}};
    CompositionGapReport r = composition_gap(c, identity, norms, {st({{"x", 5}}), st({{"x", 0}})});
    CHECK(r.all_ok);
    CHECK(r.max_gap == Rat(0));
}

TEST_CASE("composition_gap: skip has gap 0 for any shape") {
    NormShape shape;
    shape.arity = 2;
    shape.terms.push_back({Rat(2), {0}});
    shape.terms.push_back({Rat(1), {1}});
    shape.terms.push_back({Rat(1, 2), {}});
    std::vector<Norm> norms = {{ivar("x")}, {isub(ivar("x"), ivar("y"))}};
    CompositionGapReport r = composition_gap(cskip(), shape, norms,
                                {st({{"x", 3}, {"y", 1}}), st({{"x", 0}, {"y", 4}})});
    CHECK(r.all_ok);
    CHECK(r.max_gap == Rat(0));
}

TEST_CASE("composition_gap: duplicated norms under a product violate the bound") {
    // f = n1*n2 with g1 = g2 = nat(x) is effectively the non-concave square
    Command c = parse_program("x := {1/2: 0, 1/2: 2}");
    NormShape product;
    product.arity = 2;
    product.terms.push_back({Rat(1), {0, 1}});
    std::vector<Norm> norms = {{ivar("x")}, {ivar("x")}};
    CompositionGapReport r = composition_gap(c, product, norms, {st({{"x", 0}})});
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].ok);           // lhs 2 > rhs 1, the negative control
    CHECK(r.rows[0].lhs == Rat(2));
    CHECK(r.rows[0].rhs == Rat(1));
    CHECK_FALSE(r.all_ok);
}

TEST_CASE("analyze_loop: failure reports name the loop") {
    Command loop = parse_program("while [true] (x * x > 2) { tick(1); x := x - 1 }");
    try {
        analyze_loop(CostMode::Cost, loop, cconst(0), StrategyKind::Decompose, 2);
        FAIL("expected LoopAnalysisError");
    } catch (const LoopAnalysisError& e) {
        CHECK(std::string(e.what()).find("x * x") != std::string::npos);
    }
}

TEST_CASE("transformer soundness: oracle with continuation below the symbolic bound") {
    AnalysisOptions opts;
    std::vector<Command> corpus = {countdown(), geometric(), biased_walk(), nested()};
    std::vector<CostExpr> pool = {cconst(0), cconst(2), parse_cost_expr("nat(x)"),
                                  parse_cost_expr("nat(x + 1) + 1"),
                                  parse_cost_expr("[x > 0]*nat(x)")};
    for (const auto& prog : corpus) {
        for (const auto& f : pool) {
            for (CostMode mode : {CostMode::Cost, CostMode::Value}) {
                CostExpr bound;
                try {
                    bound = et_symbolic_analyzed(mode, prog, f, opts, nullptr);
                } catch (const LoopAnalysisError&) {
                    continue;  // not every continuation admits a bound
                }
                for (long x = 0; x <= 6; ++x) {
                    Store s = st({{"x", x}});
                    OracleResult o = mode == CostMode::Cost
                                         ? expected_cost_oracle_with_continuation(prog, s, f, 400)
                                         : expected_value_oracle(prog, s, f, 400);
                    CAPTURE(print(prog));
                    CAPTURE(print(f));
                    CHECK(o.lower <= eval_cost(bound, s));
                }
            }
        }
    }
}

TEST_CASE("incompleteness honesty: a true-but-nonlinear invariant stays unknown") {
    // 1 + nat((x-1)^2) <= nat(x^2) holds over x >= 1, but the certificate
    // machinery cannot express nat over a nonlinear argument.
    InvariantVerdict v = check_upper_invariant(CostMode::Cost, countdown(), cconst(0),
                                               parse_cost_expr("nat(x * x)"));
    CHECK(v.kind == InvariantVerdict::Kind::Unknown);
}

TEST_CASE("decompose templates exclude squares; invariant templates include them") {
    std::vector<LoopBoundDerivation> derivs;
    AnalysisOptions opts;
    et_symbolic_analyzed(CostMode::Cost, nested(), cconst(0), opts, &derivs);
    for (const auto& d : derivs) {
        if (d.strategy != StrategyKind::Decompose || d.degree < 2) continue;
        size_t k = d.norms.size();
        CHECK(d.coefficients.size() == 1 + k + k * (k - 1) / 2);
    }
    LoopAnalysisResult inv =
        analyze_loop(CostMode::Cost, countdown(), cconst(0), StrategyKind::Invariant, 2);
    size_t k = inv.derivation.norms.size();
    CHECK(inv.derivation.coefficients.size() == 1 + k + k * (k + 1) / 2);
}

TEST_CASE("a guardless ticking loop fails every strategy with diagnostics") {
    Command loop = parse_program("while [true] (true) { tick(1) }");
    try {
        AnalysisOptions opts;
        et_symbolic_analyzed(CostMode::Cost, loop, cconst(0), opts, nullptr);
        FAIL("expected LoopAnalysisError");
    } catch (const LoopAnalysisError& e) {
        std::string msg = e.what();
        CHECK(msg.find("decompose") != std::string::npos);
        CHECK(msg.find("invariant") != std::string::npos);
        CHECK(msg.find("unroll") != std::string::npos);
    }
}

TEST_CASE("certified bounds dominate the oracle across the corpus") {
    struct CaseDef {
        Command prog;
        long horizon;
    };
    std::vector<CaseDef> cases = {
        {countdown(), 300}, {geometric(), 300}, {biased_walk(), 500}, {nested(), 600}};
    AnalysisOptions opts;
    for (const auto& cd : cases) {
        CostExpr bound = et_symbolic_analyzed(CostMode::Cost, cd.prog, cconst(0), opts, nullptr);
        for (long x = 0; x <= 8; ++x) {
            Store s = st({{"x", x}});
            OracleResult o = expected_cost_oracle(cd.prog, s, cd.horizon);
            CHECK(o.lower <= eval_cost(bound, s));
        }
    }
}
