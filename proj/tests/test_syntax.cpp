// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "generators.hpp"
#include "pwhile/eval.hpp"
#include "pwhile/parser.hpp"
#include "pwhile/printer.hpp"

using namespace pwhile;

TEST_CASE("parse tick with rational rate") {
    Command c = parse_program("tick(3/2)");
    REQUIRE(c->kind == CommandNode::Kind::Tick);
    CHECK(c->rate == Rat(3, 2));
}

TEST_CASE("parse countdown loop") {
    Command c = parse_program("while [x >= 0] (x > 0) { tick(1); x := x - 1 }");
    REQUIRE(c->kind == CommandNode::Kind::While);
    CHECK(print(c->guard) == "x > 0");
    CHECK(print(c->inv) == "x >= 0");
    REQUIRE(c->a->kind == CommandNode::Kind::Seq);
    CHECK(c->a->a->kind == CommandNode::Kind::Tick);
    REQUIRE(c->a->b->kind == CommandNode::Kind::Assign);
    CHECK(c->a->b->var.name == "x");
    CHECK(print(c->a->b->dist) == "x - 1");
}

TEST_CASE("distribution probabilities must sum to one") {
    CHECK_THROWS_WITH_AS(parse_program("x := {1/2: 0, 1/3: 1}"),
                         doctest::Contains("sum to 5/6"), ParseError);
}

TEST_CASE("probability literal outside [0,1] is rejected") {
    CHECK_THROWS_AS(parse_program("{skip} [3/2] {skip}"), ParseError);
    CHECK_THROWS_AS(parse_program("x := {2: 1}"), ParseError);
}

TEST_CASE("syntax errors carry position") {
    try {
        parse_program("while [x >= 0] (x > 0) { tick(1); x := }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line >= 1);
        CHECK(e.column > 1);
    }
}

TEST_CASE("choices parse and print") {
    Command c = parse_program("{ tick(1) } <> { tick(3) }");
    REQUIRE(c->kind == CommandNode::Kind::NdChoice);
    CHECK(print(c) == "{ tick(1) } <> { tick(3) }");

    Command p = parse_program("{x := 0} [1/4] {skip}");
    REQUIRE(p->kind == CommandNode::Kind::PChoice);
    CHECK(p->prob == Rat(1, 4));
}

TEST_CASE("comments and whitespace are ignored") {
    Command c = parse_program("# a comment\n  skip # trailing\n");
    CHECK(c->kind == CommandNode::Kind::Skip);
}

TEST_CASE("eval_int examples") {
    Store s;
    s.bindings[Var("x")] = 5;
    s.bindings[Var("y")] = 2;
    CHECK(eval_int(isub(ivar("x"), ivar("y")), s) == 3);
    Store neg;
    neg.bindings[Var("x")] = -3;
    CHECK(eval_int(imul(ivar("x"), ivar("x")), neg) == 9);
    CHECK(eval_int(iconst(0), Store{}) == 0);
    // unbound variables read as 0
    CHECK(eval_int(ivar("zz"), Store{}) == 0);
}

TEST_CASE("eval_bexp examples") {
    Store s1;
    s1.bindings[Var("x")] = 1;
    BExp pos = bcmp(CmpOp::Gt, ivar("x"), iconst(0));
    CHECK(eval_bexp(pos, s1));
    CHECK_FALSE(eval_bexp(band(pos, bnot(pos)), s1));
    CHECK(eval_bexp(btrue(), Store{}));
}

TEST_CASE("eval_dist merges equal outcomes") {
    Store s;
    s.bindings[Var("x")] = 7;
    DistExpr d;
    d.branches.push_back({Rat(1, 2), ivar("x")});
    d.branches.push_back({Rat(1, 2), ivar("x")});
    auto merged = eval_dist(d, s);
    REQUIRE(merged.size() == 1);
    CHECK(merged.at(Int(7)) == Rat(1));

    DistExpr two;
    two.branches.push_back({Rat(1, 3), ivar("x")});
    two.branches.push_back({Rat(2, 3), iadd(ivar("x"), iconst(1))});
    Store zero;
    zero.bindings[Var("x")] = 0;
    auto out = eval_dist(two, zero);
    CHECK(out.at(Int(0)) == Rat(1, 3));
    CHECK(out.at(Int(1)) == Rat(2, 3));
}

TEST_CASE("eval_cost examples") {
    Store s;
    s.bindings[Var("x")] = 2;
    s.bindings[Var("y")] = 5;
    CHECK(eval_cost(cnat(isub(ivar("x"), ivar("y"))), s) == Rat(0));

    CostExpr iv = civerson(bcmp(CmpOp::Gt, ivar("x"), iconst(0)), cconst(5));
    Store x0, x1;
    x0.bindings[Var("x")] = 0;
    x1.bindings[Var("x")] = 1;
    CHECK(eval_cost(iv, x0) == Rat(0));
    CHECK(eval_cost(iv, x1) == Rat(5));

    Store x7;
    x7.bindings[Var("x")] = 7;
    CHECK(eval_cost(cmax(cconst(2), cnat(ivar("x"))), x7) == Rat(7));

    CHECK_THROWS_AS(eval_cost(ccoeff("q0"), Store{}), std::out_of_range);
    CoeffAssignment a{{"q0", Rat(3)}};
    CHECK(eval_cost(ccoeff("q0"), Store{}, a) == Rat(3));
}

TEST_CASE("free_vars examples") {
    CHECK(free_vars(ctick(Rat(1))).empty());
    Command assign = cassign(Var("x"), dirac(iadd(ivar("y"), iconst(1))));
    auto fv = free_vars(assign);
    CHECK(fv.count(Var("x")) == 1);
    CHECK(fv.count(Var("y")) == 1);
    CHECK(fv.size() == 2);
    auto cv = free_vars(cnat(isub(ivar("x"), ivar("y"))));
    CHECK(cv.size() == 2);
}

TEST_CASE("parse/print round trip on random programs") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        testgen::Gen gen(seed);
        Command c = gen.command(4);
        std::string text = print(c);
        CAPTURE(text);
        Command back = parse_program(text);
        CHECK(equal(c, back));
    }
}

TEST_CASE("cost expression parse/print round trip") {
    const char* samples[] = {
        "nat(x)", "2*nat(x)", "1/2", "nat(x - y) + 3", "[x > 0]*nat(x)",
        "max(2, nat(x))", "?q0*nat(x) + ?q1", "[x > 0 && y < 3]*(nat(x) + 1)",
        "1/2*nat(x)*nat(x + 1)",
    };
    for (const char* text : samples) {
        CostExpr c = parse_cost_expr(text);
        CHECK(print(parse_cost_expr(print(c))) == print(c));
    }
}

TEST_CASE("eval_dist total mass is exactly one on random inputs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        testgen::Gen gen(seed);
        DistExpr d = gen.dist();
        Store s = gen.store();
        Rat total(0);
        for (const auto& [v, p] : eval_dist(d, s)) total += p;
        CHECK(total == Rat(1));
    }
}

TEST_CASE("eval_cost is nonnegative on random inputs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        testgen::Gen gen(seed);
        CostExpr c = gen.cost_expr(3);
        Store s = gen.store();
        CHECK(eval_cost(c, s) >= Rat(0));
    }
}

TEST_CASE("Iverson brackets are idempotent") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testgen::Gen gen(seed);
        BExp guard = gen.bexp(2);
        CostExpr body = gen.cost_expr(2);
        Store s = gen.store();
        Rat once = eval_cost(civerson(guard, body), s);
        Rat twice = eval_cost(civerson(guard, civerson(guard, body)), s);
        CHECK(once == twice);
    }
}
