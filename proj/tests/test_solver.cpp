// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "pwhile/parser.hpp"
#include "pwhile/printer.hpp"
#include "pwhile/simplex.hpp"
#include "pwhile/solver.hpp"

using namespace pwhile;

namespace {

Store st(std::initializer_list<std::pair<const char*, long>> entries) {
    Store s;
    for (const auto& [name, value] : entries) s.bindings[Var(name)] = Int(value);
    return s;
}

// premise holds -> all emitted inequalities hold, and vice versa.
bool cases_hold_at(const std::vector<PolyInequality>& cases, const Store& s,
                   const CoeffAssignment& a) {
    for (const auto& pi : cases) {
        bool premise = true;
        for (const auto& atom : pi.premise) {
            if (atom.eval(s) < 0) {
                premise = false;
                break;
            }
        }
        if (premise && pi.difference.eval(s, a) < 0) return false;
    }
    return true;
}

bool constraint_holds_at(const Constraint& c, const Store& s, const CoeffAssignment& a) {
    if (!eval_bexp(c.premise, s)) return true;
    return eval_cost(c.lhs, s, a) <= eval_cost(c.rhs, s, a);
}

}  // namespace

TEST_CASE("simplex: known optima") {
    // min x + y subject to x + y >= 2, x - y = 0  ->  x = y = 1
    std::vector<std::vector<Rat>> a = {{Rat(1), Rat(1), Rat(-1)}, {Rat(1), Rat(-1), Rat(0)}};
    std::vector<Rat> b = {Rat(2), Rat(0)};
    std::vector<Rat> c = {Rat(1), Rat(1), Rat(0)};
    SimplexOutcome out = simplex_solve(a, b, c);
    REQUIRE(out.status == SimplexStatus::Optimal);
    CHECK(out.objective == Rat(2));
    CHECK(out.solution[0] == Rat(1));
    CHECK(out.solution[1] == Rat(1));

    // fractional optimum: min z s.t. 3z = 1
    SimplexOutcome frac = simplex_solve({{Rat(3)}}, {Rat(1)}, {Rat(1)});
    REQUIRE(frac.status == SimplexStatus::Optimal);
    CHECK(frac.solution[0] == Rat(1, 3));

    // infeasible: x = -1 with x >= 0
    SimplexOutcome inf = simplex_solve({{Rat(1)}}, {Rat(-1)}, {Rat(1)});
    CHECK(inf.status == SimplexStatus::Infeasible);

    // unbounded: min -x with x free to grow
    SimplexOutcome unb = simplex_solve({{Rat(1), Rat(-1)}}, {Rat(1)}, {Rat(-1), Rat(0)});
    CHECK(unb.status == SimplexStatus::Unbounded);
}

TEST_CASE("solve_linear: tight bound, dominance, infeasibility") {
    {
        LinearSystem sys;
        sys.vars = {"q"};
        sys.objective = {"q"};
        sys.constraints.push_back({SymLin{{{"q", Rat(1)}}, Rat(-2)}, false});  // q - 2 >= 0
        SolveResult r = solve_linear(sys);
        REQUIRE(r.feasible);
        CHECK(r.assignment.at("q") == Rat(2));
    }
    {
        LinearSystem sys;
        sys.vars = {"q"};
        sys.objective = {"q"};
        sys.constraints.push_back({SymLin{{{"q", Rat(1)}}, Rat(-1)}, false});
        sys.constraints.push_back({SymLin{{{"q", Rat(1)}}, Rat(-2)}, false});
        SolveResult r = solve_linear(sys);
        REQUIRE(r.feasible);
        CHECK(r.assignment.at("q") == Rat(2));
    }
    {
        LinearSystem sys;
        sys.vars = {"q"};
        sys.objective = {"q"};
        // q <= -1 against the implicit q >= 0
        sys.constraints.push_back({SymLin{{{"q", Rat(-1)}}, Rat(-1)}, false});
        CHECK_FALSE(solve_linear(sys).feasible);
    }
}

TEST_CASE("solve_linear: ties favor earlier-declared objective symbols") {
    LinearSystem sys;
    sys.vars = {"q0", "q1", "q2"};
    sys.objective = {"q0", "q1", "q2"};
    // q1 + q2 >= 1; minimal sum 1 is achieved on a whole facet.
    sys.constraints.push_back({SymLin{{{"q1", Rat(1)}, {"q2", Rat(1)}}, Rat(-1)}, false});
    SolveResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.assignment.at("q0") == Rat(0));
    CHECK(r.assignment.at("q1") == Rat(1));
    CHECK(r.assignment.at("q2") == Rat(0));
}

TEST_CASE("eliminate_cases: countdown constraint reduces to one inequality") {
    Constraint c;
    c.premise = parse_bexp_text("x > 0");
    c.lhs = parse_cost_expr("1 + ?q*nat(x - 1)");
    c.rhs = parse_cost_expr("?q*nat(x)");
    auto cases = eliminate_cases(c);
    REQUIRE(cases.size() == 1);
    // premise x >= 1, difference q*x - q*(x-1) - 1 = q - 1
    CHECK(cases[0].difference.degree() == 0);

    // sampling equivalence between original and reduced forms
    std::mt19937_64 rng(1);
    for (int i = 0; i < 400; ++i) {
        Store s = st({{"x", static_cast<long>(rng() % 201) - 100}});
        CoeffAssignment a{{"q", Rat(static_cast<long>(rng() % 8), 1 + static_cast<long>(rng() % 3))}};
        CHECK(constraint_holds_at(c, s, a) == cases_hold_at(cases, s, a));
    }
}

TEST_CASE("eliminate_cases: nat of a negative constant vanishes") {
    Constraint c;
    c.premise = btrue();
    c.lhs = parse_cost_expr("nat(0 - 3)");
    c.rhs = parse_cost_expr("?q");
    auto cases = eliminate_cases(c);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].premise.empty());
    // difference is q - 0 = q
    CHECK(cases[0].difference.degree() == 0);
    CHECK(cases[0].difference.terms.begin()->second.lin.count("q") == 1);
}

TEST_CASE("eliminate_cases: unresolved sign splits on the integers") {
    Constraint c;
    c.premise = btrue();
    c.lhs = parse_cost_expr("nat(x)");
    c.rhs = parse_cost_expr("?q*nat(x)");
    auto cases = eliminate_cases(c);
    REQUIRE(cases.size() == 2);
    // x >= 0 gives (q-1)x >= 0; x <= -1 gives 0 <= 0
    std::mt19937_64 rng(2);
    for (int i = 0; i < 400; ++i) {
        Store s = st({{"x", static_cast<long>(rng() % 201) - 100}});
        CoeffAssignment a{{"q", Rat(static_cast<long>(rng() % 8), 1 + static_cast<long>(rng() % 3))}};
        CHECK(constraint_holds_at(c, s, a) == cases_hold_at(cases, s, a));
    }
}

TEST_CASE("eliminate_cases: nonlinear guard atoms are unsupported") {
    Constraint c;
    c.premise = parse_bexp_text("x * x > 2");
    c.lhs = parse_cost_expr("1");
    c.rhs = parse_cost_expr("?q");
    CHECK_THROWS_AS(eliminate_cases(c), UnsupportedCase);
}

TEST_CASE("eliminate_cases: infeasible premises yield no cases") {
    Constraint c;
    c.premise = parse_bexp_text("x > 0 && x < 0");
    c.lhs = parse_cost_expr("5");
    c.rhs = parse_cost_expr("0");
    CHECK(eliminate_cases(c).empty());
}

TEST_CASE("farkas_reduce: variable-free difference") {
    // premise x >= 1, difference q - 1  ->  q >= 1
    PolyInequality pi;
    LinTerm atom;
    atom.coeff[Var("x")] = Rat(1);
    atom.constant = Rat(-1);
    pi.premise.push_back(atom);
    pi.difference = Poly::symbol("q") - Poly::constant(Rat(1));
    std::vector<std::string> aux;
    auto cons = farkas_reduce(pi, "m", &aux);
    LinearSystem sys;
    sys.vars = {"q"};
    sys.vars.insert(sys.vars.end(), aux.begin(), aux.end());
    sys.objective = {"q"};
    for (auto& c : cons) sys.constraints.push_back(c);
    SolveResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.assignment.at("q") == Rat(1));
}

TEST_CASE("farkas_reduce: (q-1)x over x >= 0 forces q >= 1") {
    PolyInequality pi;
    LinTerm atom;
    atom.coeff[Var("x")] = Rat(1);
    pi.premise.push_back(atom);
    Poly x = Poly::of_linterm(atom);
    pi.difference = x * Poly::symbol("q") - x;
    std::vector<std::string> aux;
    auto cons = farkas_reduce(pi, "m", &aux);
    LinearSystem sys;
    sys.vars = {"q"};
    sys.vars.insert(sys.vars.end(), aux.begin(), aux.end());
    sys.objective = {"q"};
    for (auto& c : cons) sys.constraints.push_back(c);
    SolveResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.assignment.at("q") == Rat(1));
}

TEST_CASE("farkas_reduce: empty premise with zero difference is vacuous") {
    PolyInequality pi;  // 0 >= 0
    std::vector<std::string> aux;
    auto cons = farkas_reduce(pi, "m", &aux);
    LinearSystem sys;
    sys.vars = aux;
    for (auto& c : cons) sys.constraints.push_back(c);
    CHECK(solve_linear(sys).feasible);
}

TEST_CASE("farkas_reduce: degree > 2 is unsupported") {
    PolyInequality pi;
    Poly x = Poly::of_intexpr(imul(imul(ivar("x"), ivar("x")), ivar("x")));
    pi.difference = x;
    CHECK_THROWS_AS(farkas_reduce(pi, "m", nullptr), UnsupportedCase);
}

TEST_CASE("certify: ground inequalities") {
    // x >= 1 |= x - 1 >= 0 certified
    PolyInequality pi;
    LinTerm atom;
    atom.coeff[Var("x")] = Rat(1);
    atom.constant = Rat(-1);
    pi.premise.push_back(atom);
    pi.difference = Poly::of_linterm(atom);
    CHECK(certify(pi));

    // x >= 1 |= 1 - x >= 0 has no certificate
    PolyInequality bad = pi;
    bad.difference = Poly::constant(Rat(1)) - Poly::of_intexpr(ivar("x"));
    CHECK_FALSE(certify(bad));
}

TEST_CASE("numeric_refute examples") {
    Constraint c;
    c.premise = parse_bexp_text("x > 0");
    c.lhs = parse_cost_expr("1 + ?q*nat(x - 1)");
    c.rhs = parse_cost_expr("?q*nat(x)");
    CHECK_FALSE(numeric_refute(c, {{"q", Rat(1)}}, 10000, 0).has_value());

    auto witness = numeric_refute(c, {{"q", Rat(1, 2)}}, 10000, 0);
    REQUIRE(witness.has_value());
    CHECK(eval_bexp(c.premise, *witness));
    CHECK(eval_cost(c.lhs, *witness, {{"q", Rat(1, 2)}}) >
          eval_cost(c.rhs, *witness, {{"q", Rat(1, 2)}}));

    Constraint vacuous;
    vacuous.premise = bfalse();
    vacuous.lhs = parse_cost_expr("100");
    vacuous.rhs = parse_cost_expr("0");
    CHECK_FALSE(numeric_refute(vacuous, {}, 1000, 0).has_value());
}

TEST_CASE("differential: eliminate_cases matches direct evaluation") {
    std::mt19937_64 rng(7);
    long triples = 0;
    for (std::uint64_t seed = 0; triples < 12000; ++seed) {
        testgen::Gen gen(seed);
        Constraint c;
        // premises from conjunctions/disjunctions of linear comparisons
        c.premise = gen.bexp(2);
        CostExpr lhs = gen.cost_expr(2);
        CostExpr rhs = gen.cost_expr(2);
        // sprinkle template symbols over both sides
        if (gen.pick(2) == 0) lhs = cadd(lhs, cmul(ccoeff("q0"), gen.cost_expr(1)));
        rhs = cadd(rhs, cmul(ccoeff("q1"), gen.cost_expr(1)));
        c.lhs = lhs;
        c.rhs = rhs;
        std::vector<PolyInequality> cases;
        try {
            cases = eliminate_cases(c);
        } catch (const UnsupportedCase&) {
            continue;  // nonlinear guard drawn by the generator
        }
        for (int i = 0; i < 20; ++i) {
            Store s;
            for (const auto& v : gen.vars) {
                s.bindings[v] = Int(static_cast<long>(rng() % 41) - 20);
            }
            CoeffAssignment a{{"q0", Rat(static_cast<long>(rng() % 6), 1 + rng() % 2)},
                              {"q1", Rat(static_cast<long>(rng() % 6), 1 + rng() % 2)}};
            CAPTURE(print(c.premise));
            CAPTURE(print(c.lhs));
            CAPTURE(print(c.rhs));
            CAPTURE(print(s));
            CHECK(constraint_holds_at(c, s, a) == cases_hold_at(cases, s, a));
            ++triples;
        }
    }
}

TEST_CASE("dump_lp renders a readable system") {
    LinearSystem sys;
    sys.vars = {"q0", "q1"};
    sys.objective = {"q0", "q1"};
    sys.constraints.push_back({SymLin{{{"q0", Rat(2)}, {"q1", Rat(3)}}, Rat(-4)}, false});
    std::string text = dump_lp(sys);
    CHECK(text.find("min:") != std::string::npos);
    CHECK(text.find("q0") != std::string::npos);
    CHECK(text.find(">= 0") != std::string::npos);
}
