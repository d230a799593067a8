// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwhile/ast.hpp"
#include "pwhile/eval.hpp"

namespace pwhile {

// Raised when a constraint falls outside the supported fragment (nonlinear
// premise atoms, degree > 2 differences, template-dependent case splits).
// Surfaced as verdict "unknown", never as "refuted".
struct UnsupportedCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Linear forms and polynomials over program variables
// ---------------------------------------------------------------------------

// sum coeff_v * v + constant
struct LinTerm {
    std::map<Var, Rat> coeff;
    Rat constant;

    bool is_constant() const { return coeff.empty(); }
    Rat eval(const Store& s) const;
    LinTerm operator-(const LinTerm& o) const;
    LinTerm negated() const;
    bool operator==(const LinTerm& o) const { return coeff == o.coeff && constant == o.constant; }
    std::string str() const;
};

LinTerm linearize(const IntExpr& e);  // throws UnsupportedCase on nonlinear input

// Atoms are LinTerm >= 0. A disjunct is a conjunction of atoms. Comparisons
// are sharpened over the integers (a > b becomes a - b - 1 >= 0).
std::vector<std::vector<LinTerm>> bexp_to_dnf(const BExp& b, bool negated = false);

using Monomial = std::map<Var, int>;  // variable -> exponent

// Affine function of template coefficient symbols.
struct AffineQ {
    Rat constant;
    std::map<std::string, Rat> lin;

    bool is_constant() const { return lin.empty(); }
    bool is_zero() const { return constant == 0 && lin.empty(); }
    AffineQ& operator+=(const AffineQ& o);
    AffineQ operator*(const Rat& k) const;
    // Throws UnsupportedCase when both operands depend on coefficients.
    AffineQ operator*(const AffineQ& o) const;
    bool operator==(const AffineQ& o) const { return constant == o.constant && lin == o.lin; }
    Rat value(const CoeffAssignment& a) const;
};

// Polynomial over program variables whose coefficients are affine in the
// template symbols.
struct Poly {
    std::map<Monomial, AffineQ> terms;

    static Poly constant(Rat q);
    static Poly symbol(const std::string& q);
    static Poly of_linterm(const LinTerm& t);
    static Poly of_intexpr(const IntExpr& e);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    bool operator==(const Poly& o) const { return terms == o.terms; }

    int degree() const;
    bool coeff_free() const;
    // Requires degree <= 1 and coeff_free.
    LinTerm to_linterm() const;
    Rat eval(const Store& s, const CoeffAssignment& a) const;
    std::string str() const;
};

// ---------------------------------------------------------------------------
// Constraints: premise |= lhs <= rhs over cost expressions
// ---------------------------------------------------------------------------

struct Constraint {
    BExp premise;
    CostExpr lhs;
    CostExpr rhs;
};

// premise atoms imply difference >= 0
struct PolyInequality {
    std::vector<LinTerm> premise;
    Poly difference;
};

// Case elimination and case distinction: nat is resolved by sign entailment
// or an integer split, Iverson brackets split the premise, max on the left
// splits conjunctively and on the right by case distinction. Cases with
// infeasible premises are dropped.
std::vector<PolyInequality> eliminate_cases(const Constraint& c);

// ---------------------------------------------------------------------------
// Linear systems over solver symbols (template coefficients + multipliers)
// ---------------------------------------------------------------------------

struct SymLin {
    std::map<std::string, Rat> coeff;
    Rat constant;
    std::string str() const;
};

struct SymCon {
    SymLin expr;
    bool is_equality;  // expr == 0, otherwise expr >= 0
};

// Farkas (degree <= 1) or Handelman-style (degree 2) reduction to affine
// conditions over the coefficient symbols. Fresh multipliers are named
// `prefix`0, `prefix`1, ... and reported through aux_names. Sound and
// incomplete; degree > 2 raises UnsupportedCase.
std::vector<SymCon> farkas_reduce(const PolyInequality& p, const std::string& prefix,
                                  std::vector<std::string>* aux_names);

struct LinearSystem {
    std::vector<std::string> vars;       // declaration order; all implicitly >= 0
    std::vector<SymCon> constraints;
    std::vector<std::string> objective;  // minimize their sum, then refine
};

struct SolveResult {
    bool feasible = false;
    std::map<std::string, Rat> assignment;
};

// Exact rational simplex. Minimizes the objective sum; ties are resolved by
// minimizing the trailing objective symbols first, so earlier-declared
// coefficients absorb the weight deterministically.
SolveResult solve_linear(const LinearSystem& sys);

// LP-style text dump for debugging against external tools.
std::string dump_lp(const LinearSystem& sys);

// Certificate search for a ground inequality (no free template symbols, or
// already instantiated): true means premise ⊨ difference >= 0 is certified.
bool certify(const PolyInequality& p);

// Rational-relaxation checks over the premise polytope.
bool premise_feasible(const std::vector<LinTerm>& atoms);
bool entails_nonneg(const std::vector<LinTerm>& atoms, const LinTerm& t);
bool entails_nonpos(const std::vector<LinTerm>& atoms, const LinTerm& t);

// Random + boundary store search for a violation of an instantiated
// constraint. Returns a counterexample store, or nullopt when all samples
// pass. Boundary stores are derived from the premise atoms.
std::optional<Store> numeric_refute(const Constraint& c, const CoeffAssignment& assignment,
                                    long samples, std::uint64_t seed, long range = 50);

}  // namespace pwhile
