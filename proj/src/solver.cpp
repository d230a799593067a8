// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/solver.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

#include "pwhile/printer.hpp"
#include "pwhile/simplex.hpp"

namespace pwhile {

// ---------------------------------------------------------------------------
// Linear forms
// ---------------------------------------------------------------------------

Rat LinTerm::eval(const Store& s) const {
    Rat v = constant;
    for (const auto& [var, c] : coeff) v += c * rat_of(s.get(var));
    return v;
}

LinTerm LinTerm::operator-(const LinTerm& o) const {
    LinTerm out = *this;
    out.constant -= o.constant;
    for (const auto& [var, c] : o.coeff) {
        Rat& slot = out.coeff[var];
        slot -= c;
        if (slot == 0) out.coeff.erase(var);
    }
    return out;
}

LinTerm LinTerm::negated() const {
    LinTerm out;
    out.constant = -constant;
    for (const auto& [var, c] : coeff) out.coeff[var] = -c;
    return out;
}

std::string LinTerm::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [var, c] : coeff) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << rat_str(c) << "*";
        os << var.name;
    }
    if (first) {
        os << rat_str(constant);
    } else if (constant != 0) {
        os << " + " << rat_str(constant);
    }
    return os.str();
}

LinTerm linearize(const IntExpr& e) {
    switch (e->kind) {
        case IntExprNode::Kind::Variable: {
            LinTerm t;
            t.constant = 0;
            t.coeff[e->var] = Rat(1);
            return t;
        }
        case IntExprNode::Kind::Constant: {
            LinTerm t;
            t.constant = rat_of(e->value);
            return t;
        }
        case IntExprNode::Kind::Binary: {
            LinTerm a = linearize(e->lhs);
            LinTerm b = linearize(e->rhs);
            switch (e->op) {
                case IntOp::Add: {
                    LinTerm out = a;
                    out.constant += b.constant;
                    for (const auto& [v, c] : b.coeff) {
                        Rat& slot = out.coeff[v];
                        slot += c;
                        if (slot == 0) out.coeff.erase(v);
                    }
                    return out;
                }
                case IntOp::Sub: return a - b;
                case IntOp::Mul: {
                    if (!a.is_constant() && !b.is_constant()) {
                        throw UnsupportedCase("nonlinear integer expression: " + print(e));
                    }
                    const LinTerm& lin = a.is_constant() ? b : a;
                    const Rat k = a.is_constant() ? a.constant : b.constant;
                    LinTerm out;
                    out.constant = lin.constant * k;
                    if (k != 0) {
                        for (const auto& [v, c] : lin.coeff) out.coeff[v] = c * k;
                    }
                    return out;
                }
            }
        }
    }
    throw std::logic_error("unreachable int expression kind");
}

// ---------------------------------------------------------------------------
// DNF of boolean premises, sharpened over the integers
// ---------------------------------------------------------------------------

namespace {

constexpr size_t kMaxDisjuncts = 64;
constexpr size_t kMaxCases = 512;

using Conj = std::vector<LinTerm>;
using Dnf = std::vector<Conj>;

LinTerm shift(const LinTerm& t, long delta) {
    LinTerm out = t;
    out.constant += delta;
    return out;
}

Dnf cross(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a) {
        for (const auto& y : b) {
            Conj c = x;
            c.insert(c.end(), y.begin(), y.end());
            out.push_back(std::move(c));
            if (out.size() > kMaxDisjuncts) {
                throw UnsupportedCase("premise DNF too large");
            }
        }
    }
    return out;
}

Dnf unite(Dnf a, const Dnf& b) {
    a.insert(a.end(), b.begin(), b.end());
    if (a.size() > kMaxDisjuncts) throw UnsupportedCase("premise DNF too large");
    return a;
}

}  // namespace

std::vector<std::vector<LinTerm>> bexp_to_dnf(const BExp& b, bool negated) {
    switch (b->kind) {
        case BExpNode::Kind::Lit:
            if (b->lit != negated) return {{}};  // true: one empty conjunction
            return {};                           // false: no disjunct
        case BExpNode::Kind::Cmp: {
            LinTerm l = linearize(b->cl);
            LinTerm r = linearize(b->cr);
            LinTerm d = l - r;  // a - b
            CmpOp op = b->cmp;
            if (negated) {
                switch (op) {
                    case CmpOp::Lt: op = CmpOp::Ge; break;
                    case CmpOp::Le: op = CmpOp::Gt; break;
                    case CmpOp::Eq: op = CmpOp::Ne; break;
                    case CmpOp::Ge: op = CmpOp::Lt; break;
                    case CmpOp::Gt: op = CmpOp::Le; break;
                    case CmpOp::Ne: op = CmpOp::Eq; break;
                }
            }
            switch (op) {
                case CmpOp::Ge: return {{d}};
                case CmpOp::Gt: return {{shift(d, -1)}};
                case CmpOp::Le: return {{d.negated()}};
                case CmpOp::Lt: return {{shift(d.negated(), -1)}};
                case CmpOp::Eq: return {{d, d.negated()}};
                case CmpOp::Ne: return {{shift(d, -1)}, {shift(d.negated(), -1)}};
            }
            break;
        }
        case BExpNode::Kind::And: {
            Dnf l = bexp_to_dnf(b->l, negated);
            Dnf r = bexp_to_dnf(b->r, negated);
            return negated ? unite(std::move(l), r) : cross(l, r);
        }
        case BExpNode::Kind::Or: {
            Dnf l = bexp_to_dnf(b->l, negated);
            Dnf r = bexp_to_dnf(b->r, negated);
            return negated ? cross(l, r) : unite(std::move(l), r);
        }
        case BExpNode::Kind::Not: return bexp_to_dnf(b->l, !negated);
    }
    throw std::logic_error("unreachable bexp kind");
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

AffineQ& AffineQ::operator+=(const AffineQ& o) {
    constant += o.constant;
    for (const auto& [q, c] : o.lin) {
        Rat& slot = lin[q];
        slot += c;
        if (slot == 0) lin.erase(q);
    }
    return *this;
}

AffineQ AffineQ::operator*(const Rat& k) const {
    AffineQ out;
    if (k == 0) return out;
    out.constant = constant * k;
    for (const auto& [q, c] : lin) out.lin[q] = c * k;
    return out;
}

AffineQ AffineQ::operator*(const AffineQ& o) const {
    if (!lin.empty() && !o.lin.empty()) {
        throw UnsupportedCase("product of template coefficients is nonlinear");
    }
    if (o.lin.empty()) return *this * o.constant;
    return o * constant;
}

Rat AffineQ::value(const CoeffAssignment& a) const {
    Rat v = constant;
    for (const auto& [q, c] : lin) v += c * a.at(q);
    return v;
}

Poly Poly::constant(Rat q) {
    Poly p;
    if (q != 0) p.terms[{}] = AffineQ{std::move(q), {}};
    return p;
}

Poly Poly::symbol(const std::string& q) {
    Poly p;
    AffineQ a;
    a.constant = 0;
    a.lin[q] = Rat(1);
    p.terms[{}] = std::move(a);
    return p;
}

Poly Poly::of_linterm(const LinTerm& t) {
    Poly p;
    if (t.constant != 0) p.terms[{}] = AffineQ{t.constant, {}};
    for (const auto& [v, c] : t.coeff) {
        if (c != 0) p.terms[{{v, 1}}] = AffineQ{c, {}};
    }
    return p;
}

Poly Poly::of_intexpr(const IntExpr& e) {
    switch (e->kind) {
        case IntExprNode::Kind::Variable: {
            Poly p;
            p.terms[{{e->var, 1}}] = AffineQ{Rat(1), {}};
            return p;
        }
        case IntExprNode::Kind::Constant: return constant(rat_of(e->value));
        case IntExprNode::Kind::Binary: {
            Poly a = of_intexpr(e->lhs);
            Poly b = of_intexpr(e->rhs);
            switch (e->op) {
                case IntOp::Add: return a + b;
                case IntOp::Sub: return a - b;
                case IntOp::Mul: return a * b;
            }
        }
    }
    throw std::logic_error("unreachable int expression kind");
}

Poly Poly::operator+(const Poly& o) const {
    Poly out = *this;
    for (const auto& [m, a] : o.terms) {
        AffineQ& slot = out.terms[m];
        slot += a;
        if (slot.is_zero()) out.terms.erase(m);
    }
    return out;
}

Poly Poly::operator-(const Poly& o) const {
    Poly out = *this;
    for (const auto& [m, a] : o.terms) {
        AffineQ& slot = out.terms[m];
        slot += a * Rat(-1);
        if (slot.is_zero()) out.terms.erase(m);
    }
    return out;
}

Poly Poly::operator*(const Poly& o) const {
    Poly out;
    for (const auto& [m1, a1] : terms) {
        for (const auto& [m2, a2] : o.terms) {
            Monomial m = m1;
            for (const auto& [v, e] : m2) m[v] += e;
            AffineQ& slot = out.terms[m];
            slot += a1 * a2;
            if (slot.is_zero()) out.terms.erase(m);
        }
    }
    return out;
}

int Poly::degree() const {
    int d = 0;
    for (const auto& [m, a] : terms) {
        int md = 0;
        for (const auto& [v, e] : m) md += e;
        d = std::max(d, md);
    }
    return d;
}

bool Poly::coeff_free() const {
    for (const auto& [m, a] : terms) {
        if (!a.is_constant()) return false;
    }
    return true;
}

LinTerm Poly::to_linterm() const {
    LinTerm t;
    t.constant = 0;
    for (const auto& [m, a] : terms) {
        if (!a.is_constant()) throw UnsupportedCase("coefficient symbols in case-split position");
        if (m.empty()) {
            t.constant = a.constant;
        } else if (m.size() == 1 && m.begin()->second == 1) {
            t.coeff[m.begin()->first] = a.constant;
        } else {
            throw UnsupportedCase("nonlinear term in case-split position");
        }
    }
    return t;
}

Rat Poly::eval(const Store& s, const CoeffAssignment& a) const {
    Rat v(0);
    for (const auto& [m, aq] : terms) {
        Rat mono(1);
        for (const auto& [var, e] : m) {
            Rat base = rat_of(s.get(var));
            for (int i = 0; i < e; ++i) mono *= base;
        }
        v += aq.value(a) * mono;
    }
    return v;
}

std::string Poly::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, a] : terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << rat_str(a.constant);
        for (const auto& [q, c] : a.lin) os << " + " << rat_str(c) << "?" << q;
        os << ")";
        for (const auto& [v, e] : m) {
            os << "*" << v.name;
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Feasibility and entailment over the rational relaxation
// ---------------------------------------------------------------------------

namespace {

// LP over free program variables: each variable is split as x = x+ - x-,
// every atom t >= 0 becomes t - s = 0 with surplus s >= 0.
struct PremiseLp {
    std::vector<Var> vars;
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    size_t ncols;

    explicit PremiseLp(const std::vector<LinTerm>& atoms) {
        std::set<Var> seen;
        for (const auto& t : atoms) {
            for (const auto& [v, c] : t.coeff) seen.insert(v);
        }
        vars.assign(seen.begin(), seen.end());
        size_t nv = vars.size();
        ncols = 2 * nv + atoms.size();
        for (size_t i = 0; i < atoms.size(); ++i) {
            std::vector<Rat> row(ncols, Rat(0));
            for (size_t j = 0; j < nv; ++j) {
                auto it = atoms[i].coeff.find(vars[j]);
                if (it != atoms[i].coeff.end()) {
                    row[2 * j] = it->second;
                    row[2 * j + 1] = -it->second;
                }
            }
            row[2 * nv + i] = Rat(-1);  // surplus
            a.push_back(std::move(row));
            b.push_back(-atoms[i].constant);
        }
    }

    std::vector<Rat> objective(const LinTerm& t) const {
        std::vector<Rat> c(ncols, Rat(0));
        for (size_t j = 0; j < vars.size(); ++j) {
            auto it = t.coeff.find(vars[j]);
            if (it != t.coeff.end()) {
                c[2 * j] = it->second;
                c[2 * j + 1] = -it->second;
            }
        }
        return c;
    }
};

}  // namespace

bool premise_feasible(const std::vector<LinTerm>& atoms) {
    for (const auto& t : atoms) {
        if (t.is_constant() && t.constant < 0) return false;
    }
    PremiseLp lp(atoms);
    SimplexOutcome out = simplex_solve(lp.a, lp.b, std::vector<Rat>(lp.ncols, Rat(0)));
    return out.status == SimplexStatus::Optimal;
}

bool entails_nonneg(const std::vector<LinTerm>& atoms, const LinTerm& t) {
    if (t.is_constant()) return t.constant >= 0 || !premise_feasible(atoms);
    if (!premise_feasible(atoms)) return true;
    // A variable the premise does not mention is free in both directions.
    for (const auto& [v, c] : t.coeff) {
        if (c == 0) continue;
        bool mentioned = false;
        for (const auto& atom : atoms) {
            auto it = atom.coeff.find(v);
            if (it != atom.coeff.end() && it->second != 0) {
                mentioned = true;
                break;
            }
        }
        if (!mentioned) return false;
    }
    PremiseLp lp(atoms);
    SimplexOutcome out = simplex_solve(lp.a, lp.b, lp.objective(t));
    if (out.status == SimplexStatus::Infeasible) return true;
    if (out.status == SimplexStatus::Unbounded) return false;
    return out.objective + t.constant >= 0;
}

bool entails_nonpos(const std::vector<LinTerm>& atoms, const LinTerm& t) {
    return entails_nonneg(atoms, t.negated());
}

// ---------------------------------------------------------------------------
// Case elimination
// ---------------------------------------------------------------------------

namespace {

// Internal expression tree after cost-expression lowering: polynomial leaves,
// nat over polynomials, Iverson guards, +, *, max.
struct CE;
using CEP = std::shared_ptr<const CE>;
struct CE {
    enum class K { Leaf, Nat, Ive, Add, Mul, Max };
    K k;
    Poly poly;   // Leaf payload, Nat argument
    BExp guard;  // Ive
    CEP a, b;    // children (Ive body in a)
};

CEP ce_leaf(Poly p) {
    auto n = std::make_shared<CE>();
    n->k = CE::K::Leaf;
    n->poly = std::move(p);
    return n;
}

CEP ce_mk(CE::K k, CEP a, CEP b) {
    auto n = std::make_shared<CE>();
    n->k = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

CEP lower(const CostExpr& c) {
    switch (c->kind) {
        case CostExprNode::Kind::Const: return ce_leaf(Poly::constant(c->value));
        case CostExprNode::Kind::Coeff: return ce_leaf(Poly::symbol(c->coeff));
        case CostExprNode::Kind::Nat: {
            auto n = std::make_shared<CE>();
            n->k = CE::K::Nat;
            n->poly = Poly::of_intexpr(c->nat_arg);
            return n;
        }
        case CostExprNode::Kind::Iverson: {
            auto n = std::make_shared<CE>();
            n->k = CE::K::Ive;
            n->guard = c->guard;
            n->a = lower(c->a);
            return n;
        }
        case CostExprNode::Kind::Add: return ce_mk(CE::K::Add, lower(c->a), lower(c->b));
        case CostExprNode::Kind::Mul: return ce_mk(CE::K::Mul, lower(c->a), lower(c->b));
        case CostExprNode::Kind::Max: return ce_mk(CE::K::Max, lower(c->a), lower(c->b));
    }
    throw std::logic_error("unreachable cost expression kind");
}

const BExp* find_iverson(const CEP& e) {
    if (!e) return nullptr;
    if (e->k == CE::K::Ive) return &e->guard;
    if (const BExp* g = find_iverson(e->a)) return g;
    return find_iverson(e->b);
}

const Poly* find_nat(const CEP& e) {
    if (!e) return nullptr;
    if (e->k == CE::K::Nat) return &e->poly;
    if (const Poly* p = find_nat(e->a)) return p;
    return find_nat(e->b);
}

CEP replace_iverson(const CEP& e, const BExp& guard, bool value) {
    if (!e) return e;
    if (e->k == CE::K::Ive && equal(e->guard, guard)) {
        return value ? replace_iverson(e->a, guard, value) : ce_leaf(Poly::constant(Rat(0)));
    }
    CEP a = replace_iverson(e->a, guard, value);
    CEP b = replace_iverson(e->b, guard, value);
    if (a == e->a && b == e->b) return e;
    auto n = std::make_shared<CE>(*e);
    n->a = a;
    n->b = b;
    return n;
}

CEP replace_nat(const CEP& e, const Poly& arg, bool positive) {
    if (!e) return e;
    if (e->k == CE::K::Nat && e->poly == arg) {
        return positive ? ce_leaf(arg) : ce_leaf(Poly::constant(Rat(0)));
    }
    CEP a = replace_nat(e->a, arg, positive);
    CEP b = replace_nat(e->b, arg, positive);
    if (a == e->a && b == e->b) return e;
    auto n = std::make_shared<CE>(*e);
    n->a = a;
    n->b = b;
    return n;
}

// Max-of-polynomials normal form; distribution of + and * over max is valid
// because every residual leaf is nonnegative under the case premise.
std::vector<Poly> max_components(const CEP& e) {
    switch (e->k) {
        case CE::K::Leaf: return {e->poly};
        case CE::K::Add: {
            std::vector<Poly> out;
            for (const auto& x : max_components(e->a)) {
                for (const auto& y : max_components(e->b)) {
                    out.push_back(x + y);
                }
            }
            return out;
        }
        case CE::K::Mul: {
            std::vector<Poly> out;
            for (const auto& x : max_components(e->a)) {
                for (const auto& y : max_components(e->b)) {
                    out.push_back(x * y);
                }
            }
            return out;
        }
        case CE::K::Max: {
            std::vector<Poly> out = max_components(e->a);
            std::vector<Poly> r = max_components(e->b);
            out.insert(out.end(), r.begin(), r.end());
            return out;
        }
        case CE::K::Nat:
        case CE::K::Ive: break;
    }
    throw std::logic_error("max_components called before full elimination");
}

struct CaseState {
    Conj atoms;
    CEP lhs, rhs;
};

}  // namespace

std::vector<PolyInequality> eliminate_cases(const Constraint& c) {
    std::vector<PolyInequality> out;
    std::deque<CaseState> work;
    for (const auto& conj : bexp_to_dnf(c.premise)) {
        work.push_back({conj, lower(c.lhs), lower(c.rhs)});
    }

    size_t processed = 0;
    while (!work.empty()) {
        if (++processed > kMaxCases) throw UnsupportedCase("case explosion in constraint");
        CaseState st = std::move(work.front());
        work.pop_front();

        if (!premise_feasible(st.atoms)) continue;

        // Iverson brackets first: they split the premise on the guard.
        const BExp* guard = find_iverson(st.lhs);
        if (guard == nullptr) guard = find_iverson(st.rhs);
        if (guard != nullptr) {
            BExp g = *guard;
            for (bool value : {true, false}) {
                for (const auto& conj : bexp_to_dnf(g, !value)) {
                    CaseState child;
                    child.atoms = st.atoms;
                    child.atoms.insert(child.atoms.end(), conj.begin(), conj.end());
                    child.lhs = replace_iverson(st.lhs, g, value);
                    child.rhs = replace_iverson(st.rhs, g, value);
                    work.push_back(std::move(child));
                }
            }
            continue;
        }

        // nat arguments next: sign entailment, otherwise an integer split.
        const Poly* nat_arg = find_nat(st.lhs);
        if (nat_arg == nullptr) nat_arg = find_nat(st.rhs);
        if (nat_arg != nullptr) {
            Poly arg = *nat_arg;
            LinTerm lin;
            if (arg.degree() > 1 || !arg.coeff_free()) {
                throw UnsupportedCase("nat over a nonlinear expression: " + arg.str());
            }
            lin = arg.to_linterm();
            if (entails_nonneg(st.atoms, lin)) {
                work.push_back({st.atoms, replace_nat(st.lhs, arg, true),
                                replace_nat(st.rhs, arg, true)});
            } else if (entails_nonpos(st.atoms, lin)) {
                work.push_back({st.atoms, replace_nat(st.lhs, arg, false),
                                replace_nat(st.rhs, arg, false)});
            } else {
                CaseState pos{st.atoms, replace_nat(st.lhs, arg, true),
                              replace_nat(st.rhs, arg, true)};
                pos.atoms.push_back(lin);
                work.push_back(std::move(pos));
                CaseState neg{st.atoms, replace_nat(st.lhs, arg, false),
                              replace_nat(st.rhs, arg, false)};
                LinTerm opposite = lin.negated();
                opposite.constant -= 1;  // integer variables: a <= -1
                neg.atoms.push_back(opposite);
                work.push_back(std::move(neg));
            }
            continue;
        }

        // Only +, *, max remain. The left side splits conjunctively, the
        // right side by case distinction on which component is maximal.
        std::vector<Poly> lhs_parts = max_components(st.lhs);
        std::vector<Poly> rhs_parts = max_components(st.rhs);
        if (rhs_parts.size() == 1) {
            for (const auto& lp : lhs_parts) {
                out.push_back({st.atoms, rhs_parts[0] - lp});
            }
            continue;
        }
        std::vector<LinTerm> rhs_lin;
        rhs_lin.reserve(rhs_parts.size());
        for (const auto& p : rhs_parts) {
            rhs_lin.push_back(p.to_linterm());  // throws on coefficients/nonlinear
        }
        for (size_t i = 0; i < rhs_parts.size(); ++i) {
            Conj atoms = st.atoms;
            for (size_t j = 0; j < rhs_parts.size(); ++j) {
                if (j != i) atoms.push_back(rhs_lin[i] - rhs_lin[j]);
            }
            if (!premise_feasible(atoms)) continue;
            for (const auto& lp : lhs_parts) {
                out.push_back({atoms, rhs_parts[i] - lp});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Farkas / Handelman reduction
// ---------------------------------------------------------------------------

std::vector<SymCon> farkas_reduce(const PolyInequality& p, const std::string& prefix,
                                  std::vector<std::string>* aux_names) {
    int deg = p.difference.degree();
    if (deg > 2) throw UnsupportedCase("difference polynomial of degree > 2");

    // Certificate basis: 1, the premise atoms, and for degree 2 all pairwise
    // atom products.
    std::vector<Poly> basis;
    basis.push_back(Poly::constant(Rat(1)));
    for (const auto& atom : p.premise) basis.push_back(Poly::of_linterm(atom));
    if (deg == 2) {
        size_t n_atoms = p.premise.size();
        for (size_t i = 0; i < n_atoms; ++i) {
            for (size_t j = i; j < n_atoms; ++j) {
                basis.push_back(Poly::of_linterm(p.premise[i]) * Poly::of_linterm(p.premise[j]));
            }
        }
    }

    std::vector<std::string> names;
    names.reserve(basis.size());
    for (size_t i = 0; i < basis.size(); ++i) {
        names.push_back(prefix + std::to_string(i));
    }
    if (aux_names != nullptr) {
        aux_names->insert(aux_names->end(), names.begin(), names.end());
    }

    // difference - sum(lambda_i * basis_i) must vanish per monomial.
    std::map<Monomial, SymLin> rows;
    for (const auto& [m, a] : p.difference.terms) {
        SymLin& row = rows[m];
        row.constant += a.constant;
        for (const auto& [q, cq] : a.lin) row.coeff[q] += cq;
    }
    for (size_t i = 0; i < basis.size(); ++i) {
        for (const auto& [m, a] : basis[i].terms) {
            rows[m].coeff[names[i]] -= a.constant;
        }
    }

    std::vector<SymCon> cons;
    cons.reserve(rows.size());
    for (auto& [m, row] : rows) {
        for (auto it = row.coeff.begin(); it != row.coeff.end();) {
            it = it->second == 0 ? row.coeff.erase(it) : std::next(it);
        }
        if (row.coeff.empty()) {
            if (row.constant != 0) {
                // No multiplier can match this monomial; emit an unsatisfiable
                // row so the caller sees infeasibility rather than silence.
                cons.push_back({SymLin{{}, Rat(-1)}, false});
            }
            continue;
        }
        cons.push_back({std::move(row), true});
    }
    return cons;
}

// ---------------------------------------------------------------------------
// Linear system solving
// ---------------------------------------------------------------------------

namespace {

SimplexOutcome solve_system(const LinearSystem& sys, const std::vector<Rat>& objective) {
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < sys.vars.size(); ++i) idx[sys.vars[i]] = i;
    size_t nv = sys.vars.size();
    size_t n_ineq = 0;
    for (const auto& con : sys.constraints) {
        if (!con.is_equality) ++n_ineq;
    }
    size_t ncols = nv + n_ineq;
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    size_t surplus = nv;
    for (const auto& con : sys.constraints) {
        std::vector<Rat> row(ncols, Rat(0));
        for (const auto& [name, c] : con.expr.coeff) {
            auto it = idx.find(name);
            if (it == idx.end()) throw std::invalid_argument("undeclared symbol " + name);
            row[it->second] = c;
        }
        if (!con.is_equality) row[surplus++] = Rat(-1);
        a.push_back(std::move(row));
        b.push_back(-con.expr.constant);
    }
    std::vector<Rat> c(ncols, Rat(0));
    for (size_t i = 0; i < nv && i < objective.size(); ++i) c[i] = objective[i];
    return simplex_solve(a, b, c);
}

}  // namespace

SolveResult solve_linear(const LinearSystem& sys) {
    std::vector<Rat> obj(sys.vars.size(), Rat(0));
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < sys.vars.size(); ++i) idx[sys.vars[i]] = i;
    for (const auto& name : sys.objective) obj[idx.at(name)] = Rat(1);

    SimplexOutcome first = solve_system(sys, obj);
    if (first.status == SimplexStatus::Infeasible) return {false, {}};
    if (first.status == SimplexStatus::Unbounded) {
        // Minimizing a nonnegative sum cannot be unbounded; treat defensively.
        return {false, {}};
    }

    // Pin the optimum, then minimize trailing objective symbols first so that
    // earlier-declared coefficients take the weight. Deterministic.
    LinearSystem refined = sys;
    SymLin opt;
    for (const auto& name : sys.objective) opt.coeff[name] = Rat(1);
    opt.constant = -first.objective;
    refined.constraints.push_back({opt, true});

    std::vector<Rat> solution = first.solution;
    for (size_t k = sys.objective.size(); k-- > 0;) {
        std::vector<Rat> single(sys.vars.size(), Rat(0));
        size_t var_index = idx.at(sys.objective[k]);
        single[var_index] = Rat(1);
        SimplexOutcome step = solve_system(refined, single);
        if (step.status != SimplexStatus::Optimal) break;
        solution = step.solution;
        SymLin pin;
        pin.coeff[sys.objective[k]] = Rat(1);
        pin.constant = -step.objective;
        refined.constraints.push_back({pin, true});
    }

    SolveResult res;
    res.feasible = true;
    for (size_t i = 0; i < sys.vars.size(); ++i) res.assignment[sys.vars[i]] = solution[i];
    return res;
}

std::string SymLin::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, c] : coeff) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << rat_str(c) << " ";
        os << name;
    }
    if (first) {
        os << rat_str(constant);
    } else if (constant != 0) {
        os << " + " << rat_str(constant);
    }
    return os.str();
}

std::string dump_lp(const LinearSystem& sys) {
    std::ostringstream os;
    os << "min:";
    for (const auto& name : sys.objective) os << " + " << name;
    os << ";\n";
    for (size_t i = 0; i < sys.constraints.size(); ++i) {
        const auto& con = sys.constraints[i];
        os << "c" << i << ": " << con.expr.str() << (con.is_equality ? " = 0" : " >= 0") << ";\n";
    }
    for (const auto& v : sys.vars) os << v << " >= 0;\n";
    return os.str();
}

bool certify(const PolyInequality& p) {
    try {
        std::vector<std::string> aux;
        std::vector<SymCon> cons = farkas_reduce(p, "l", &aux);
        LinearSystem sys;
        sys.vars = aux;
        for (auto& con : cons) {
            // Ground inequalities may still mention template symbols if the
            // caller forgot to instantiate; treat that as unsupported.
            for (const auto& [name, c] : con.expr.coeff) {
                if (std::find(aux.begin(), aux.end(), name) == aux.end()) {
                    throw UnsupportedCase("uninstantiated coefficient " + name);
                }
            }
            sys.constraints.push_back(std::move(con));
        }
        return solve_linear(sys).feasible;
    } catch (const UnsupportedCase&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Numeric refutation
// ---------------------------------------------------------------------------

namespace {

void collect_comparison_boundaries(const BExp& b, std::vector<Store>& out) {
    switch (b->kind) {
        case BExpNode::Kind::Lit: return;
        case BExpNode::Kind::Cmp: {
            LinTerm d;
            try {
                d = linearize(b->cl) - linearize(b->cr);
            } catch (const UnsupportedCase&) {
                return;
            }
            // One boundary candidate per variable: all others zeroed, this one
            // chosen to make the comparison tight where integral.
            for (const auto& [v, c] : d.coeff) {
                for (long delta : {0L, 1L, -1L}) {
                    Rat target = (Rat(delta) - d.constant) / c;
                    if (target.get_den() == 1) {
                        Store s;
                        s.bindings[v] = target.get_num();
                        out.push_back(std::move(s));
                    }
                }
            }
            return;
        }
        case BExpNode::Kind::And:
        case BExpNode::Kind::Or:
            collect_comparison_boundaries(b->l, out);
            collect_comparison_boundaries(b->r, out);
            return;
        case BExpNode::Kind::Not: collect_comparison_boundaries(b->l, out); return;
    }
}

}  // namespace

std::optional<Store> numeric_refute(const Constraint& c, const CoeffAssignment& assignment,
                                    long samples, std::uint64_t seed, long range) {
    std::set<Var> vars;
    collect_free_vars(c.premise, vars);
    collect_free_vars(c.lhs, vars);
    collect_free_vars(c.rhs, vars);
    std::vector<Var> var_list(vars.begin(), vars.end());

    auto violated = [&](const Store& s) {
        if (!eval_bexp(c.premise, s)) return false;
        return eval_cost(c.lhs, s, assignment) > eval_cost(c.rhs, s, assignment);
    };

    std::vector<Store> candidates;
    candidates.push_back(Store{});
    collect_comparison_boundaries(c.premise, candidates);
    for (const auto& s : candidates) {
        if (violated(s)) return s;
        // Boundary values combined with small offsets on the other variables.
        for (long d : {-1L, 0L, 1L, 2L}) {
            Store shifted = s;
            for (const auto& v : var_list) {
                if (shifted.bindings.find(v) == shifted.bindings.end()) {
                    shifted.bindings[v] = Int(d);
                }
            }
            if (violated(shifted)) return shifted;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-range, range);
    for (long i = 0; i < samples; ++i) {
        Store s;
        for (const auto& v : var_list) s.bindings[v] = Int(dist(rng));
        if (violated(s)) return s;
    }
    return std::nullopt;
}

}  // namespace pwhile
