// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/analysis.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "pwhile/printer.hpp"

namespace pwhile {

std::string strategy_name(StrategyKind s) {
    switch (s) {
        case StrategyKind::Decompose: return "decompose";
        case StrategyKind::Invariant: return "invariant";
        case StrategyKind::Unroll: return "unroll";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Norm selection
// ---------------------------------------------------------------------------

namespace {

void push_norm(std::vector<Norm>& norms, IntExpr e) {
    e = int_simplify(e);
    for (const auto& n : norms) {
        if (equal(n.expr, e)) return;
    }
    norms.push_back({std::move(e)});
}

void norms_of_comparison(const BExpNode& cmp, std::vector<Norm>& out) {
    const IntExpr& a = cmp.cl;
    const IntExpr& b = cmp.cr;
    auto diff = [](const IntExpr& x, const IntExpr& y) { return isub(x, y); };
    auto diff1 = [&](const IntExpr& x, const IntExpr& y) {
        return iadd(isub(x, y), iconst(1));
    };
    switch (cmp.cmp) {
        case CmpOp::Gt: push_norm(out, diff(a, b)); break;
        case CmpOp::Ge:
            push_norm(out, diff1(a, b));
            push_norm(out, diff(a, b));
            break;
        case CmpOp::Lt: push_norm(out, diff(b, a)); break;
        case CmpOp::Le:
            push_norm(out, diff1(b, a));
            push_norm(out, diff(b, a));
            break;
        case CmpOp::Eq:
            push_norm(out, diff1(a, b));
            push_norm(out, diff(a, b));
            push_norm(out, diff1(b, a));
            push_norm(out, diff(b, a));
            break;
        case CmpOp::Ne:
            push_norm(out, diff(a, b));
            push_norm(out, diff(b, a));
            break;
    }
}

void norms_of_bexp(const BExp& e, std::vector<Norm>& out) {
    switch (e->kind) {
        case BExpNode::Kind::Lit: return;
        case BExpNode::Kind::Cmp: norms_of_comparison(*e, out); return;
        case BExpNode::Kind::And:
        case BExpNode::Kind::Or:
            norms_of_bexp(e->l, out);
            norms_of_bexp(e->r, out);
            return;
        case BExpNode::Kind::Not: norms_of_bexp(e->l, out); return;
    }
}

void norms_of_command(const Command& c, std::vector<Norm>& out) {
    switch (c->kind) {
        case CommandNode::Kind::While:
            norms_of_bexp(c->guard, out);
            norms_of_bexp(c->inv, out);
            norms_of_command(c->a, out);
            return;
        case CommandNode::Kind::If:
        case CommandNode::Kind::NdChoice:
        case CommandNode::Kind::PChoice:
        case CommandNode::Kind::Seq:
            norms_of_command(c->a, out);
            norms_of_command(c->b, out);
            return;
        default: return;
    }
}

void collect_nat_atoms(const CostExpr& c, std::vector<Norm>& out) {
    switch (c->kind) {
        case CostExprNode::Kind::Nat: push_norm(out, c->nat_arg); return;
        case CostExprNode::Kind::Iverson: collect_nat_atoms(c->a, out); return;
        case CostExprNode::Kind::Add:
        case CostExprNode::Kind::Mul:
        case CostExprNode::Kind::Max:
            collect_nat_atoms(c->a, out);
            collect_nat_atoms(c->b, out);
            return;
        default: return;
    }
}

bool loop_free(const Command& c) {
    switch (c->kind) {
        case CommandNode::Kind::While: return false;
        case CommandNode::Kind::If:
        case CommandNode::Kind::NdChoice:
        case CommandNode::Kind::PChoice:
        case CommandNode::Kind::Seq: return loop_free(c->a) && loop_free(c->b);
        default: return true;
    }
}

size_t cost_size(const CostExpr& c) {
    switch (c->kind) {
        case CostExprNode::Kind::Const:
        case CostExprNode::Kind::Coeff: return 1;
        case CostExprNode::Kind::Nat: return 2;
        case CostExprNode::Kind::Iverson: return 1 + cost_size(c->a);
        default: return 1 + cost_size(c->a) + cost_size(c->b);
    }
}

}  // namespace

std::vector<Norm> select_norms(const Command& loop) {
    if (loop->kind != CommandNode::Kind::While) {
        throw std::invalid_argument("select_norms expects a while command");
    }
    std::vector<Norm> out;
    norms_of_bexp(loop->guard, out);
    norms_of_bexp(loop->inv, out);
    norms_of_command(loop->a, out);
    return out;
}

// ---------------------------------------------------------------------------
// Shapes, concavity, composition gap
// ---------------------------------------------------------------------------

Rat NormShape::eval(const std::vector<Rat>& args) const {
    Rat v(0);
    for (const auto& t : terms) {
        Rat prod = t.coeff;
        for (size_t idx : t.idxs) prod *= args.at(idx);
        v += prod;
    }
    return v;
}

CostExpr NormShape::apply(const std::vector<CostExpr>& args) const {
    CostExpr sum = nullptr;
    for (const auto& t : terms) {
        CostExpr prod = cconst(t.coeff);
        for (size_t idx : t.idxs) prod = cmul(prod, args.at(idx));
        sum = sum == nullptr ? prod : cadd(sum, prod);
    }
    return sum == nullptr ? cconst(0) : simplify(sum);
}

bool NormShape::affine() const {
    for (const auto& t : terms) {
        if (t.idxs.size() > 1) return false;
    }
    return true;
}

namespace {

std::string vec_str(const std::vector<Rat>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + rat_str(v[i]);
    return s + ")";
}

}  // namespace

ConcavityVerdict concavity_check(const NormShape& h, long trials, std::uint64_t seed) {
    if (h.affine()) return {true, "affine shape, structurally concave and monotone"};
    size_t k = std::max<size_t>(h.arity, 1);

    auto mix_violated = [&](std::vector<Rat> base, size_t coord, const Rat& r, const Rat& s,
                            const Rat& p) -> std::optional<std::string> {
        std::vector<Rat> at_r = base, at_s = base, at_m = base;
        at_r[coord] = r;
        at_s[coord] = s;
        at_m[coord] = p * r + (Rat(1) - p) * s;
        Rat lhs = h.eval(at_m);
        Rat rhs = p * h.eval(at_r) + (Rat(1) - p) * h.eval(at_s);
        if (lhs < rhs) {
            return "concavity violated at coord " + std::to_string(coord) + ", base " +
                   vec_str(base) + ", r=" + rat_str(r) + ", s=" + rat_str(s) +
                   ", p=" + rat_str(p);
        }
        return std::nullopt;
    };

    // Deterministic grid first, so simple witnesses are stable.
    for (long bv : {0L, 1L, 2L}) {
        std::vector<Rat> base(k, Rat(bv));
        for (size_t coord = 0; coord < k; ++coord) {
            for (long r = 0; r <= 3; ++r) {
                for (long s = r + 1; s <= 4; ++s) {
                    for (const Rat& p : {Rat(1, 2), Rat(1, 3)}) {
                        if (auto w = mix_violated(base, coord, Rat(r), Rat(s), p)) {
                            return {false, *w};
                        }
                    }
                }
            }
        }
    }

    std::mt19937_64 rng(seed);
    auto rnd = [&rng]() { return Rat(static_cast<long>(rng() % 13), 1 + static_cast<long>(rng() % 3)); };
    for (long t = 0; t < trials; ++t) {
        std::vector<Rat> base(k);
        for (auto& b : base) b = rnd();
        size_t coord = rng() % k;
        Rat p(1 + static_cast<long>(rng() % 3), 4);
        if (auto w = mix_violated(base, coord, rnd(), rnd(), p)) return {false, *w};

        // Weak monotonicity: increments keep the value from decreasing.
        std::vector<Rat> lo = base, hi = base;
        for (size_t i = 0; i < k; ++i) hi[i] += Rat(static_cast<long>(rng() % 4));
        if (h.eval(hi) < h.eval(lo)) {
            return {false, "monotonicity violated between " + vec_str(lo) + " and " + vec_str(hi)};
        }
    }
    return {true, "passed " + std::to_string(trials) + " mixing/monotonicity trials"};
}

CompositionGapReport composition_gap(const Command& c, const NormShape& f, const std::vector<Norm>& norms,
                        const std::vector<Store>& stores) {
    std::vector<CostExpr> norm_exprs;
    norm_exprs.reserve(norms.size());
    for (const auto& n : norms) norm_exprs.push_back(cnat(n.expr));

    CostExpr lhs_expr = et_symbolic_loopfree(CostMode::Cost, c, f.apply(norm_exprs));
    CostExpr cost_expr = et_symbolic_loopfree(CostMode::Cost, c, cconst(0));
    std::vector<CostExpr> h_exprs;
    h_exprs.reserve(norms.size());
    for (const auto& n : norms) {
        h_exprs.push_back(et_symbolic_loopfree(CostMode::Value, c, cnat(n.expr)));
    }

    CompositionGapReport report;
    report.max_gap = Rat(0);
    for (const auto& s : stores) {
        Rat lhs = eval_cost(lhs_expr, s);
        std::vector<Rat> h_vals;
        h_vals.reserve(h_exprs.size());
        for (const auto& h : h_exprs) h_vals.push_back(eval_cost(h, s));
        Rat rhs = eval_cost(cost_expr, s) + f.eval(h_vals);
        bool ok = lhs <= rhs;
        if (ok && rhs - lhs > report.max_gap) report.max_gap = rhs - lhs;
        if (!ok) report.all_ok = false;
        report.rows.push_back({s, lhs, rhs, ok});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

namespace {

struct TemplateShape {
    struct Term {
        std::string symbol;
        std::vector<size_t> idxs;  // indices into the norm basis; empty = constant
    };
    std::vector<Term> terms;

    CostExpr apply(const std::vector<CostExpr>& args) const {
        CostExpr sum = nullptr;
        for (const auto& t : terms) {
            CostExpr prod = ccoeff(t.symbol);
            for (size_t idx : t.idxs) prod = cmul(prod, args.at(idx));
            sum = sum == nullptr ? prod : cadd(sum, prod);
        }
        return sum == nullptr ? cconst(0) : sum;
    }

    std::vector<std::string> symbols() const {
        std::vector<std::string> out;
        out.reserve(terms.size());
        for (const auto& t : terms) out.push_back(t.symbol);
        return out;
    }

    NormShape to_shape(const CoeffAssignment& solution, size_t arity) const {
        NormShape s;
        s.arity = arity;
        for (const auto& t : terms) {
            Rat c = solution.at(t.symbol);
            if (c != 0) s.terms.push_back({c, t.idxs});
        }
        return s;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Analyzer implementation
// ---------------------------------------------------------------------------

struct Analyzer::Impl {
    Analyzer* self = nullptr;
    AnalysisOptions opts;
    std::map<const CommandNode*, std::string> labels;
    size_t label_counter = 0;
    size_t symbol_counter = 0;
    size_t aux_counter = 0;
    std::map<std::string, CostExpr> memo;

    // Joint constraint pool for the invariant strategy over nested loops.
    struct JointPool {
        std::vector<std::string> symbols;
        std::vector<Constraint> constraints;
        struct Pending {
            Command loop;
            std::string label;
            CostMode mode;
            std::string continuation;
            int degree;
            TemplateShape tpl;
            std::vector<Norm> norms;
            std::vector<size_t> constraint_indices;
            CostExpr rhs_template;
        };
        std::vector<Pending> pending;
    };
    JointPool* active_pool = nullptr;

    std::string fresh_symbol() { return "q" + std::to_string(symbol_counter++); }

    std::string label_of(const Command& loop) {
        auto it = labels.find(loop.get());
        if (it != labels.end()) return it->second;
        std::string label = "loop" + std::to_string(++label_counter);
        labels.emplace(loop.get(), label);
        return label;
    }

    void register_program(const Command& c) {
        if (c->kind == CommandNode::Kind::While) label_of(c);
        switch (c->kind) {
            case CommandNode::Kind::If:
            case CommandNode::Kind::NdChoice:
            case CommandNode::Kind::PChoice:
            case CommandNode::Kind::Seq:
                register_program(c->a);
                register_program(c->b);
                break;
            case CommandNode::Kind::While: register_program(c->a); break;
            default: break;
        }
    }

    TemplateShape fresh_template(size_t n_norms, int degree, bool include_squares) {
        TemplateShape tpl;
        tpl.terms.push_back({fresh_symbol(), {}});
        for (size_t i = 0; i < n_norms; ++i) {
            tpl.terms.push_back({fresh_symbol(), {i}});
        }
        if (degree >= 2) {
            for (size_t i = 0; i < n_norms; ++i) {
                for (size_t j = include_squares ? i : i + 1; j < n_norms; ++j) {
                    tpl.terms.push_back({fresh_symbol(), {i, j}});
                }
            }
        }
        return tpl;
    }

    std::vector<Norm> basis_for(const Command& loop, const CostExpr& f) {
        std::vector<Norm> norms = select_norms(loop);
        collect_nat_atoms(f, norms);  // continuation atoms join the basis
        return norms;
    }

    // Reduces the constraints to one linear system over the template symbols
    // plus fresh multipliers. Throws UnsupportedCase.
    LinearSystem reduce_all(const std::vector<Constraint>& cons,
                            const std::vector<std::string>& template_syms) {
        LinearSystem sys;
        sys.vars = template_syms;
        sys.objective = template_syms;
        for (const auto& c : cons) {
            for (const auto& pi : eliminate_cases(c)) {
                std::string prefix = "l" + std::to_string(aux_counter++) + "_";
                std::vector<std::string> aux;
                std::vector<SymCon> reduced = farkas_reduce(pi, prefix, &aux);
                sys.vars.insert(sys.vars.end(), aux.begin(), aux.end());
                for (auto& con : reduced) sys.constraints.push_back(std::move(con));
            }
        }
        return sys;
    }

    void verify_or_die(const std::vector<Constraint>& cons, const CoeffAssignment& solution) {
        for (const auto& c : cons) {
            if (auto witness = numeric_refute(c, solution, opts.refute_samples, opts.seed)) {
                throw std::logic_error("solved coefficients fail numeric refutation at store " +
                                       print(*witness) + " for constraint " + print(c.lhs) +
                                       " <= " + print(c.rhs));
            }
        }
    }

    std::optional<CostExpr> try_decompose(CostMode mode, const Command& loop, const CostExpr& f,
                                          int degree, std::string& error) {
        const Command& body = loop->a;
        std::vector<Norm> norms = basis_for(loop, f);
        if (norms.empty()) {
            error = "no norms available from guard, invariant, or continuation";
            return std::nullopt;
        }
        try {
            CostExpr g;
            if (mode == CostMode::Cost) {
                g = et_symbolic(CostMode::Cost, body, cconst(0), *self);
            }
            std::vector<CostExpr> h;
            h.reserve(norms.size());
            for (const auto& n : norms) {
                h.push_back(et_symbolic(CostMode::Value, body, cnat(n.expr), *self));
            }

            TemplateShape tpl = fresh_template(norms.size(), degree, /*include_squares=*/false);
            std::vector<CostExpr> norm_exprs;
            norm_exprs.reserve(norms.size());
            for (const auto& n : norms) norm_exprs.push_back(cnat(n.expr));
            CostExpr rhs = tpl.apply(norm_exprs);

            CostExpr lhs1 = tpl.apply(h);
            if (mode == CostMode::Cost) lhs1 = cadd(g, lhs1);
            Constraint c1{band(loop->inv, loop->guard), simplify(lhs1), rhs};
            Constraint c2{band(loop->inv, bnot(loop->guard)), f, rhs};
            std::vector<Constraint> cons{c1, c2};

            LinearSystem sys = reduce_all(cons, tpl.symbols());
            SolveResult solved = solve_linear(sys);
            if (!solved.feasible) {
                error = "coefficient system infeasible at degree " + std::to_string(degree);
                return std::nullopt;
            }
            CoeffAssignment solution;
            for (const auto& sym : tpl.symbols()) solution[sym] = solved.assignment.at(sym);

            NormShape shape = tpl.to_shape(solution, norms.size());
            ConcavityVerdict cv = concavity_check(shape, opts.concavity_trials, opts.seed);
            if (!cv.pass) {
                error = "decomposition shape failed the concavity check: " + cv.detail;
                return std::nullopt;
            }

            verify_or_die(cons, solution);

            CostExpr bound = simplify(instantiate_coeffs(rhs, solution));
            LoopBoundDerivation d;
            d.label = label_of(loop);
            d.loop_text = print(loop);
            d.mode = mode;
            d.continuation = print(f);
            d.strategy = StrategyKind::Decompose;
            d.degree = degree;
            d.norms = norms;
            d.body_cost = g;
            d.expected_norms = h;
            d.coefficients = tpl.symbols();
            d.solution = solution;
            d.bound = bound;
            for (const auto& c : cons) d.constraints.push_back({c, CertKind::Farkas});
            self->derivations_.push_back(std::move(d));
            return bound;
        } catch (const UnsupportedCase& e) {
            error = std::string("unsupported case: ") + e.what();
            return std::nullopt;
        } catch (const LoopAnalysisError& e) {
            error = std::string("inner loop failed: ") + e.what();
            return std::nullopt;
        }
    }

    // Emits pre-fixpoint constraints for this loop into the active pool and
    // returns the uninstantiated template.
    CostExpr invariant_emit(CostMode mode, const Command& loop, const CostExpr& f, int degree) {
        JointPool& pool = *active_pool;
        std::vector<Norm> norms = basis_for(loop, f);
        if (norms.empty()) {
            throw LoopAnalysisError("no norms available for an invariant template", print(loop));
        }
        TemplateShape tpl = fresh_template(norms.size(), degree, /*include_squares=*/true);
        for (const auto& sym : tpl.symbols()) pool.symbols.push_back(sym);
        std::vector<CostExpr> norm_exprs;
        norm_exprs.reserve(norms.size());
        for (const auto& n : norms) norm_exprs.push_back(cnat(n.expr));
        CostExpr rhs = tpl.apply(norm_exprs);

        CostExpr body_et = et_symbolic(mode, loop->a, rhs, *self);
        JointPool::Pending pending;
        pending.loop = loop;
        pending.label = label_of(loop);
        pending.mode = mode;
        pending.continuation = print(f);
        pending.degree = degree;
        pending.tpl = tpl;
        pending.norms = norms;
        pending.rhs_template = rhs;
        pending.constraint_indices.push_back(pool.constraints.size());
        pool.constraints.push_back({band(loop->inv, loop->guard), simplify(body_et), rhs});
        pending.constraint_indices.push_back(pool.constraints.size());
        pool.constraints.push_back({band(loop->inv, bnot(loop->guard)), f, rhs});
        pool.pending.push_back(std::move(pending));
        return rhs;
    }

    std::optional<CostExpr> try_invariant(CostMode mode, const Command& loop, const CostExpr& f,
                                          int degree, std::string& error) {
        JointPool pool;
        active_pool = &pool;
        CostExpr top_rhs;
        try {
            top_rhs = invariant_emit(mode, loop, f, degree);
        } catch (const std::exception& e) {
            active_pool = nullptr;
            error = e.what();
            return std::nullopt;
        }
        active_pool = nullptr;

        try {
            LinearSystem sys = reduce_all(pool.constraints, pool.symbols);
            SolveResult solved = solve_linear(sys);
            if (!solved.feasible) {
                error = "invariant template system infeasible at degree " + std::to_string(degree);
                return std::nullopt;
            }
            CoeffAssignment full;
            for (const auto& sym : pool.symbols) full[sym] = solved.assignment.at(sym);

            verify_or_die(pool.constraints, full);

            bool joint = pool.pending.size() > 1;
            CostExpr top_bound;
            for (const auto& p : pool.pending) {
                LoopBoundDerivation d;
                d.label = p.label;
                d.loop_text = print(p.loop);
                d.mode = p.mode;
                d.continuation = p.continuation;
                d.strategy = StrategyKind::Invariant;
                d.degree = p.degree;
                d.norms = p.norms;
                d.expected_norms = {};
                d.coefficients = p.tpl.symbols();
                d.joint = joint;
                for (size_t ci : p.constraint_indices) {
                    const Constraint& c = pool.constraints[ci];
                    d.constraints.push_back({c, CertKind::Farkas});
                    for (const auto& sym : coeff_symbols(c.lhs)) d.solution[sym] = full.at(sym);
                    for (const auto& sym : coeff_symbols(c.rhs)) d.solution[sym] = full.at(sym);
                }
                for (const auto& sym : p.tpl.symbols()) d.solution[sym] = full.at(sym);
                d.bound = simplify(instantiate_coeffs(p.rhs_template, full));
                if (equal(p.loop, loop)) top_bound = d.bound;
                self->derivations_.push_back(std::move(d));
            }
            return top_bound;
        } catch (const UnsupportedCase& e) {
            error = std::string("unsupported case: ") + e.what();
            return std::nullopt;
        }
    }

    std::optional<CostExpr> try_unroll(CostMode mode, const Command& loop, const CostExpr& f,
                                       std::string& error) {
        if (!coeff_symbols(f).empty()) {
            error = "unroll cannot certify a template continuation";
            return std::nullopt;
        }
        const Command& body = loop->a;
        BExp enter = band(loop->inv, loop->guard);
        BExp leave = band(loop->inv, bnot(loop->guard));
        CostExpr iterate = cconst(0);
        try {
            for (long k = 0; k < opts.unroll_fuel; ++k) {
                CostExpr body_et = et_symbolic(mode, body, iterate, *self);
                CostExpr next =
                    simplify(cadd(civerson(enter, body_et), civerson(leave, f)));
                if (equal(next, iterate)) break;
                if (cost_size(next) > 4096) {
                    error = "unroll iterates grow without converging";
                    return std::nullopt;
                }
                iterate = next;
            }
            // Certify the iterate as a pre-fixpoint of the loop functional.
            Constraint c1{enter, et_symbolic(mode, body, iterate, *self), iterate};
            Constraint c2{leave, f, iterate};
            for (const Constraint& c : {c1, c2}) {
                for (const auto& pi : eliminate_cases(c)) {
                    if (!certify(pi)) {
                        error = "unroll iterate is not a certified pre-fixpoint";
                        return std::nullopt;
                    }
                }
            }
            verify_or_die({c1, c2}, {});

            LoopBoundDerivation d;
            d.label = label_of(loop);
            d.loop_text = print(loop);
            d.mode = mode;
            d.continuation = print(f);
            d.strategy = StrategyKind::Unroll;
            d.degree = 0;
            d.bound = iterate;
            d.constraints.push_back({c1, CertKind::Farkas});
            d.constraints.push_back({c2, CertKind::Farkas});
            self->derivations_.push_back(std::move(d));
            return iterate;
        } catch (const UnsupportedCase& e) {
            error = std::string("unsupported case: ") + e.what();
            return std::nullopt;
        } catch (const LoopAnalysisError& e) {
            error = std::string("inner loop failed: ") + e.what();
            return std::nullopt;
        }
    }

    CostExpr analyze(CostMode mode, const Command& loop, const CostExpr& f) {
        bool pooled = active_pool != nullptr;
        bool has_coeffs = !coeff_symbols(f).empty();
        if (has_coeffs && !pooled) {
            throw LoopAnalysisError("loop continuation contains free template coefficients",
                                    print(loop));
        }

        std::string memo_key;
        if (!pooled) {
            memo_key = (mode == CostMode::Cost ? "c|" : "v|") +
                       std::to_string(reinterpret_cast<uintptr_t>(loop.get())) + "|" + print(f);
            auto it = memo.find(memo_key);
            if (it != memo.end()) return it->second;
        }

        std::vector<std::string> errors;
        std::string err;
        if (pooled) {
            // Inside an enclosing invariant analysis: modular decomposition
            // first when the continuation is concrete, then join the pool.
            if (!has_coeffs) {
                for (int deg = opts.min_degree; deg <= opts.max_degree; ++deg) {
                    if (auto bound = try_decompose(mode, loop, f, deg, err)) return *bound;
                    errors.push_back("decompose/" + std::to_string(deg) + ": " + err);
                }
            }
            return invariant_emit(mode, loop, f, opts.max_degree >= 2 ? 2 : 1);
        }

        for (StrategyKind strat : opts.order) {
            switch (strat) {
                case StrategyKind::Decompose:
                    for (int deg = opts.min_degree; deg <= opts.max_degree; ++deg) {
                        if (auto bound = try_decompose(mode, loop, f, deg, err)) {
                            memo.emplace(memo_key, *bound);
                            return *bound;
                        }
                        errors.push_back("decompose/" + std::to_string(deg) + ": " + err);
                    }
                    break;
                case StrategyKind::Invariant:
                    for (int deg = opts.min_degree; deg <= opts.max_degree; ++deg) {
                        if (auto bound = try_invariant(mode, loop, f, deg, err)) {
                            memo.emplace(memo_key, *bound);
                            return *bound;
                        }
                        errors.push_back("invariant/" + std::to_string(deg) + ": " + err);
                    }
                    break;
                case StrategyKind::Unroll:
                    if (auto bound = try_unroll(mode, loop, f, err)) {
                        memo.emplace(memo_key, *bound);
                        return *bound;
                    }
                    errors.push_back("unroll: " + err);
                    break;
            }
        }
        std::string joined;
        for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
        throw LoopAnalysisError(joined.empty() ? "no strategy applicable" : joined, print(loop));
    }
};

Analyzer::Analyzer(AnalysisOptions opts) : opts_(std::move(opts)), impl_(new Impl) {
    impl_->self = this;
    impl_->opts = opts_;
}

Analyzer::~Analyzer() = default;

void Analyzer::register_program(const Command& root) { impl_->register_program(root); }

std::string Analyzer::label_of(const Command& loop) { return impl_->label_of(loop); }

CostExpr Analyzer::analyze_while(CostMode mode, const Command& loop, const CostExpr& f) {
    return impl_->analyze(mode, loop, f);
}

// ---------------------------------------------------------------------------
// Replay, invariant checking, entry points
// ---------------------------------------------------------------------------

bool replay_derivation(LoopBoundDerivation& d, long samples, std::uint64_t seed) {
    bool ok = true;
    for (auto& record : d.constraints) {
        Constraint inst{record.constraint.premise,
                        simplify(instantiate_coeffs(record.constraint.lhs, d.solution)),
                        simplify(instantiate_coeffs(record.constraint.rhs, d.solution))};
        CertKind cert = CertKind::None;
        try {
            bool all = true;
            for (const auto& pi : eliminate_cases(inst)) {
                if (!certify(pi)) {
                    all = false;
                    break;
                }
            }
            if (all) cert = CertKind::Farkas;
        } catch (const UnsupportedCase&) {
        }
        if (cert == CertKind::None) {
            if (numeric_refute(record.constraint, d.solution, samples, seed)) {
                ok = false;
            } else {
                cert = CertKind::Numeric;
            }
        }
        record.certificate = cert;
    }
    return ok;
}

InvariantVerdict check_upper_invariant(CostMode mode, const Command& loop, const CostExpr& f,
                                       const CostExpr& invariant, const AnalysisOptions& opts) {
    if (loop->kind != CommandNode::Kind::While) {
        throw std::invalid_argument("check_upper_invariant expects a while command");
    }
    if (!coeff_symbols(invariant).empty()) {
        throw std::invalid_argument("upper invariant must be coefficient-free");
    }

    Analyzer analyzer(opts);
    analyzer.register_program(loop);
    CostExpr body_et;
    try {
        body_et = et_symbolic(mode, loop->a, invariant, analyzer);
    } catch (const LoopAnalysisError& e) {
        return {InvariantVerdict::Kind::Unknown, std::nullopt,
                std::string("inner loop analysis failed: ") + e.what()};
    }

    Constraint c1{band(loop->inv, loop->guard), simplify(body_et), invariant};
    Constraint c2{band(loop->inv, bnot(loop->guard)), f, invariant};

    bool unsupported = false;
    bool certified = true;
    try {
        for (const Constraint& c : {c1, c2}) {
            for (const auto& pi : eliminate_cases(c)) {
                if (!certify(pi)) {
                    certified = false;
                    break;
                }
            }
            if (!certified) break;
        }
    } catch (const UnsupportedCase&) {
        unsupported = true;
        certified = false;
    }
    if (certified) {
        return {InvariantVerdict::Kind::Certified, std::nullopt, "pre-fixpoint certified"};
    }

    // Refutation is exact only when the body is loop-free (the transformer is
    // then exact rather than an upper bound).
    if (loop_free(loop->a)) {
        for (const Constraint& c : {c1, c2}) {
            if (auto witness = numeric_refute(c, {}, opts.refute_samples, opts.seed, 100)) {
                return {InvariantVerdict::Kind::Refuted, witness,
                        "premise inequality fails at " + print(*witness)};
            }
        }
    }
    return {InvariantVerdict::Kind::Unknown, std::nullopt,
            unsupported ? "constraint outside the supported fragment"
                        : "no certificate found and no witness sampled"};
}

CostExpr et_symbolic_analyzed(CostMode mode, const Command& c, const CostExpr& f,
                              const AnalysisOptions& opts,
                              std::vector<LoopBoundDerivation>* derivations) {
    Analyzer analyzer(opts);
    analyzer.register_program(c);
    CostExpr result = et_symbolic(mode, c, f, analyzer);
    if (derivations != nullptr) *derivations = analyzer.derivations();
    return result;
}

CostExpr et_symbolic(CostMode mode, const Command& c, const CostExpr& f,
                     const LoopStrategy& strategy) {
    AnalysisOptions opts;
    opts.order = {strategy.kind};
    opts.unroll_fuel = strategy.fuel;
    return et_symbolic_analyzed(mode, c, f, opts, nullptr);
}

LoopAnalysisResult analyze_loop(CostMode mode, const Command& loop, const CostExpr& f,
                                StrategyKind strategy, int degree, const AnalysisOptions& opts) {
    if (loop->kind != CommandNode::Kind::While) {
        throw std::invalid_argument("analyze_loop expects a while command");
    }
    AnalysisOptions local = opts;
    local.order = {strategy};
    local.min_degree = degree;
    local.max_degree = degree;
    Analyzer analyzer(local);
    analyzer.register_program(loop);
    CostExpr bound = analyzer.analyze_while(mode, loop, f);
    // The loop's own record is the most recent one (inner loops are earlier).
    LoopAnalysisResult result;
    result.bound = bound;
    for (auto it = analyzer.derivations().rbegin(); it != analyzer.derivations().rend(); ++it) {
        if (it->loop_text == print(loop) && it->mode == mode) {
            result.derivation = *it;
            break;
        }
    }
    return result;
}

}  // namespace pwhile
