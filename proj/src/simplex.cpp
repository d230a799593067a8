// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Exact two-phase simplex over rationals, Bland's rule. Small dense tableaus
// only; the constraint systems produced by the analysis have tens of
// variables.
#include "pwhile/simplex.hpp"

#include <stdexcept>

namespace pwhile {

namespace {

// Tableau rows: one per constraint, columns: structural vars then artificials,
// last column rhs. Objective handled as a separate reduced-cost row.
struct Tableau {
    size_t rows, cols;  // cols excludes rhs
    std::vector<std::vector<Rat>> a;  // rows x (cols+1)
    std::vector<size_t> basis;        // basic column per row
    std::vector<Rat> obj;             // size cols+1 (reduced costs, rhs = -value)

    void pivot(size_t r, size_t c) {
        Rat inv = Rat(1) / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat factor = a[i][c];
            for (size_t j = 0; j <= cols; ++j) a[i][j] -= factor * a[r][j];
        }
        if (obj[c] != 0) {
            Rat factor = obj[c];
            for (size_t j = 0; j <= cols; ++j) obj[j] -= factor * a[r][j];
        }
        basis[r] = c;
    }

    // Bland's rule: entering = first column with negative reduced cost;
    // leaving = smallest ratio, ties by smallest basis column.
    SimplexStatus iterate(size_t col_limit) {
        for (;;) {
            size_t enter = cols;
            for (size_t j = 0; j < col_limit; ++j) {
                if (obj[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return SimplexStatus::Optimal;
            size_t leave = rows;
            Rat best;
            for (size_t i = 0; i < rows; ++i) {
                if (a[i][enter] <= 0) continue;
                Rat ratio = a[i][cols] / a[i][enter];
                if (leave == rows || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows) return SimplexStatus::Unbounded;
            pivot(leave, enter);
        }
    }
};

}  // namespace

SimplexOutcome simplex_solve(const std::vector<std::vector<Rat>>& a_in, const std::vector<Rat>& b_in,
                             const std::vector<Rat>& c_in) {
    size_t m = a_in.size();
    size_t n = c_in.size();
    Tableau t;
    t.rows = m;
    t.cols = n + m;  // structural + one artificial per row
    t.a.assign(m, std::vector<Rat>(t.cols + 1, Rat(0)));
    t.basis.resize(m);
    for (size_t i = 0; i < m; ++i) {
        bool flip = b_in[i] < 0;
        for (size_t j = 0; j < n; ++j) t.a[i][j] = flip ? Rat(-a_in[i][j]) : a_in[i][j];
        t.a[i][t.cols] = flip ? Rat(-b_in[i]) : b_in[i];
        t.a[i][n + i] = Rat(1);
        t.basis[i] = n + i;
    }

    // Phase 1: minimize the sum of artificials.
    t.obj.assign(t.cols + 1, Rat(0));
    for (size_t j = n; j < t.cols; ++j) t.obj[j] = Rat(1);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j <= t.cols; ++j) t.obj[j] -= t.a[i][j];
    }
    SimplexStatus st = t.iterate(t.cols);
    if (st == SimplexStatus::Unbounded) {
        throw std::logic_error("phase-1 objective cannot be unbounded");
    }
    // Optimal phase-1 value is -obj[rhs].
    if (-t.obj[t.cols] != 0) return {SimplexStatus::Infeasible, {}, Rat(0)};

    // Drive remaining artificials out of the basis.
    for (size_t i = 0; i < m; ++i) {
        if (t.basis[i] < n) continue;
        size_t found = n;
        for (size_t j = 0; j < n; ++j) {
            if (t.a[i][j] != 0) {
                found = j;
                break;
            }
        }
        if (found < n) {
            t.pivot(i, found);
        }
        // Otherwise the row is redundant; the artificial stays basic at 0,
        // which is harmless for phase 2 as its column is never re-entered.
    }

    // Phase 2: the real objective, artificial columns frozen.
    t.obj.assign(t.cols + 1, Rat(0));
    for (size_t j = 0; j < n; ++j) t.obj[j] = c_in[j];
    for (size_t i = 0; i < m; ++i) {
        if (t.basis[i] < n && t.obj[t.basis[i]] != 0) {
            Rat factor = t.obj[t.basis[i]];
            for (size_t j = 0; j <= t.cols; ++j) t.obj[j] -= factor * t.a[i][j];
        }
    }
    st = t.iterate(n);
    if (st == SimplexStatus::Unbounded) return {SimplexStatus::Unbounded, {}, Rat(0)};

    std::vector<Rat> x(n, Rat(0));
    for (size_t i = 0; i < m; ++i) {
        if (t.basis[i] < n) x[t.basis[i]] = t.a[i][t.cols];
    }
    return {SimplexStatus::Optimal, std::move(x), Rat(-t.obj[t.cols])};
}

}  // namespace pwhile
