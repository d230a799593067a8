// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "pwhile/rational.hpp"

namespace pwhile {

enum class SimplexStatus { Optimal, Infeasible, Unbounded };

struct SimplexOutcome {
    SimplexStatus status;
    std::vector<Rat> solution;  // valid when Optimal
    Rat objective;              // valid when Optimal
};

// min c.x subject to A x = b, x >= 0, exact rationals.
SimplexOutcome simplex_solve(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                             const std::vector<Rat>& c);

}  // namespace pwhile
