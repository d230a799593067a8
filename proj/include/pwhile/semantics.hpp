// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "pwhile/ast.hpp"

namespace pwhile {

// A configuration is a pending command with a store, a normal halt with the
// final store, or the abnormal halt.
struct Configuration {
    enum class Kind { Running, Halted, Aborted };
    Kind kind;
    Command cmd;  // Running only
    Store store;  // Running/Halted

    static Configuration running(Command c, Store s) {
        return {Kind::Running, std::move(c), std::move(s)};
    }
    static Configuration halted(Store s) { return {Kind::Halted, nullptr, std::move(s)}; }
    static Configuration aborted() { return {Kind::Aborted, nullptr, {}}; }

    bool is_running() const { return kind == Kind::Running; }
};

// Finite multiset of weighted configurations; entries keep multiset identity
// (no merging), probabilities lie in (0,1] and sum to at most 1.
struct MultiDistribution {
    struct Entry {
        Rat prob;
        Configuration config;
    };
    std::vector<Entry> entries;

    Rat total_mass() const {
        Rat m(0);
        for (const auto& e : entries) m += e.prob;
        return m;
    }
};

// One applicable reduction: target multidistribution plus the consumed cost.
// Only tick steps carry nonzero weight.
struct WeightedRule {
    Rat weight;
    MultiDistribution target;
};

// Resolution policy for nondeterministic choice. Demonic is symbolic
// (maximize, used by the oracles); the others are concrete.
struct Scheduler {
    enum class Kind { Demonic, Left, Right, Custom };
    Kind kind = Kind::Demonic;
    // Custom: returns the rule index to take for a running configuration.
    std::function<size_t(const Configuration&, size_t /*n_rules*/)> choose;

    static Scheduler demonic() { return {Kind::Demonic, nullptr}; }
    static Scheduler left() { return {Kind::Left, nullptr}; }
    static Scheduler right() { return {Kind::Right, nullptr}; }
    bool concrete() const { return kind != Kind::Demonic; }
};

// All rules applicable to a configuration, in fixed order (nondeterministic
// choice yields the left rule then the right one). Halted and aborted
// configurations have none.
std::vector<WeightedRule> step(const Configuration& gamma);

// Countable convex union: probabilities are scaled, entries concatenated.
MultiDistribution convex_union(const std::vector<std::pair<Rat, MultiDistribution>>& parts);

// Advances every running entry by its scheduler-selected rule; halted and
// aborted entries pass through. Returns the expected weight of the step.
std::pair<Rat, MultiDistribution> step_multi(const MultiDistribution& mu, const Scheduler& sched);

// Exhaustive finite-horizon exploration, maximizing over nondeterministic
// choice. `lower` is a certified lower bound (exact once live_mass is 0);
// `live_mass` is the worst-case probability still running at the horizon.
struct OracleResult {
    Rat lower;
    Rat live_mass;
    size_t states = 0;
};

struct OracleBudgetExceeded : std::runtime_error {
    OracleBudgetExceeded() : std::runtime_error("oracle state budget exceeded") {}
};

inline constexpr size_t kDefaultOracleBudget = 1u << 20;

OracleResult expected_cost_oracle(const Command& c, const Store& s, long horizon,
                                  size_t state_budget = kDefaultOracleBudget);

// Expectation of coefficient-free `f` over normally-halted mass; aborted
// entries contribute nothing.
OracleResult expected_value_oracle(const Command& c, const Store& s, const CostExpr& f,
                                   long horizon, size_t state_budget = kDefaultOracleBudget);

// Cost accumulated plus `f` at halted stores: the semantic counterpart of the
// cost transformer applied to a continuation.
OracleResult expected_cost_oracle_with_continuation(const Command& c, const Store& s,
                                                    const CostExpr& f, long horizon,
                                                    size_t state_budget = kDefaultOracleBudget);

// One pseudo-random trajectory; deterministic given the seed. Nondeterministic
// choices are resolved by `sched` (Custom with a seeded uniform pick works for
// Monte Carlo). Optional trace receives "step weight entries..." lines.
struct RunOutcome {
    enum class Kind { Halted, Aborted, Timeout };
    Kind kind;
    Store final_store;  // Halted only
    Rat cost;
};

RunOutcome sample_run(const Command& c, const Store& s, std::uint64_t seed, const Scheduler& sched,
                      long max_steps, std::ostream* trace = nullptr);

// Uniformly random resolution of nondeterministic choice, driven by the
// trajectory's own generator.
Scheduler uniform_scheduler();

}  // namespace pwhile
