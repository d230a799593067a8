// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/semantics.hpp"

#include <deque>
#include <random>
#include <unordered_map>

#include "pwhile/eval.hpp"
#include "pwhile/printer.hpp"

namespace pwhile {

namespace {

MultiDistribution dirac_md(Configuration c) {
    MultiDistribution md;
    md.entries.push_back({Rat(1), std::move(c)});
    return md;
}

// step_D of the composition rule: running configurations are re-sequenced,
// normal halts continue with D, abnormal halts stay abnormal.
Configuration seq_step(const Configuration& gamma, const Command& d) {
    switch (gamma.kind) {
        case Configuration::Kind::Running:
            return Configuration::running(cseq(gamma.cmd, d), gamma.store);
        case Configuration::Kind::Halted: return Configuration::running(d, gamma.store);
        case Configuration::Kind::Aborted: return Configuration::aborted();
    }
    throw std::logic_error("unreachable configuration kind");
}

}  // namespace

std::vector<WeightedRule> step(const Configuration& gamma) {
    if (!gamma.is_running()) return {};
    const Command& c = gamma.cmd;
    const Store& s = gamma.store;
    switch (c->kind) {
        case CommandNode::Kind::Skip:
            return {{Rat(0), dirac_md(Configuration::halted(s))}};
        case CommandNode::Kind::Abort:
            return {{Rat(0), dirac_md(Configuration::aborted())}};
        case CommandNode::Kind::Tick:
            return {{c->rate, dirac_md(Configuration::halted(s))}};
        case CommandNode::Kind::Assign: {
            MultiDistribution md;
            for (const auto& [value, prob] : eval_dist(c->dist, s)) {
                md.entries.push_back({prob, Configuration::halted(s.with(c->var, value))});
            }
            return {{Rat(0), std::move(md)}};
        }
        case CommandNode::Kind::If: {
            if (!eval_bexp(c->inv, s)) {
                return {{Rat(0), dirac_md(Configuration::aborted())}};
            }
            Command next = eval_bexp(c->guard, s) ? c->a : c->b;
            return {{Rat(0), dirac_md(Configuration::running(next, s))}};
        }
        case CommandNode::Kind::While: {
            if (!eval_bexp(c->inv, s)) {
                return {{Rat(0), dirac_md(Configuration::aborted())}};
            }
            if (eval_bexp(c->guard, s)) {
                return {{Rat(0), dirac_md(Configuration::running(cseq(c->a, c), s))}};
            }
            return {{Rat(0), dirac_md(Configuration::halted(s))}};
        }
        case CommandNode::Kind::NdChoice:
            return {{Rat(0), dirac_md(Configuration::running(c->a, s))},
                    {Rat(0), dirac_md(Configuration::running(c->b, s))}};
        case CommandNode::Kind::PChoice: {
            MultiDistribution md;
            if (c->prob > 0) md.entries.push_back({c->prob, Configuration::running(c->a, s)});
            if (c->prob < 1) {
                md.entries.push_back({Rat(1) - c->prob, Configuration::running(c->b, s)});
            }
            return {{Rat(0), std::move(md)}};
        }
        case CommandNode::Kind::Seq: {
            std::vector<WeightedRule> rules = step(Configuration::running(c->a, s));
            for (auto& rule : rules) {
                for (auto& entry : rule.target.entries) {
                    entry.config = seq_step(entry.config, c->b);
                }
            }
            return rules;
        }
    }
    throw std::logic_error("unreachable command kind");
}

MultiDistribution convex_union(const std::vector<std::pair<Rat, MultiDistribution>>& parts) {
    MultiDistribution out;
    for (const auto& [p, md] : parts) {
        for (const auto& e : md.entries) {
            Rat scaled = p * e.prob;
            if (scaled > 0) out.entries.push_back({scaled, e.config});
        }
    }
    return out;
}

std::pair<Rat, MultiDistribution> step_multi(const MultiDistribution& mu, const Scheduler& sched) {
    if (!sched.concrete()) {
        throw std::invalid_argument("step_multi requires a concrete scheduler");
    }
    Rat weight(0);
    std::vector<std::pair<Rat, MultiDistribution>> parts;
    for (const auto& e : mu.entries) {
        std::vector<WeightedRule> rules = step(e.config);
        if (rules.empty()) {
            parts.push_back({e.prob, dirac_md(e.config)});
            continue;
        }
        size_t pick = 0;
        if (rules.size() > 1) {
            switch (sched.kind) {
                case Scheduler::Kind::Left: pick = 0; break;
                case Scheduler::Kind::Right: pick = rules.size() - 1; break;
                case Scheduler::Kind::Custom: pick = sched.choose(e.config, rules.size()); break;
                case Scheduler::Kind::Demonic: break;  // unreachable
            }
        }
        weight += e.prob * rules[pick].weight;
        parts.push_back({e.prob, rules[pick].target});
    }
    return {weight, convex_union(parts)};
}

namespace {

// Reachable-graph value iteration. Configurations are deduplicated by their
// printed form; the demonic supremum is a per-level Bellman maximum.
struct Explorer {
    struct Node {
        Configuration config;
        std::vector<WeightedRule> rules;           // empty for terminal nodes
        std::vector<std::vector<std::pair<Rat, size_t>>> succ;  // per rule
        Rat terminal_value;                         // halted: f(store); aborted: 0
    };

    std::unordered_map<std::string, size_t> index;
    std::vector<Node> nodes;
    size_t budget;
    const CostExpr* continuation;

    static std::string key_of(const Configuration& c) {
        switch (c.kind) {
            case Configuration::Kind::Running: return "R" + print(c.cmd) + "|" + print(c.store);
            case Configuration::Kind::Halted: return "H" + print(c.store);
            case Configuration::Kind::Aborted: return "A";
        }
        return "?";
    }

    size_t intern(const Configuration& c) {
        std::string key = key_of(c);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (nodes.size() >= budget) throw OracleBudgetExceeded();
        size_t id = nodes.size();
        index.emplace(std::move(key), id);
        Node n;
        n.config = c;
        n.terminal_value = Rat(0);
        if (c.kind == Configuration::Kind::Halted && continuation != nullptr) {
            n.terminal_value = eval_cost(*continuation, c.store);
        }
        nodes.push_back(std::move(n));
        return id;
    }
};

}  // namespace

static OracleResult run_oracle(bool accumulate_cost, const Command& c, const Store& s,
                               const CostExpr* f, long horizon, size_t state_budget) {
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");

    Explorer ex;
    ex.budget = state_budget;
    ex.continuation = f;

    size_t root = ex.intern(Configuration::running(c, s));
    std::deque<size_t> frontier{root};
    // Breadth-first expansion, at most `horizon` levels deep.
    for (long level = 0; level < horizon && !frontier.empty(); ++level) {
        std::deque<size_t> next;
        for (size_t id : frontier) {
            if (!ex.nodes[id].config.is_running() || !ex.nodes[id].succ.empty()) continue;
            std::vector<WeightedRule> rules = step(ex.nodes[id].config);
            std::vector<std::vector<std::pair<Rat, size_t>>> succ;
            succ.reserve(rules.size());
            for (const auto& rule : rules) {
                std::vector<std::pair<Rat, size_t>> targets;
                targets.reserve(rule.target.entries.size());
                for (const auto& e : rule.target.entries) {
                    size_t tid = ex.intern(e.config);
                    targets.push_back({e.prob, tid});
                    if (ex.nodes[tid].config.is_running() && ex.nodes[tid].succ.empty()) {
                        next.push_back(tid);
                    }
                }
                succ.push_back(std::move(targets));
            }
            ex.nodes[id].rules = std::move(rules);
            ex.nodes[id].succ = std::move(succ);
        }
        frontier = std::move(next);
    }

    size_t n = ex.nodes.size();
    std::vector<Rat> value(n), live(n), value_next(n), live_next(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& node = ex.nodes[i];
        value[i] = node.config.is_running() ? Rat(0) : node.terminal_value;
        live[i] = node.config.is_running() ? Rat(1) : Rat(0);
    }

    for (long k = 0; k < horizon; ++k) {
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            const auto& node = ex.nodes[i];
            if (!node.config.is_running()) {
                value_next[i] = value[i];
                live_next[i] = Rat(0);
                continue;
            }
            if (node.succ.empty()) {
                // Unexpanded frontier node: still counted as live.
                value_next[i] = value[i];
                live_next[i] = Rat(1);
                continue;
            }
            Rat best_value;
            Rat best_live;
            bool first = true;
            for (size_t r = 0; r < node.succ.size(); ++r) {
                Rat v = accumulate_cost ? node.rules[r].weight : Rat(0);
                Rat l(0);
                for (const auto& [p, tid] : node.succ[r]) {
                    v += p * value[tid];
                    l += p * live[tid];
                }
                if (first || v > best_value) best_value = v;
                if (first || l > best_live) best_live = l;
                first = false;
            }
            value_next[i] = std::move(best_value);
            live_next[i] = std::move(best_live);
        }
        for (size_t i = 0; i < n; ++i) {
            if (value_next[i] != value[i] || live_next[i] != live[i]) {
                changed = true;
                break;
            }
        }
        value.swap(value_next);
        live.swap(live_next);
        if (!changed) break;  // fixpoint: all schedulers already terminated
    }

    return {value[root], live[root], n};
}

OracleResult expected_cost_oracle(const Command& c, const Store& s, long horizon,
                                  size_t state_budget) {
    return run_oracle(true, c, s, nullptr, horizon, state_budget);
}

OracleResult expected_value_oracle(const Command& c, const Store& s, const CostExpr& f,
                                   long horizon, size_t state_budget) {
    if (!coeff_symbols(f).empty()) {
        throw std::invalid_argument("expected_value_oracle requires a coefficient-free expression");
    }
    return run_oracle(false, c, s, &f, horizon, state_budget);
}

OracleResult expected_cost_oracle_with_continuation(const Command& c, const Store& s,
                                                    const CostExpr& f, long horizon,
                                                    size_t state_budget) {
    if (!coeff_symbols(f).empty()) {
        throw std::invalid_argument("oracle continuation must be coefficient-free");
    }
    return run_oracle(true, c, s, &f, horizon, state_budget);
}

Scheduler uniform_scheduler() {
    Scheduler s;
    s.kind = Scheduler::Kind::Custom;
    s.choose = nullptr;  // sample_run substitutes its own generator
    return s;
}

RunOutcome sample_run(const Command& c, const Store& s, std::uint64_t seed, const Scheduler& sched,
                      long max_steps, std::ostream* trace) {
    if (!sched.concrete()) {
        throw std::invalid_argument("sample_run requires a concrete scheduler");
    }
    std::mt19937_64 rng(seed);
    auto draw = [&rng]() {
        // Exact comparison point in [0,1) with denominator 2^64.
        Rat r(rat_of(Int(rng()), Int(1) << 64));
        return r;
    };

    Configuration gamma = Configuration::running(c, s);
    Rat cost(0);
    for (long i = 0; i < max_steps; ++i) {
        std::vector<WeightedRule> rules = step(gamma);
        if (rules.empty()) break;
        size_t pick = 0;
        if (rules.size() > 1) {
            switch (sched.kind) {
                case Scheduler::Kind::Left: pick = 0; break;
                case Scheduler::Kind::Right: pick = rules.size() - 1; break;
                case Scheduler::Kind::Custom:
                    if (sched.choose) {
                        pick = sched.choose(gamma, rules.size());
                    } else {
                        pick = static_cast<size_t>(rng() % rules.size());
                    }
                    break;
                case Scheduler::Kind::Demonic: break;  // unreachable
            }
        }
        const WeightedRule& rule = rules[pick];
        cost += rule.weight;
        // Sample a target; residual mass (sub-distributions) cannot arise from
        // step(), whose targets always carry mass exactly 1.
        Rat r = draw();
        Rat cum(0);
        const auto& entries = rule.target.entries;
        size_t chosen = entries.size() - 1;
        for (size_t j = 0; j < entries.size(); ++j) {
            cum += entries[j].prob;
            if (r < cum) {
                chosen = j;
                break;
            }
        }
        if (trace != nullptr) {
            *trace << i << " " << rat_str(rule.weight) << " ";
            for (size_t j = 0; j < entries.size(); ++j) {
                *trace << (j == 0 ? "" : " | ") << rat_str(entries[j].prob) << ":"
                       << Explorer::key_of(entries[j].config);
            }
            *trace << "\n";
        }
        gamma = entries[chosen].config;
    }
    switch (gamma.kind) {
        case Configuration::Kind::Halted: return {RunOutcome::Kind::Halted, gamma.store, cost};
        case Configuration::Kind::Aborted: return {RunOutcome::Kind::Aborted, {}, cost};
        case Configuration::Kind::Running: return {RunOutcome::Kind::Timeout, {}, cost};
    }
    throw std::logic_error("unreachable configuration kind");
}

}  // namespace pwhile
