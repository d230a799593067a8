// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "pwhile/analysis.hpp"

namespace pwhile {

struct RunConfig {
    AnalysisOptions analysis;
    long horizon = 200;
    std::vector<long> grid_values = {0, 1, 2, 3, 5, 10};
    std::map<std::string, std::vector<long>> extra_points;  // per-variable additions
    bool json = false;
    size_t oracle_budget = 200000;
    size_t max_grid_rows = 2000;
    long montecarlo_samples = 10000;
};

struct CrossCheckRow {
    Store store;
    bool oracle_ran = false;
    Rat oracle_lower;
    Rat live_mass;
    Rat bound_value;
    bool ok = true;
};

struct AnalysisReport {
    enum class Status { Certified, CertifiedUnknownLoops, Failed };
    std::string program_path;
    std::string program_text;
    Status status = Status::Failed;
    std::string error;
    bool have_bound = false;
    CostExpr bound;
    std::vector<LoopBoundDerivation> loops;
    std::vector<CrossCheckRow> rows;
};

AnalysisReport run_analysis(const std::string& path, const Command& prog, const RunConfig& cfg);
std::string render_text(const AnalysisReport& r);
std::string render_json(const AnalysisReport& r, const RunConfig& cfg);
// 0 when a bound was produced and fully cross-checked, 2 otherwise.
int report_exit_code(const AnalysisReport& r);

struct SimulationReport {
    Store store;
    long samples = 0;
    Rat total_cost;
    Rat mean_cost;
    long aborted = 0;
    long timed_out = 0;
    bool oracle_ran = false;
    Rat oracle_lower;
    Rat live_mass;
};

SimulationReport run_simulation(const Command& prog, const Store& s, long samples,
                                std::uint64_t seed, long horizon, size_t oracle_budget);
std::string render_text(const SimulationReport& r);
std::string render_json(const SimulationReport& r);

struct CheckReport {
    struct Row {
        std::string label;
        std::string invariant_text;
        InvariantVerdict verdict;
    };
    std::vector<Row> rows;
    bool all_certified = true;
    std::string error;  // unknown labels, loops without invariants
};

// Maps loop labels (loop1, loop2, ... in program order) to invariant texts.
// Invariants are checked as cost-mode upper invariants with continuation 0.
CheckReport run_check(const Command& prog, const std::map<std::string, std::string>& invariants,
                      const AnalysisOptions& opts);
std::string render_text(const CheckReport& r);
std::string render_json(const CheckReport& r);

// Parses "label: cost-expression" lines; '#' starts a comment.
std::map<std::string, std::string> parse_invariant_file(const std::string& text);

// Collects the program's while loops in label order.
std::vector<std::pair<std::string, Command>> labeled_loops(const Command& prog);

}  // namespace pwhile
