// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the analyzer exclusively through the C API
// in pwhile/pwhile_c.h.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "pwhile/pwhile_c.h"

namespace {

int read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
        return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return 0;
}

struct Program {
    pw_program* handle = nullptr;
    ~Program() { pw_program_free(handle); }
};

int parse_or_fail(const std::string& path, Program& prog) {
    std::string source;
    if (read_file(path, source) != 0) return PW_ERR_PARSE;
    char* error = nullptr;
    pw_status st = pw_program_parse(source.c_str(), &prog.handle, &error);
    if (st != PW_OK) {
        std::fprintf(stderr, "parse error: %s\n", error ? error : "unknown");
        pw_string_free(error);
        return st;
    }
    return PW_OK;
}

int emit(pw_status st, char* report, char* error) {
    if (report != nullptr) {
        std::fputs(report, stdout);
        pw_string_free(report);
    }
    if (error != nullptr) {
        std::fprintf(stderr, "error: %s\n", error);
        pw_string_free(error);
    }
    return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pwhile: expected-runtime analyzer for probabilistic while programs"};
    app.require_subcommand(1);

    std::string file;
    int degree = 2;
    std::string strategy;
    long horizon = 200;
    long fuel = 8;
    std::uint64_t seed = 0;
    bool as_json = false;

    CLI::App* analyze = app.add_subcommand("analyze", "infer a certified expected-cost bound");
    analyze->add_option("file", file, "program file (.pw)")->required();
    analyze->add_option("--degree", degree, "template degree cap (1 or 2)");
    analyze->add_option("--strategy", strategy, "restrict to one strategy")
        ->check(CLI::IsMember({"decompose", "invariant", "unroll"}));
    analyze->add_option("--horizon", horizon, "oracle horizon for cross-checks");
    analyze->add_option("--fuel", fuel, "unroll fuel");
    analyze->add_option("--seed", seed, "sampling seed");
    analyze->add_flag("--json", as_json, "emit a JSON report");

    std::vector<std::string> bindings;
    long samples = 10000;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate plus exact oracle");
    simulate->add_option("file", file, "program file (.pw)")->required();
    simulate->add_option("--set", bindings, "initial store entry var=int (repeatable)");
    simulate->add_option("--samples", samples, "number of trajectories");
    simulate->add_option("--seed", seed, "base seed");
    simulate->add_option("--horizon", horizon, "max steps per trajectory");
    simulate->add_flag("--json", as_json, "emit a JSON report");

    std::string invariants_path;
    CLI::App* check = app.add_subcommand("check", "verify user-supplied upper invariants");
    check->add_option("file", file, "program file (.pw)")->required();
    check->add_option("--invariants", invariants_path, "file of 'loopN: cost-expr' lines")
        ->required();
    check->add_flag("--json", as_json, "emit a JSON report");

    CLI11_PARSE(app, argc, argv);

    Program prog;
    int st = parse_or_fail(file, prog);
    if (st != PW_OK) return st;

    nlohmann::json cfg;
    cfg["path"] = file;
    cfg["json"] = as_json;
    cfg["seed"] = seed;
    cfg["horizon"] = horizon;

    if (analyze->parsed()) {
        cfg["degree"] = degree;
        cfg["fuel"] = fuel;
        if (!strategy.empty()) cfg["strategies"] = {strategy};
        char* report = nullptr;
        char* error = nullptr;
        pw_status rc = pw_analyze(prog.handle, cfg.dump().c_str(), &report, &error);
        return emit(rc, report, error);
    }

    if (simulate->parsed()) {
        nlohmann::json store = nlohmann::json::object();
        for (const auto& b : bindings) {
            auto eq = b.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "error: --set expects var=int, got '%s'\n", b.c_str());
                return PW_ERR_INVALID;
            }
            try {
                store[b.substr(0, eq)] = std::stol(b.substr(eq + 1));
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: bad integer in '%s'\n", b.c_str());
                return PW_ERR_INVALID;
            }
        }
        cfg["store"] = store;
        cfg["samples"] = samples;
        char* report = nullptr;
        char* error = nullptr;
        pw_status rc = pw_simulate(prog.handle, cfg.dump().c_str(), &report, &error);
        return emit(rc, report, error);
    }

    // check
    std::string invariants;
    if (read_file(invariants_path, invariants) != 0) return PW_ERR_INVALID;
    char* report = nullptr;
    char* error = nullptr;
    pw_status rc = pw_check(prog.handle, invariants.c_str(), cfg.dump().c_str(), &report, &error);
    return emit(rc, report, error);
}
