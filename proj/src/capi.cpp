// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/pwhile_c.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <string>

#include "pwhile/parser.hpp"
#include "pwhile/printer.hpp"
#include "pwhile/report.hpp"

using nlohmann::json;

struct pw_program_s {
    pwhile::Command command;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** out_error, const std::string& msg) {
    if (out_error != nullptr) *out_error = dup_string(msg);
}

json parse_config(const char* config_json) {
    if (config_json == nullptr || config_json[0] == '\0') return json::object();
    json j = json::parse(config_json);  // throws json::exception
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    return j;
}

pwhile::RunConfig run_config_of(const json& j) {
    pwhile::RunConfig cfg;
    if (j.contains("degree")) cfg.analysis.max_degree = j.at("degree").get<int>();
    if (j.contains("fuel")) cfg.analysis.unroll_fuel = j.at("fuel").get<long>();
    if (j.contains("seed")) cfg.analysis.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<long>();
    if (j.contains("json")) cfg.json = j.at("json").get<bool>();
    if (j.contains("strategies")) {
        cfg.analysis.order.clear();
        for (const auto& s : j.at("strategies")) {
            std::string name = s.get<std::string>();
            if (name == "decompose") {
                cfg.analysis.order.push_back(pwhile::StrategyKind::Decompose);
            } else if (name == "invariant") {
                cfg.analysis.order.push_back(pwhile::StrategyKind::Invariant);
            } else if (name == "unroll") {
                cfg.analysis.order.push_back(pwhile::StrategyKind::Unroll);
            } else {
                throw std::invalid_argument("unknown strategy: " + name);
            }
        }
    }
    if (j.contains("grid")) {
        for (const auto& [var, vals] : j.at("grid").items()) {
            std::vector<long> points;
            for (const auto& v : vals) points.push_back(v.get<long>());
            cfg.extra_points[var] = std::move(points);
        }
    }
    return cfg;
}

}  // namespace

extern "C" {

const char* pw_version(void) { return "0.1.0"; }

pw_status pw_program_parse(const char* source, pw_program** out_prog, char** out_error) {
    if (source == nullptr || out_prog == nullptr) {
        set_error(out_error, "null argument");
        return PW_ERR_INVALID;
    }
    try {
        pwhile::Command c = pwhile::parse_program(source);
        *out_prog = new pw_program_s{std::move(c)};
        return PW_OK;
    } catch (const pwhile::ParseError& e) {
        set_error(out_error, e.what());
        return PW_ERR_PARSE;
    } catch (const std::exception& e) {
        set_error(out_error, e.what());
        return PW_ERR_INTERNAL;
    }
}

void pw_program_free(pw_program* prog) { delete prog; }

char* pw_program_print(const pw_program* prog) {
    if (prog == nullptr) return dup_string("");
    return dup_string(pwhile::print(prog->command));
}

pw_status pw_analyze(const pw_program* prog, const char* config_json, char** out_report,
                     char** out_error) {
    if (prog == nullptr || out_report == nullptr) {
        set_error(out_error, "null argument");
        return PW_ERR_INVALID;
    }
    try {
        json j = parse_config(config_json);
        pwhile::RunConfig cfg = run_config_of(j);
        std::string path = j.contains("path") ? j.at("path").get<std::string>() : "<memory>";
        pwhile::AnalysisReport report = pwhile::run_analysis(path, prog->command, cfg);
        *out_report =
            dup_string(cfg.json ? pwhile::render_json(report, cfg) : pwhile::render_text(report));
        return pwhile::report_exit_code(report) == 0 ? PW_OK : PW_ERR_ANALYSIS;
    } catch (const json::exception& e) {
        set_error(out_error, std::string("bad config: ") + e.what());
        return PW_ERR_INVALID;
    } catch (const std::invalid_argument& e) {
        set_error(out_error, e.what());
        return PW_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(out_error, e.what());
        return PW_ERR_INTERNAL;
    }
}

pw_status pw_simulate(const pw_program* prog, const char* config_json, char** out_report,
                      char** out_error) {
    if (prog == nullptr || out_report == nullptr) {
        set_error(out_error, "null argument");
        return PW_ERR_INVALID;
    }
    try {
        json j = parse_config(config_json);
        pwhile::Store store;
        if (j.contains("store")) {
            for (const auto& [name, value] : j.at("store").items()) {
                store.bindings[pwhile::Var(name)] = pwhile::Int(value.get<long>());
            }
        }
        long samples = j.value("samples", 10000L);
        std::uint64_t seed = j.value("seed", 0ULL);
        long horizon = j.value("horizon", 200L);
        bool as_json = j.value("json", false);
        pwhile::SimulationReport report =
            pwhile::run_simulation(prog->command, store, samples, seed, horizon, 200000);
        *out_report = dup_string(as_json ? pwhile::render_json(report)
                                         : pwhile::render_text(report));
        return PW_OK;
    } catch (const json::exception& e) {
        set_error(out_error, std::string("bad config: ") + e.what());
        return PW_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(out_error, e.what());
        return PW_ERR_INTERNAL;
    }
}

pw_status pw_check(const pw_program* prog, const char* invariants_text, const char* config_json,
                   char** out_report, char** out_error) {
    if (prog == nullptr || out_report == nullptr || invariants_text == nullptr) {
        set_error(out_error, "null argument");
        return PW_ERR_INVALID;
    }
    try {
        json j = parse_config(config_json);
        pwhile::RunConfig cfg = run_config_of(j);
        auto invariants = pwhile::parse_invariant_file(invariants_text);
        pwhile::CheckReport report = pwhile::run_check(prog->command, invariants, cfg.analysis);
        *out_report =
            dup_string(cfg.json ? pwhile::render_json(report) : pwhile::render_text(report));
        if (!report.error.empty()) return PW_ERR_INVALID;
        return report.all_certified ? PW_OK : PW_ERR_ANALYSIS;
    } catch (const pwhile::ParseError& e) {
        set_error(out_error, e.what());
        return PW_ERR_PARSE;
    } catch (const json::exception& e) {
        set_error(out_error, std::string("bad config: ") + e.what());
        return PW_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(out_error, e.what());
        return PW_ERR_INTERNAL;
    }
}

void pw_string_free(char* s) { std::free(s); }

}  // extern "C"
