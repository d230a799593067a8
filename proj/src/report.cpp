// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#include "pwhile/report.hpp"

#include <json.hpp>
#include <sstream>

#include "pwhile/parser.hpp"
#include "pwhile/printer.hpp"
#include "pwhile/semantics.hpp"

namespace pwhile {

using ordered_json = nlohmann::ordered_json;

namespace {

const char* status_name(AnalysisReport::Status s) {
    switch (s) {
        case AnalysisReport::Status::Certified: return "certified";
        case AnalysisReport::Status::CertifiedUnknownLoops: return "certified-with-unknown-loops";
        case AnalysisReport::Status::Failed: return "failed";
    }
    return "?";
}

const char* cert_name(CertKind c) {
    switch (c) {
        case CertKind::Farkas: return "farkas";
        case CertKind::Numeric: return "numeric";
        case CertKind::None: return "none";
    }
    return "?";
}

std::vector<Store> build_grid(const Command& prog, const RunConfig& cfg) {
    std::set<Var> vars = free_vars(prog);
    std::vector<Var> var_list(vars.begin(), vars.end());
    std::vector<std::vector<long>> values;
    for (const auto& v : var_list) {
        std::vector<long> vals = cfg.grid_values;
        auto it = cfg.extra_points.find(v.name);
        if (it != cfg.extra_points.end()) {
            for (long x : it->second) {
                if (std::find(vals.begin(), vals.end(), x) == vals.end()) vals.push_back(x);
            }
        }
        values.push_back(std::move(vals));
    }
    std::vector<Store> grid;
    grid.push_back(Store{});
    for (size_t i = 0; i < var_list.size(); ++i) {
        std::vector<Store> next;
        for (const auto& s : grid) {
            for (long x : values[i]) {
                if (next.size() >= cfg.max_grid_rows) break;
                next.push_back(s.with(var_list[i], Int(x)));
            }
        }
        grid = std::move(next);
        if (grid.size() >= cfg.max_grid_rows) break;
    }
    return grid;
}

ordered_json store_json(const Store& s) {
    ordered_json j = ordered_json::object();
    for (const auto& [v, z] : s.bindings) j[v.name] = z.get_str();
    return j;
}

ordered_json derivation_json(const LoopBoundDerivation& d) {
    ordered_json j;
    j["label"] = d.label;
    j["loop"] = d.loop_text;
    j["mode"] = d.mode == CostMode::Cost ? "cost" : "value";
    j["continuation"] = d.continuation;
    j["strategy"] = strategy_name(d.strategy);
    j["degree"] = d.degree;
    j["joint"] = d.joint;
    ordered_json norms = ordered_json::array();
    for (const auto& n : d.norms) norms.push_back("nat(" + print(n.expr) + ")");
    j["norms"] = norms;
    if (d.body_cost != nullptr) j["body_cost"] = print(d.body_cost);
    ordered_json hs = ordered_json::array();
    for (const auto& h : d.expected_norms) hs.push_back(print(h));
    j["expected_norms"] = hs;
    ordered_json coeffs = ordered_json::object();
    for (const auto& sym : d.coefficients) {
        auto it = d.solution.find(sym);
        if (it != d.solution.end()) coeffs[sym] = rat_str(it->second);
    }
    j["coefficients"] = coeffs;
    j["bound"] = d.bound == nullptr ? "" : print(d.bound);
    ordered_json cons = ordered_json::array();
    for (const auto& rec : d.constraints) {
        ordered_json c;
        c["premise"] = print(rec.constraint.premise);
        c["lhs"] = print(rec.constraint.lhs);
        c["rhs"] = print(rec.constraint.rhs);
        c["certificate"] = cert_name(rec.certificate);
        cons.push_back(std::move(c));
    }
    j["constraints"] = cons;
    return j;
}

}  // namespace

AnalysisReport run_analysis(const std::string& path, const Command& prog, const RunConfig& cfg) {
    AnalysisReport report;
    report.program_path = path;
    report.program_text = print(prog);

    try {
        report.bound =
            et_symbolic_analyzed(CostMode::Cost, prog, cconst(0), cfg.analysis, &report.loops);
        report.have_bound = true;
    } catch (const LoopAnalysisError& e) {
        report.status = AnalysisReport::Status::Failed;
        report.error = e.what();
        return report;
    } catch (const UnsupportedCase& e) {
        report.status = AnalysisReport::Status::Failed;
        report.error = std::string("unsupported case: ") + e.what();
        return report;
    }

    bool replay_ok = true;
    bool all_farkas = true;
    for (auto& d : report.loops) {
        if (!replay_derivation(d, cfg.analysis.refute_samples, cfg.analysis.seed)) {
            replay_ok = false;
        }
        for (const auto& rec : d.constraints) {
            if (rec.certificate != CertKind::Farkas) all_farkas = false;
        }
    }

    bool rows_ok = true;
    for (const auto& s : build_grid(prog, cfg)) {
        CrossCheckRow row;
        row.store = s;
        row.bound_value = eval_cost(report.bound, s);
        try {
            OracleResult oracle = expected_cost_oracle(prog, s, cfg.horizon, cfg.oracle_budget);
            row.oracle_ran = true;
            row.oracle_lower = oracle.lower;
            row.live_mass = oracle.live_mass;
            row.ok = oracle.lower <= row.bound_value;
        } catch (const OracleBudgetExceeded&) {
            row.oracle_ran = false;
            row.ok = true;  // not evidence either way
        }
        if (!row.ok) rows_ok = false;
        report.rows.push_back(std::move(row));
    }

    if (!replay_ok || !rows_ok) {
        report.status = AnalysisReport::Status::Failed;
        report.error = !replay_ok ? "derivation replay failed" : "oracle exceeds bound on the grid";
    } else if (!all_farkas) {
        report.status = AnalysisReport::Status::CertifiedUnknownLoops;
    } else {
        report.status = AnalysisReport::Status::Certified;
    }
    return report;
}

int report_exit_code(const AnalysisReport& r) {
    return r.status == AnalysisReport::Status::Failed ? 2 : 0;
}

std::string render_json(const AnalysisReport& r, const RunConfig& cfg) {
    ordered_json j;
    j["schema_version"] = 1;
    j["program"] = r.program_path;
    j["program_text"] = r.program_text;
    j["status"] = status_name(r.status);
    if (!r.error.empty()) j["error"] = r.error;
    j["bound"] = r.have_bound ? print(r.bound) : "";
    ordered_json loops = ordered_json::array();
    for (const auto& d : r.loops) loops.push_back(derivation_json(d));
    j["loops"] = loops;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json rj;
        rj["store"] = store_json(row.store);
        rj["bound_value"] = rat_str(row.bound_value);
        if (row.oracle_ran) {
            rj["oracle_lower"] = rat_str(row.oracle_lower);
            rj["live_mass"] = rat_str(row.live_mass);
            rj["ok"] = row.ok;
        } else {
            rj["oracle_lower"] = nullptr;
        }
        rows.push_back(std::move(rj));
    }
    j["cross_checks"] = rows;
    ordered_json conf;
    conf["horizon"] = cfg.horizon;
    conf["max_degree"] = cfg.analysis.max_degree;
    conf["seed"] = cfg.analysis.seed;
    ordered_json strategies = ordered_json::array();
    for (auto s : cfg.analysis.order) strategies.push_back(strategy_name(s));
    conf["strategies"] = strategies;
    j["config"] = conf;
    return j.dump(2) + "\n";
}

std::string render_text(const AnalysisReport& r) {
    std::ostringstream os;
    os << "program: " << r.program_path << "\n";
    os << "status:  " << status_name(r.status) << "\n";
    if (!r.error.empty()) os << "error:   " << r.error << "\n";
    if (r.have_bound) os << "bound:   " << print(r.bound) << "\n";
    for (const auto& d : r.loops) {
        os << "\n" << d.label << " [" << (d.mode == CostMode::Cost ? "cost" : "value") << ", "
           << strategy_name(d.strategy) << (d.degree > 0 ? "/" + std::to_string(d.degree) : "")
           << (d.joint ? ", joint" : "") << "] " << d.loop_text << "\n";
        os << "  continuation: " << d.continuation << "\n";
        if (!d.norms.empty()) {
            os << "  norms:";
            for (const auto& n : d.norms) os << " nat(" << print(n.expr) << ")";
            os << "\n";
        }
        if (d.body_cost != nullptr) os << "  body cost g: " << print(d.body_cost) << "\n";
        for (size_t i = 0; i < d.expected_norms.size(); ++i) {
            os << "  h" << i + 1 << ": " << print(d.expected_norms[i]) << "\n";
        }
        if (d.bound != nullptr) os << "  bound: " << print(d.bound) << "\n";
        for (const auto& rec : d.constraints) {
            os << "  constraint: " << print(rec.constraint.premise) << " |= "
               << print(rec.constraint.lhs) << " <= " << print(rec.constraint.rhs) << "  ["
               << cert_name(rec.certificate) << "]\n";
        }
    }
    if (!r.rows.empty()) {
        os << "\ncross-checks (store, oracle lower, live mass, bound):\n";
        for (const auto& row : r.rows) {
            os << "  " << print(row.store) << "  ";
            if (row.oracle_ran) {
                os << rat_str(row.oracle_lower) << "  " << rat_str(row.live_mass);
            } else {
                os << "skipped  -";
            }
            os << "  " << rat_str(row.bound_value) << (row.ok ? "" : "  VIOLATION") << "\n";
        }
    }
    return os.str();
}

SimulationReport run_simulation(const Command& prog, const Store& s, long samples,
                                std::uint64_t seed, long horizon, size_t oracle_budget) {
    SimulationReport r;
    r.store = s;
    r.samples = samples;
    r.total_cost = Rat(0);
    Scheduler sched = uniform_scheduler();
    for (long i = 0; i < samples; ++i) {
        RunOutcome out = sample_run(prog, s, seed + static_cast<std::uint64_t>(i), sched, horizon);
        r.total_cost += out.cost;
        if (out.kind == RunOutcome::Kind::Aborted) ++r.aborted;
        if (out.kind == RunOutcome::Kind::Timeout) ++r.timed_out;
    }
    r.mean_cost = samples > 0 ? Rat(r.total_cost / samples) : Rat(0);
    try {
        OracleResult oracle = expected_cost_oracle(prog, s, horizon, oracle_budget);
        r.oracle_ran = true;
        r.oracle_lower = oracle.lower;
        r.live_mass = oracle.live_mass;
    } catch (const OracleBudgetExceeded&) {
        r.oracle_ran = false;
    }
    return r;
}

std::string render_text(const SimulationReport& r) {
    std::ostringstream os;
    os << "store:        " << print(r.store) << "\n";
    os << "samples:      " << r.samples << "\n";
    os << "mean cost:    " << rat_str(r.mean_cost) << " (~" << rat_decimal(r.mean_cost) << ")\n";
    os << "abort rate:   " << rat_decimal(r.samples ? Rat(Rat(r.aborted) / r.samples) : Rat(0))
       << "\n";
    os << "timeout rate: " << rat_decimal(r.samples ? Rat(Rat(r.timed_out) / r.samples) : Rat(0))
       << "\n";
    if (r.oracle_ran) {
        os << "oracle:       lower bound " << rat_str(r.oracle_lower) << " (~"
           << rat_decimal(r.oracle_lower) << "), live mass " << rat_str(r.live_mass) << "\n";
        if (r.live_mass == 0) {
            os << "oracle note:  live mass 0, the lower bound is the exact expected cost\n";
        } else {
            os << "oracle note:  live mass > 0, lower bound only\n";
        }
    } else {
        os << "oracle:       skipped (state budget exceeded)\n";
    }
    return os.str();
}

std::string render_json(const SimulationReport& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["store"] = store_json(r.store);
    j["samples"] = r.samples;
    j["mean_cost"] = rat_str(r.mean_cost);
    j["abort_rate"] = rat_str(r.samples ? Rat(Rat(r.aborted) / r.samples) : Rat(0));
    j["timeout_rate"] = rat_str(r.samples ? Rat(Rat(r.timed_out) / r.samples) : Rat(0));
    if (r.oracle_ran) {
        j["oracle_lower"] = rat_str(r.oracle_lower);
        j["live_mass"] = rat_str(r.live_mass);
        j["oracle_exact"] = r.live_mass == 0;
    } else {
        j["oracle_lower"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::vector<std::pair<std::string, Command>> labeled_loops(const Command& prog) {
    std::vector<std::pair<std::string, Command>> out;
    std::function<void(const Command&)> walk = [&](const Command& c) {
        if (c->kind == CommandNode::Kind::While) {
            out.push_back({"loop" + std::to_string(out.size() + 1), c});
            walk(c->a);
            return;
        }
        switch (c->kind) {
            case CommandNode::Kind::If:
            case CommandNode::Kind::NdChoice:
            case CommandNode::Kind::PChoice:
            case CommandNode::Kind::Seq:
                walk(c->a);
                walk(c->b);
                break;
            default: break;
        }
    };
    walk(prog);
    return out;
}

std::map<std::string, std::string> parse_invariant_file(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError("expected 'label: cost-expression'", lineno, 1);
        }
        std::string label = line.substr(0, colon);
        auto label_end = label.find_last_not_of(" \t");
        label = label.substr(0, label_end + 1);
        out[label] = line.substr(colon + 1);
    }
    return out;
}

CheckReport run_check(const Command& prog, const std::map<std::string, std::string>& invariants,
                      const AnalysisOptions& opts) {
    CheckReport report;
    auto loops = labeled_loops(prog);
    std::set<std::string> known;
    for (const auto& [label, loop] : loops) known.insert(label);
    for (const auto& [label, text] : invariants) {
        if (known.find(label) == known.end()) {
            report.error = "unknown loop label: " + label;
            report.all_certified = false;
            return report;
        }
    }
    for (const auto& [label, loop] : loops) {
        auto it = invariants.find(label);
        if (it == invariants.end()) {
            CheckReport::Row row;
            row.label = label;
            row.invariant_text = "";
            row.verdict = {InvariantVerdict::Kind::Unknown, std::nullopt, "no invariant given"};
            report.all_certified = false;
            report.rows.push_back(std::move(row));
            continue;
        }
        CostExpr inv = parse_cost_expr(it->second);
        CheckReport::Row row;
        row.label = label;
        row.invariant_text = print(inv);
        row.verdict = check_upper_invariant(CostMode::Cost, loop, cconst(0), inv, opts);
        if (row.verdict.kind != InvariantVerdict::Kind::Certified) report.all_certified = false;
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string verdict_name(InvariantVerdict::Kind k) {
    switch (k) {
        case InvariantVerdict::Kind::Certified: return "certified";
        case InvariantVerdict::Kind::Refuted: return "refuted";
        case InvariantVerdict::Kind::Unknown: return "unknown";
    }
    return "?";
}

}  // namespace

std::string render_text(const CheckReport& r) {
    std::ostringstream os;
    if (!r.error.empty()) {
        os << "error: " << r.error << "\n";
        return os.str();
    }
    for (const auto& row : r.rows) {
        os << row.label << ": " << verdict_name(row.verdict.kind);
        if (!row.invariant_text.empty()) os << "  I = " << row.invariant_text;
        if (row.verdict.witness) os << "  witness " << print(*row.verdict.witness);
        if (!row.verdict.detail.empty()) os << "  (" << row.verdict.detail << ")";
        os << "\n";
    }
    os << (r.all_certified ? "all invariants certified\n" : "not all invariants certified\n");
    return os.str();
}

std::string render_json(const CheckReport& r) {
    ordered_json j;
    j["schema_version"] = 1;
    if (!r.error.empty()) j["error"] = r.error;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json rj;
        rj["label"] = row.label;
        rj["invariant"] = row.invariant_text;
        rj["verdict"] = verdict_name(row.verdict.kind);
        if (row.verdict.witness) rj["witness"] = store_json(*row.verdict.witness);
        rj["detail"] = row.verdict.detail;
        rows.push_back(std::move(rj));
    }
    j["loops"] = rows;
    j["all_certified"] = r.all_certified;
    return j.dump(2) + "\n";
}

}  // namespace pwhile
