// Command-line front end over the C API.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsvf/tsvf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CString {
    char* p = nullptr;
    ~CString() { tsvf_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using RunPtr = std::unique_ptr<tsvf_run, decltype(&tsvf_run_destroy)>;
using ResultPtr = std::unique_ptr<tsvf_result, decltype(&tsvf_result_destroy)>;

// Parameter and lookup failures are usage errors; anything raised while computing is not.
void expect(tsvf_status s, bool usage) {
    if (s == TSVF_OK) return;
    const std::string msg = tsvf_last_error_message();
    if (usage || s == TSVF_BAD_PARAM || s == TSVF_UNKNOWN_SCENARIO || s == TSVF_INVALID_ARGUMENT) throw UsageError(msg);
    throw RunError(msg);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json describe(const std::string& name) {
    CString out;
    expect(tsvf_scenario_describe(name.c_str(), &out.p), true);
    return nlohmann::json::parse(out.str());
}

std::pair<std::string, std::string> split_kv(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + kv + "'");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

std::filesystem::path default_out(const std::string& scenario) {
    const char* env = std::getenv("TSVF_OUT_DIR");
    const std::filesystem::path base = env && *env ? env : "tsvf_out";
    return base / scenario;
}

tsvf_format parse_format(const std::string& f) {
    if (f == "csv") return TSVF_FORMAT_CSV;
    if (f == "json") return TSVF_FORMAT_JSON;
    return TSVF_FORMAT_BOTH;
}

RunPtr make_run(const std::string& scenario, const nlohmann::json& config_params,
                const std::vector<std::pair<std::string, std::string>>& flags, std::uint64_t seed) {
    tsvf_run* raw = nullptr;
    expect(tsvf_run_create(scenario.c_str(), &raw), true);
    RunPtr run(raw, tsvf_run_destroy);
    if (!config_params.is_null()) expect(tsvf_run_set_params_json(run.get(), config_params.dump().c_str()), true);
    for (const auto& [k, v] : flags) expect(tsvf_run_set_param(run.get(), k.c_str(), v.c_str()), true);
    expect(tsvf_run_set_seed(run.get(), seed), true);
    return run;
}

ResultPtr execute(const tsvf_run* run) {
    tsvf_result* raw = nullptr;
    expect(tsvf_run_execute(run, &raw), false);
    return ResultPtr(raw, tsvf_result_destroy);
}

// ---------------------------------------------------------------------------

int cmd_list(const std::string& filter) {
    std::vector<nlohmann::json> rows;
    for (size_t i = 0; i < tsvf_scenario_count(); ++i) {
        const std::string name = tsvf_scenario_name(i);
        if (!filter.empty() && name.find(filter) == std::string::npos) continue;
        rows.push_back(describe(name));
    }
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r["name"].get<std::string>().size());
    std::printf("%-*s  %s\n", static_cast<int>(width), "SCENARIO", "PARAMETERS");
    for (const auto& r : rows) {
        std::string params;
        for (const auto& p : r["params"]) {
            if (!params.empty()) params += ' ';
            params += p["name"].get<std::string>() + ":" + p["type"].get<std::string>() + "=";
            const auto& d = p["default"];
            params += d.is_number_float() ? fmt(d.get<double>()) : d.is_string() ? d.get<std::string>() : d.dump();
        }
        std::printf("%-*s  %s\n", static_cast<int>(width), r["name"].get<std::string>().c_str(),
                    params.empty() ? "-" : params.c_str());
    }
    return kExitOk;
}

struct RunOptions {
    std::string scenario;
    std::vector<std::string> params;
    std::string out;
    std::string format = "both";
    std::uint64_t seed = 12345;
    bool seed_given = false;
    std::string config;
};

int cmd_run(RunOptions o, bool out_given, bool format_given) {
    nlohmann::json config_params;
    if (!o.config.empty()) {
        std::ifstream f(o.config);
        if (!f) throw UsageError("cannot read config file " + o.config);
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config file " + o.config + " is not valid JSON: " + e.what());
        }
        if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
        if (cfg.contains("scenario") && o.scenario.empty()) o.scenario = cfg["scenario"].get<std::string>();
        if (cfg.contains("scenario") && cfg["scenario"].get<std::string>() != o.scenario)
            throw UsageError("config file names scenario '" + cfg["scenario"].get<std::string>() + "'");
        if (cfg.contains("params")) config_params = cfg["params"];
        if (cfg.contains("seed") && !o.seed_given) o.seed = cfg["seed"].get<std::uint64_t>();
        if (cfg.contains("out_dir") && !out_given) o.out = cfg["out_dir"].get<std::string>(), out_given = true;
        if (cfg.contains("format") && !format_given) o.format = cfg["format"].get<std::string>();
        if (o.format != "csv" && o.format != "json" && o.format != "both") throw UsageError("format must be csv, json or both");
    }
    if (o.scenario.empty()) throw UsageError("no scenario given");

    std::vector<std::pair<std::string, std::string>> flags;
    for (const auto& kv : o.params) flags.push_back(split_kv(kv));
    const RunPtr run = make_run(o.scenario, config_params, flags, o.seed);
    const ResultPtr res = execute(run.get());

    const std::filesystem::path out = out_given ? std::filesystem::path(o.out) : default_out(o.scenario);
    expect(tsvf_result_write(res.get(), out.string().c_str(), parse_format(o.format)), false);

    CString summary;
    expect(tsvf_result_summary(res.get(), &summary.p), false);
    const bool ok = tsvf_result_all_checks_passed(res.get()) == 1;
    std::printf("%s: %s [%s]\n", o.scenario.c_str(), summary.str().c_str(), ok ? "checks passed" : "CHECK FAILED");
    if (!ok) {
        CString js;
        expect(tsvf_result_json(res.get(), &js.p), false);
        for (const auto& c : nlohmann::json::parse(js.str())["checks"])
            if (!c["passed"].get<bool>())
                std::fprintf(stderr, "failed check %s: %s\n", c["name"].get<std::string>().c_str(), c["detail"].get<std::string>().c_str());
    }
    return ok ? kExitOk : kExitCheckFailed;
}

struct SweepOptions {
    std::string scenario;
    std::string param;
    std::string values;
    std::vector<std::string> fixed;
    std::string out;
    std::uint64_t seed = 12345;
    unsigned jobs = 1;
};

int cmd_sweep(const SweepOptions& o, bool out_given) {
    const nlohmann::json info = describe(o.scenario);
    bool found = false;
    for (const auto& p : info["params"]) {
        if (p["name"] != o.param) continue;
        found = true;
        const std::string type = p["type"];
        if (type != "number" && type != "integer") throw UsageError("parameter '" + o.param + "' is not numeric");
    }
    if (!found) throw UsageError("unknown parameter '" + o.param + "' for scenario " + o.scenario);

    std::vector<std::string> values;
    std::stringstream ss(o.values);
    for (std::string v; std::getline(ss, v, ',');)
        if (!v.empty()) values.push_back(v);
    if (values.empty()) throw UsageError("--values is empty");

    std::vector<std::pair<std::string, std::string>> fixed;
    for (const auto& kv : o.fixed) {
        fixed.push_back(split_kv(kv));
        if (fixed.back().first == o.param) throw UsageError("parameter '" + o.param + "' is both swept and fixed");
    }

    // Build every run first so parameter errors surface before any work.
    std::vector<RunPtr> runs;
    for (const auto& v : values) {
        auto f = fixed;
        f.emplace_back(o.param, v);
        runs.push_back(make_run(o.scenario, nullptr, f, o.seed));
    }

    std::vector<ResultPtr> results;
    for (std::size_t i = 0; i < runs.size(); ++i) results.emplace_back(nullptr, tsvf_result_destroy);
    std::vector<std::string> errors(runs.size());
    std::vector<tsvf_status> codes(runs.size(), TSVF_OK);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < runs.size();) {
            tsvf_result* raw = nullptr;
            codes[i] = tsvf_run_execute(runs[i].get(), &raw);
            if (codes[i] == TSVF_OK)
                results[i].reset(raw);
            else
                errors[i] = tsvf_last_error_message();
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(runs.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (!results[i]) {
            const std::string msg = o.param + "=" + values[i] + ": " + errors[i];
            if (codes[i] == TSVF_BAD_PARAM || codes[i] == TSVF_INVALID_ARGUMENT) throw UsageError(msg);
            throw RunError(msg);
        }

    std::vector<std::string> names;
    for (size_t k = 0; k < tsvf_result_scalar_count(results[0].get()); ++k) {
        const char* n = nullptr;
        double v = 0.0;
        expect(tsvf_result_scalar(results[0].get(), k, &n, &v), false);
        names.emplace_back(n);
    }
    std::string csv = o.param;
    for (const auto& n : names) csv += "," + n;
    csv += ",all_checks_passed\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const tsvf_result* r = results[i].get();
        CString params;
        expect(tsvf_run_params_json(runs[i].get(), &params.p), false);
        const auto& pv = nlohmann::json::parse(params.str())[o.param];
        std::string row = pv.is_number_float() ? fmt(pv.get<double>()) : pv.dump();
        for (size_t k = 0; k < names.size(); ++k) {
            const char* n = nullptr;
            double v = 0.0;
            expect(tsvf_result_scalar(r, k, &n, &v), false);
            row += "," + fmt(v);
        }
        const bool ok = tsvf_result_all_checks_passed(r) == 1;
        all_ok = all_ok && ok;
        csv += row + (ok ? ",1\n" : ",0\n");
        CString summary;
        expect(tsvf_result_summary(r, &summary.p), false);
        std::printf("%s=%s: %s [%s]\n", o.param.c_str(), values[i].c_str(), summary.str().c_str(),
                    ok ? "checks passed" : "CHECK FAILED");
    }

    const std::filesystem::path out = out_given ? std::filesystem::path(o.out) : default_out(o.scenario);
    std::filesystem::create_directories(out);
    const std::filesystem::path file = out / ("sweep_" + o.param + ".csv");
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << csv;
        if (!f) throw RunError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
    std::printf("wrote %s\n", file.string().c_str());
    return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pre- and post-selected quantum system simulations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tsvf_version()));

    std::string filter;
    auto* list = app.add_subcommand("list", "List scenarios and their parameters");
    list->add_option("--filter", filter, "Only scenarios whose name contains this text");

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Run one scenario and write results.json and CSV series");
    run->add_option("scenario", ro.scenario, "Scenario name");
    run->add_option("--param,-p", ro.params, "Parameter override key=value (repeatable)");
    auto* run_out = run->add_option("--out,-o", ro.out, "Output directory (default $TSVF_OUT_DIR/<scenario> or tsvf_out/<scenario>)");
    auto* run_fmt = run->add_option("--format", ro.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    auto* run_seed = run->add_option("--seed", ro.seed, "Random seed");
    run->add_option("--config", ro.config, "JSON file with scenario, params, out_dir, format, seed; flags take precedence")
        ->check(CLI::ExistingFile);

    SweepOptions so;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one numeric parameter");
    sweep->add_option("scenario", so.scenario, "Scenario name")->required();
    sweep->add_option("--param", so.param, "Parameter to sweep")->required();
    sweep->add_option("--values", so.values, "Comma-separated values")->required();
    sweep->add_option("--fixed,-f", so.fixed, "Fixed parameter key=value (repeatable)");
    auto* sweep_out = sweep->add_option("--out,-o", so.out, "Output directory");
    sweep->add_option("--seed", so.seed, "Random seed");
    sweep->add_option("--jobs,-j", so.jobs, "Parallel sweep points")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (list->parsed()) return cmd_list(filter);
        if (run->parsed()) {
            ro.seed_given = run_seed->count() > 0;
            return cmd_run(ro, run_out->count() > 0, run_fmt->count() > 0);
        }
        if (sweep->parsed()) return cmd_sweep(so, sweep_out->count() > 0);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const RunError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return kExitUsage;
}
