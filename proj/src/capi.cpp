#include "tsvf/tsvf.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "tsvf/io.hpp"
#include "tsvf/numerics.hpp"
#include "tsvf/scenarios.hpp"

struct tsvf_run {
    std::string scenario;
    nlohmann::json overrides = nlohmann::json::object();
    std::uint64_t seed = tsvf::kDefaultSeed;
};

struct tsvf_result {
    tsvf::ScenarioResult r;
};

namespace {

thread_local std::string g_last_error;

tsvf_status code_of(tsvf::ErrorCode c) {
    switch (c) {
        case tsvf::ErrorCode::invalid_argument: return TSVF_INVALID_ARGUMENT;
        case tsvf::ErrorCode::dimension_mismatch: return TSVF_DIMENSION_MISMATCH;
        case tsvf::ErrorCode::not_hermitian: return TSVF_NOT_HERMITIAN;
        case tsvf::ErrorCode::resource: return TSVF_RESOURCE;
        case tsvf::ErrorCode::numerical: return TSVF_NUMERICAL;
        case tsvf::ErrorCode::unknown_scenario: return TSVF_UNKNOWN_SCENARIO;
        case tsvf::ErrorCode::bad_param: return TSVF_BAD_PARAM;
    }
    return TSVF_INTERNAL;
}

template <class F>
tsvf_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return TSVF_OK;
    } catch (const tsvf::Error& e) {
        g_last_error = e.what();
        return code_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("malformed JSON: ") + e.what();
        return TSVF_BAD_PARAM;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TSVF_RESOURCE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TSVF_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return TSVF_INTERNAL;
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void require(bool ok, const char* what) {
    if (!ok) throw tsvf::Error(tsvf::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

void tsvf_string_free(char* s) { std::free(s); }

const char* tsvf_last_error_message(void) { return g_last_error.c_str(); }

const char* tsvf_version(void) { return "1.0.0"; }

int tsvf_result_schema_version(void) { return tsvf::kResultSchemaVersion; }

size_t tsvf_scenario_count(void) { return tsvf::scenario_registry().size(); }

const char* tsvf_scenario_name(size_t index) {
    const auto& reg = tsvf::scenario_registry();
    return index < reg.size() ? reg[index].name.c_str() : nullptr;
}

tsvf_status tsvf_scenario_describe(const char* name, char** json_out) {
    return guarded([&] {
        require(name && json_out, "null argument");
        *json_out = dup(tsvf::dump_json(tsvf::describe(tsvf::find_scenario(name))));
    });
}

tsvf_status tsvf_run_create(const char* scenario, tsvf_run** out) {
    return guarded([&] {
        require(scenario && out, "null argument");
        *out = nullptr;
        tsvf::find_scenario(scenario);
        auto* r = new tsvf_run;
        r->scenario = scenario;
        *out = r;
    });
}

void tsvf_run_destroy(tsvf_run* run) { delete run; }

tsvf_status tsvf_run_set_param(tsvf_run* run, const char* key, const char* value) {
    return guarded([&] {
        require(run && key && value, "null argument");
        run->overrides[key] = tsvf::parse_param_value(tsvf::find_scenario(run->scenario), key, value);
    });
}

tsvf_status tsvf_run_set_params_json(tsvf_run* run, const char* json_object) {
    return guarded([&] {
        require(run && json_object, "null argument");
        const auto j = nlohmann::json::parse(json_object);
        const auto& info = tsvf::find_scenario(run->scenario);
        tsvf::resolve_params(info, j);  // validates every key before anything is stored
        for (auto it = j.begin(); it != j.end(); ++it) run->overrides[it.key()] = it.value();
    });
}

tsvf_status tsvf_run_set_seed(tsvf_run* run, uint64_t seed) {
    return guarded([&] {
        require(run, "null argument");
        run->seed = seed;
    });
}

tsvf_status tsvf_run_params_json(const tsvf_run* run, char** json_out) {
    return guarded([&] {
        require(run && json_out, "null argument");
        *json_out = dup(tsvf::dump_json(tsvf::resolve_params(tsvf::find_scenario(run->scenario), run->overrides)));
    });
}

tsvf_status tsvf_run_execute(const tsvf_run* run, tsvf_result** out) {
    return guarded([&] {
        require(run && out, "null argument");
        *out = nullptr;
        auto* res = new tsvf_result{tsvf::run_scenario(run->scenario, run->overrides, run->seed)};
        *out = res;
    });
}

void tsvf_result_destroy(tsvf_result* result) { delete result; }

tsvf_status tsvf_result_json(const tsvf_result* result, char** json_out) {
    return guarded([&] {
        require(result && json_out, "null argument");
        *json_out = dup(tsvf::dump_json(result->r.to_json()));
    });
}

tsvf_status tsvf_result_summary(const tsvf_result* result, char** text_out) {
    return guarded([&] {
        require(result && text_out, "null argument");
        *text_out = dup(result->r.summary);
    });
}

int tsvf_result_all_checks_passed(const tsvf_result* result) {
    if (!result) return -1;
    return result->r.all_passed() ? 1 : 0;
}

size_t tsvf_result_series_count(const tsvf_result* result) { return result ? result->r.series.size() : 0; }

const char* tsvf_result_series_name(const tsvf_result* result, size_t index) {
    if (!result || index >= result->r.series.size()) return nullptr;
    return result->r.series[index].name.c_str();
}

tsvf_status tsvf_result_series_csv(const tsvf_result* result, size_t index, char** csv_out) {
    return guarded([&] {
        require(result && csv_out, "null argument");
        require(index < result->r.series.size(), "series index out of range");
        *csv_out = dup(tsvf::to_csv(result->r.series[index]));
    });
}

size_t tsvf_result_scalar_count(const tsvf_result* result) { return result ? result->r.scalars.size() : 0; }

tsvf_status tsvf_result_scalar(const tsvf_result* result, size_t index, const char** name, double* value) {
    return guarded([&] {
        require(result && name && value, "null argument");
        require(index < result->r.scalars.size(), "scalar index out of range");
        *name = result->r.scalars[index].first.c_str();
        *value = result->r.scalars[index].second;
    });
}

tsvf_status tsvf_result_write(const tsvf_result* result, const char* out_dir, tsvf_format format) {
    return guarded([&] {
        require(result && out_dir, "null argument");
        require(format == TSVF_FORMAT_CSV || format == TSVF_FORMAT_JSON || format == TSVF_FORMAT_BOTH, "unknown format");
        const std::filesystem::path dir(out_dir);
        if (format & TSVF_FORMAT_JSON) tsvf::atomic_write(dir / "results.json", tsvf::dump_json(result->r.to_json()));
        if (format & TSVF_FORMAT_CSV)
            for (const auto& s : result->r.series) tsvf::atomic_write(dir / (s.name + ".csv"), tsvf::to_csv(s));
    });
}

}  // extern "C"
