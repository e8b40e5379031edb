#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsvf/io.hpp"

namespace tsvf {

inline constexpr int kResultSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 12345;

enum class ParamType { number, integer, boolean, string };
std::string to_string(ParamType t);

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::number;
    nlohmann::json default_value;
    std::string description;
    std::vector<std::string> choices;  // for strings; empty means free text
};

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::vector<std::string> series;   // CSV stems the scenario may emit
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ScenarioResult {
    std::string scenario;
    nlohmann::json params;
    std::uint64_t seed = kDefaultSeed;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::pair<std::string, double>> scalars;  // ordered summaries for sweeps
    std::vector<Series> series;
    std::vector<Check> checks;
    std::string summary;

    bool all_passed() const;
    nlohmann::json to_json() const;
};

// Registry in a fixed order.
const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo& find_scenario(const std::string& name);  // throws unknown_scenario
nlohmann::json describe(const ScenarioInfo& info);

// Parses a command-line value for the named parameter; throws bad_param naming the key.
nlohmann::json parse_param_value(const ScenarioInfo& info, const std::string& key, const std::string& text);
// Defaults merged with overrides, each override type-checked.
nlohmann::json resolve_params(const ScenarioInfo& info, const nlohmann::json& overrides);

ScenarioResult run_scenario(const std::string& name, const nlohmann::json& overrides = nlohmann::json::object(),
                            std::uint64_t seed = kDefaultSeed);

}  // namespace tsvf
