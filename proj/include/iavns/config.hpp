#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "iavns/montecarlo.hpp"
#include "iavns/scenario.hpp"

namespace iavns {

// Everything a scenario file can set. Each CLI flag has a field here.
struct AppConfig {
    ScenarioConfig scenario;
    CampaignConfig campaign;
    std::string out_dir;  // empty: $IAVNS_OUT_DIR, then "out"
};

// Message reads "<source>:<line>:<col>: <section.field>: <reason>" when the
// location is known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kOutDirEnv = "IAVNS_OUT_DIR";

// Defaults come from default_scenario(kind); a terrain preset is applied
// before explicit fields, so explicit fields win. Unknown keys are errors.
AppConfig parse_config(std::string_view text, const std::string& source = "<string>");
AppConfig load_config(const std::filesystem::path& path);
AppConfig default_app_config(ScenarioKind kind = ScenarioKind::scenario1);

// Writes every field, so parse_config(to_toml(c)) reproduces c.
std::string to_toml(const AppConfig& cfg);

// Comma-separated estimator names ("ins,vns,iavns"); throws ConfigError.
EstimatorSet parse_estimators(std::string_view list);
std::string to_string(const EstimatorSet& set);

std::filesystem::path resolve_out_dir(const AppConfig& cfg);

}  // namespace iavns
