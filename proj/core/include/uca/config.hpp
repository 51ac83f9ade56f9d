#pragma once

#include "uca/model.hpp"
#include "uca/runner.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace uca {

/// Per-tool overrides of the default command templates.
struct ToolCommandConfig {
    std::optional<std::string> command;
    std::optional<std::chrono::milliseconds> timeout;
    std::optional<std::set<int>> accepted_exit_codes;
    std::optional<std::string> output_file;
};

struct IntegrityConfig {
    std::optional<std::string> command;
    std::optional<std::filesystem::path> database;
    std::optional<std::filesystem::path> produced;
    std::optional<std::chrono::milliseconds> timeout;
};

/// Contents of the configuration file. Every field has a usable default so
/// an empty document (or no file at all) is a valid configuration.
struct Config {
    WeightProfile weights = WeightProfile::defaults();
    std::optional<std::filesystem::path> history_path;
    std::optional<std::string> host_label;
    std::optional<bool> firewall_override;
    std::filesystem::path output_dir = "uca-reports";
    bool parallel = false;
    std::map<std::string, std::string> variables = default_variables();
    std::map<ToolKind, ToolCommandConfig> tools;
    std::map<ToolKind, IntegrityConfig> integrity;
};

/// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnvVar = "UCA_CONFIG";

/// Relative paths inside the document resolve against `base_dir`. The
/// weight profile is validated. Throws CONFIG_INVALID or a weight error.
Config config_from_json(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

/// Throws IO_FAILURE when unreadable, CONFIG_INVALID when not JSON.
Config load_config(const std::filesystem::path& path);

/// Accepts either a full configuration document (weights under "weights")
/// or a bare weights object. Validated.
WeightProfile load_weights_file(const std::filesystem::path& path);

/// Invocations for `only` (all six when empty), defaults overlaid with the
/// configured overrides.
std::vector<ToolInvocation> configured_invocations(const Config& config, const std::set<ToolKind>& only = {});

/// AIDE or Tripwire init settings with overrides applied.
IntegrityInit configured_integrity_init(const Config& config, ToolKind tool);

} // namespace uca
