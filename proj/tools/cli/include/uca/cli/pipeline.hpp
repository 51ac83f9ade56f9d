#pragma once

#include "uca/model.hpp"
#include "uca/parsers.hpp"
#include "uca/store.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uca::cli {

/// One manifest line: a report file to parse, or a score obtained elsewhere.
struct ManifestEntry {
    std::optional<std::filesystem::path> report;
    std::optional<double> score;
    std::optional<bool> firewall_override;
};

/// Maps tools to their inputs. Report paths are stored resolved against the
/// manifest's directory.
struct Manifest {
    std::optional<std::string> label;
    std::optional<std::string> host;
    std::map<ToolKind, ManifestEntry> entries;
};

/// Throws CONFIG_INVALID for schema problems, IO_FAILURE when unreadable.
Manifest load_manifest(const std::filesystem::path& path);
Manifest manifest_from_json(const nlohmann::json& document, const std::filesystem::path& base_dir);
nlohmann::json manifest_to_json(const Manifest& manifest, const std::filesystem::path& relative_to = {});

struct ScoredManifest {
    CompositeAssessment assessment;
    std::map<ToolKind, ParseDiagnostics> diagnostics;
};

/// Parses, normalizes and aggregates every entry. Throws TOOL_MISSING
/// naming all absent tools before any file is read.
ScoredManifest score_manifest(const Manifest& manifest, const WeightProfile& weights,
                              const std::string& label, Timestamp timestamp,
                              std::optional<bool> default_firewall_override = std::nullopt);

Timestamp now();

} // namespace uca::cli
