#include "uca/cli/pipeline.hpp"

#include "uca/scoring.hpp"
#include "uca/serialization.hpp"

namespace uca::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorCode::ConfigInvalid, what);
}

fs::path resolve(const fs::path& base_dir, const std::string& value)
{
    fs::path path(value);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
}

} // namespace

Manifest manifest_from_json(const json& document, const fs::path& base_dir)
{
    if (!document.is_object())
        invalid("manifest must be a JSON object");
    Manifest manifest;
    for (const auto& [key, value] : document.items()) {
        if (key == "label") {
            if (!value.is_string())
                invalid("manifest label must be a string");
            manifest.label = value.get<std::string>();
        } else if (key == "host") {
            if (!value.is_string())
                invalid("manifest host must be a string");
            manifest.host = value.get<std::string>();
        } else if (key == "tools") {
            if (!value.is_object())
                invalid("manifest tools must be an object");
            for (const auto& [name, entry_json] : value.items()) {
                const auto tool = parse_tool(name);
                if (!tool)
                    invalid("manifest names unknown tool '" + name + "'");
                if (manifest.entries.contains(*tool))
                    invalid("manifest lists " + std::string(tool_name(*tool)) + " twice");
                ManifestEntry entry;
                if (entry_json.is_string()) {
                    entry.report = resolve(base_dir, entry_json.get<std::string>());
                } else if (entry_json.is_object()) {
                    for (const auto& [field, v] : entry_json.items()) {
                        if (field == "report" && v.is_string())
                            entry.report = resolve(base_dir, v.get<std::string>());
                        else if (field == "score" && v.is_number())
                            entry.score = v.get<double>();
                        else if (field == "firewall_override" && v.is_boolean())
                            entry.firewall_override = v.get<bool>();
                        else if (field == "note")
                            continue;
                        else
                            invalid("manifest entry " + name + ": bad field '" + field + "'");
                    }
                    if (entry.report.has_value() == entry.score.has_value())
                        invalid("manifest entry " + name + ": give exactly one of report or score");
                } else {
                    invalid("manifest entry " + name + " must be a path or an object");
                }
                manifest.entries.emplace(*tool, std::move(entry));
            }
        } else {
            invalid("unknown manifest key '" + key + "'");
        }
    }
    return manifest;
}

Manifest load_manifest(const fs::path& path)
{
    const std::string text = read_text_file(path);
    json document;
    try {
        document = json::parse(text);
    } catch (const json::exception& e) {
        invalid(path.string() + ": " + e.what());
    }
    return manifest_from_json(document, path.parent_path());
}

json manifest_to_json(const Manifest& manifest, const fs::path& relative_to)
{
    json tools = json::object();
    for (const auto& [tool, entry] : manifest.entries) {
        json item = json::object();
        if (entry.report) {
            const fs::path shown = relative_to.empty() ? *entry.report
                                                       : entry.report->lexically_proximate(relative_to);
            item["report"] = shown.string();
        }
        if (entry.score)
            item["score"] = *entry.score;
        if (entry.firewall_override)
            item["firewall_override"] = *entry.firewall_override;
        tools[std::string(tool_name(tool))] = std::move(item);
    }
    json out = json::object();
    if (manifest.label)
        out["label"] = *manifest.label;
    if (manifest.host)
        out["host"] = *manifest.host;
    out["tools"] = std::move(tools);
    return out;
}

ScoredManifest score_manifest(const Manifest& manifest, const WeightProfile& weights,
                              const std::string& label, Timestamp timestamp,
                              std::optional<bool> default_firewall_override)
{
    std::string missing;
    for (ToolKind tool : kAllTools) {
        if (!manifest.entries.contains(tool))
            missing += (missing.empty() ? "" : ", ") + std::string(tool_name(tool));
    }
    if (!missing.empty())
        throw Error(ErrorCode::ToolMissing, "manifest has no entry for " + missing);

    ScoredManifest result;
    std::map<ToolKind, NormalizedScore> scores;
    for (const auto& [tool, entry] : manifest.entries) {
        if (entry.score) {
            scores.emplace(tool, supplied_score(tool, *entry.score));
            continue;
        }
        ParseOptions options;
        options.firewall_override = entry.firewall_override ? entry.firewall_override : default_firewall_override;
        ParsedReport parsed = parse_report_file(tool, *entry.report, options);
        scores.emplace(tool, normalize(parsed.report, weights));
        result.diagnostics.emplace(tool, std::move(parsed.diagnostics));
    }
    result.assessment = aggregate(scores, weights, label, timestamp);
    return result;
}

Timestamp now()
{
    return std::chrono::time_point_cast<std::chrono::nanoseconds>(std::chrono::system_clock::now());
}

} // namespace uca::cli
