#pragma once

// JSON mapping for the domain types. Used by the history store, the
// configuration loader, and the CLI's machine-readable output.

#include "uca/model.hpp"
#include "uca/parsers.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace uca {

/// RFC 3339 UTC, e.g. "2026-10-16T08:30:00Z"; fractional seconds appear
/// only when non-zero.
std::string format_timestamp(Timestamp timestamp);

/// Inverse of format_timestamp. Throws SERIALIZATION_FAILURE.
Timestamp parse_timestamp(std::string_view text);

nlohmann::json to_json(const RawToolReport& report);
RawToolReport raw_report_from_json(const nlohmann::json& json);

nlohmann::json to_json(const VulnFinding& finding);
VulnFinding finding_from_json(const nlohmann::json& json);

nlohmann::json to_json(const WeightProfile& profile);

/// Reads a weight profile. Keys absent from `json` keep the values of
/// `base` (the embedded defaults unless given). Throws CONFIG_INVALID on
/// unknown tool/severity names or non-numeric values; does not validate
/// the sum.
WeightProfile weights_from_json(const nlohmann::json& json,
                                const WeightProfile& base = WeightProfile::defaults());

nlohmann::json to_json(const NormalizedScore& score);
NormalizedScore score_from_json(ToolKind tool, const nlohmann::json& json);

nlohmann::json to_json(const CompositeAssessment& assessment);
CompositeAssessment assessment_from_json(const nlohmann::json& json);

nlohmann::json to_json(const ParseDiagnostics& diagnostics);

} // namespace uca
