#pragma once

#include "uca/analysis.hpp"
#include "uca/model.hpp"
#include "uca/parsers.hpp"
#include "uca/store.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace uca::cli {

// Scores render with two decimals, percentages with one.

std::string fixed(double value, int decimals);
/// "+1.50", "-0.71"; values that round to zero print unsigned ("0.00").
std::string signed_fixed(double value, int decimals);

std::string render_raw_text(const RawToolReport& report);
std::string render_assessment_text(const CompositeAssessment& assessment, const std::string& host);

std::string render_decomposition_text(const DeltaDecomposition& decomposition);
nlohmann::json decomposition_json(const DeltaDecomposition& decomposition);

enum class ReportFormat { Markdown, Json, Text };

/// Score table (one column per assessment plus a Change column when there
/// are two or more), trend directions and first-to-last decomposition.
/// Output contains no timestamps and is byte-for-byte reproducible.
std::string render_report(const std::vector<HistoryRecord>& records, ReportFormat format);

} // namespace uca::cli
