#pragma once

#include "uca/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uca {

/// Totals smaller than this are treated as zero when computing shares.
inline constexpr double kZeroDeltaTolerance = 1e-9;

/// Per-tool weighted change from `from` to `to`. Throws WEIGHT_MISMATCH
/// unless both assessments share tool weights.
DeltaDecomposition decompose_delta(const CompositeAssessment& from, const CompositeAssessment& to);

enum class TrendDirection { Up, Down, Flat };

std::string_view direction_name(TrendDirection direction) noexcept;

/// Changes of at most this many points between endpoints count as FLAT.
inline constexpr double kFlatBand = 0.05;

/// Endpoint rule: compares the last value with the first.
TrendDirection classify_trend(const std::vector<double>& series) noexcept;

struct TrendTable {
    std::vector<std::string> labels;
    std::map<ToolKind, std::vector<double>> series;
    std::map<ToolKind, TrendDirection> directions;
    std::vector<double> composite;
    TrendDirection composite_direction = TrendDirection::Flat;
};

/// Needs at least two assessments sharing tool weights.
TrendTable trend_series(const std::vector<CompositeAssessment>& assessments);

struct RankedContribution {
    ToolKind tool;
    double delta;
    std::optional<double> share;
};

/// Descending by signed delta; equal deltas keep ToolKind order.
std::vector<RankedContribution> rank_contributions(const DeltaDecomposition& decomposition);

} // namespace uca
