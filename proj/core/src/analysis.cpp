#include "uca/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace uca {

namespace {

void require_shared_weights(const CompositeAssessment& a, const CompositeAssessment& b)
{
    if (!same_tool_weights(a.weights, b.weights))
        throw Error(ErrorCode::WeightMismatch, "assessments '" + a.label + "' and '" + b.label
                                                   + "' use different tool weights");
}

} // namespace

DeltaDecomposition decompose_delta(const CompositeAssessment& from, const CompositeAssessment& to)
{
    require_shared_weights(from, to);

    DeltaDecomposition result;
    result.from_label = from.label;
    result.to_label = to.label;

    double largest = -1.0;
    for (ToolKind tool : kAllTools) {
        const auto before = from.scores.find(tool);
        const auto after = to.scores.find(tool);
        if (before == from.scores.end() || after == to.scores.end())
            throw Error(ErrorCode::ToolMissing, "assessment lacks a " + std::string(tool_name(tool)) + " score");
        const double delta = to.weights.weight(tool) * (after->second.value - before->second.value);
        result.per_tool_delta[tool] = delta;
        result.total_delta += delta;
        if (std::abs(delta) > largest) {
            largest = std::abs(delta);
            result.dominant_tool = tool;
        }
    }
    if (std::abs(result.total_delta) > kZeroDeltaTolerance)
        result.dominant_share = result.per_tool_delta.at(result.dominant_tool) / result.total_delta;
    return result;
}

std::string_view direction_name(TrendDirection direction) noexcept
{
    switch (direction) {
    case TrendDirection::Up: return "UP";
    case TrendDirection::Down: return "DOWN";
    case TrendDirection::Flat: return "FLAT";
    }
    return "FLAT";
}

TrendDirection classify_trend(const std::vector<double>& series) noexcept
{
    if (series.size() < 2)
        return TrendDirection::Flat;
    const double change = series.back() - series.front();
    // The epsilon keeps a change of exactly one band width (e.g. 50.05 - 50)
    // flat despite binary rounding.
    if (std::abs(change) <= kFlatBand + 1e-12)
        return TrendDirection::Flat;
    return change > 0 ? TrendDirection::Up : TrendDirection::Down;
}

TrendTable trend_series(const std::vector<CompositeAssessment>& assessments)
{
    if (assessments.size() < 2)
        throw Error(ErrorCode::TooFewAssessments,
                    "trend needs at least 2 assessments, got " + std::to_string(assessments.size()));
    for (std::size_t i = 1; i < assessments.size(); ++i)
        require_shared_weights(assessments.front(), assessments[i]);

    TrendTable table;
    for (const auto& assessment : assessments) {
        table.labels.push_back(assessment.label);
        table.composite.push_back(assessment.composite);
        for (ToolKind tool : kAllTools) {
            const auto it = assessment.scores.find(tool);
            if (it == assessment.scores.end())
                throw Error(ErrorCode::ToolMissing, "assessment '" + assessment.label + "' lacks a "
                                                        + std::string(tool_name(tool)) + " score");
            table.series[tool].push_back(it->second.value);
        }
    }
    for (ToolKind tool : kAllTools)
        table.directions[tool] = classify_trend(table.series[tool]);
    table.composite_direction = classify_trend(table.composite);
    return table;
}

std::vector<RankedContribution> rank_contributions(const DeltaDecomposition& decomposition)
{
    const bool has_total = std::abs(decomposition.total_delta) > kZeroDeltaTolerance;
    std::vector<RankedContribution> ranked;
    for (ToolKind tool : kAllTools) {
        const auto it = decomposition.per_tool_delta.find(tool);
        const double delta = it == decomposition.per_tool_delta.end() ? 0.0 : it->second;
        ranked.push_back({tool, delta,
                          has_total ? std::optional<double>(delta / decomposition.total_delta) : std::nullopt});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedContribution& a, const RankedContribution& b) { return a.delta > b.delta; });
    return ranked;
}

} // namespace uca
