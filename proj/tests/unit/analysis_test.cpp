#include "test_util.hpp"

#include "uca/analysis.hpp"
#include "uca/scoring.hpp"

using namespace uca;

namespace {

CompositeAssessment assess(std::array<double, 6> values, const std::string& label,
                           const WeightProfile& profile = WeightProfile::defaults())
{
    std::map<ToolKind, NormalizedScore> scores;
    for (std::size_t i = 0; i < kAllTools.size(); ++i)
        scores.emplace(kAllTools[i], supplied_score(kAllTools[i], values[i]));
    return aggregate(scores, profile, label);
}

} // namespace

TEST(Decomposition, BaselineToFull)
{
    const auto from = assess({59, 67.4, 83.4, 82.4, 57.8, 0}, "baseline");
    const auto to = assess({66, 77.3, 75.0, 77.7, 67.1, 47}, "full");
    const auto d = decompose_delta(from, to);
    EXPECT_EQ(d.from_label, "baseline");
    EXPECT_EQ(d.to_label, "full");
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::VulnScan), 7.05, 1e-9);
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::OpenscapCis), 1.86, 1e-9);
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::OpenscapStandard), 1.485, 1e-9);
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::Lynis), 1.40, 1e-9);
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::Tripwire), -0.705, 1e-9);
    EXPECT_NEAR(d.per_tool_delta.at(ToolKind::Aide), -1.26, 1e-9);
    EXPECT_NEAR(d.total_delta, 9.83, 1e-9);
    EXPECT_EQ(d.dominant_tool, ToolKind::VulnScan);
    ASSERT_TRUE(d.dominant_share.has_value());
    EXPECT_NEAR(*d.dominant_share, 7.05 / 9.83, 1e-12);
}

TEST(Decomposition, ZeroTotalHasNoShare)
{
    const auto a = assess({50, 50, 50, 50, 50, 50}, "a");
    const auto d = decompose_delta(a, a);
    EXPECT_DOUBLE_EQ(d.total_delta, 0.0);
    EXPECT_FALSE(d.dominant_share.has_value());
    EXPECT_EQ(d.dominant_tool, ToolKind::Lynis);
}

TEST(Decomposition, OffsettingChangesHaveNoShare)
{
    // Lynis +10 (w 0.20) offset by CIS -10 (w 0.20).
    const auto a = assess({50, 50, 50, 50, 50, 50}, "a");
    const auto b = assess({60, 50, 50, 50, 40, 50}, "b");
    const auto d = decompose_delta(a, b);
    EXPECT_NEAR(d.total_delta, 0.0, 1e-12);
    EXPECT_FALSE(d.dominant_share.has_value());
    EXPECT_EQ(d.dominant_tool, ToolKind::Lynis);
}

TEST(Decomposition, TiesResolveInDeclarationOrder)
{
    const auto a = assess({50, 50, 50, 50, 50, 50}, "a");
    const auto b = assess({50, 60, 60, 50, 50, 50}, "b");
    EXPECT_EQ(decompose_delta(a, b).dominant_tool, ToolKind::OpenscapStandard);
}

TEST(Decomposition, LargestMagnitudeMayBeNegative)
{
    const auto a = assess({50, 50, 50, 50, 50, 50}, "a");
    const auto b = assess({55, 50, 10, 50, 50, 50}, "b");
    const auto d = decompose_delta(a, b);
    EXPECT_EQ(d.dominant_tool, ToolKind::Aide);
    ASSERT_TRUE(d.dominant_share.has_value());
    EXPECT_NEAR(*d.dominant_share, -6.0 / -5.0, 1e-12);
}

TEST(Decomposition, RequiresSameWeights)
{
    auto other = WeightProfile::defaults();
    other.tool_weights[ToolKind::Lynis] = 0.25;
    other.tool_weights[ToolKind::OpenscapCis] = 0.15;
    const auto a = assess({50, 50, 50, 50, 50, 50}, "a");
    const auto b = assess({50, 50, 50, 50, 50, 50}, "b", other);
    EXPECT_UCA_ERROR(decompose_delta(a, b), ErrorCode::WeightMismatch);
}

TEST(Trend, EndpointRule)
{
    EXPECT_EQ(classify_trend({83.4, 77.7, 75.0}), TrendDirection::Down);
    EXPECT_EQ(classify_trend({0, 47, 47}), TrendDirection::Up);
    EXPECT_EQ(classify_trend({50, 90, 50.04}), TrendDirection::Flat);
    EXPECT_EQ(classify_trend({50, 50.05}), TrendDirection::Flat);
    EXPECT_EQ(classify_trend({50, 50.06}), TrendDirection::Up);
    EXPECT_EQ(classify_trend({50}), TrendDirection::Flat);
    EXPECT_EQ(classify_trend({}), TrendDirection::Flat);
    EXPECT_EQ(direction_name(TrendDirection::Up), "UP");
}

TEST(Trend, SeriesAcrossLevels)
{
    const std::vector<CompositeAssessment> history = {
        assess({59, 67.4, 83.4, 82.4, 57.8, 0}, "baseline"),
        assess({61, 69.8, 77.7, 78.0, 58.6, 47}, "partial"),
        assess({66, 77.3, 75.0, 77.7, 67.1, 47}, "full"),
    };
    const auto table = trend_series(history);
    EXPECT_EQ(table.labels, (std::vector<std::string>{"baseline", "partial", "full"}));
    EXPECT_EQ(table.series.at(ToolKind::Aide), (std::vector<double>{83.4, 77.7, 75.0}));
    EXPECT_EQ(table.directions.at(ToolKind::Aide), TrendDirection::Down);
    EXPECT_EQ(table.directions.at(ToolKind::Tripwire), TrendDirection::Down);
    EXPECT_EQ(table.directions.at(ToolKind::VulnScan), TrendDirection::Up);
    EXPECT_EQ(table.directions.at(ToolKind::Lynis), TrendDirection::Up);
    EXPECT_EQ(table.composite_direction, TrendDirection::Up);
    ASSERT_EQ(table.composite.size(), 3u);
}

TEST(Trend, Errors)
{
    EXPECT_UCA_ERROR(trend_series({assess({1, 1, 1, 1, 1, 1}, "only")}), ErrorCode::TooFewAssessments);
    auto other = WeightProfile::defaults();
    other.tool_weights[ToolKind::Aide] = 0.10;
    other.tool_weights[ToolKind::Tripwire] = 0.20;
    EXPECT_UCA_ERROR(trend_series({assess({1, 1, 1, 1, 1, 1}, "a"), assess({1, 1, 1, 1, 1, 1}, "b", other)}),
                     ErrorCode::WeightMismatch);
}

TEST(Ranking, DescendingBySignedDelta)
{
    const auto d = decompose_delta(assess({59, 67.4, 83.4, 82.4, 57.8, 0}, "b"),
                                   assess({66, 77.3, 75.0, 77.7, 67.1, 47}, "f"));
    const auto ranked = rank_contributions(d);
    ASSERT_EQ(ranked.size(), 6u);
    const std::vector<ToolKind> order = {ToolKind::VulnScan, ToolKind::OpenscapCis, ToolKind::OpenscapStandard,
                                         ToolKind::Lynis,    ToolKind::Tripwire,    ToolKind::Aide};
    for (std::size_t i = 0; i < order.size(); ++i)
        EXPECT_EQ(ranked[i].tool, order[i]) << i;
    EXPECT_TRUE(ranked[0].share.has_value());
}
