#include "test_util.hpp"

#include "uca/scoring.hpp"

#include <cmath>
#include <limits>

using namespace uca;

namespace {

VulnFinding finding(const std::string& id, Severity severity, bool confirmed = false)
{
    VulnFinding f;
    f.identifier = id;
    f.severity = severity;
    f.confirmed = confirmed;
    return f;
}

VulnReport scan(std::uint64_t open, bool firewall, std::vector<VulnFinding> findings)
{
    VulnReport report;
    report.open_ports = open;
    report.firewall_active = firewall;
    report.findings = std::move(findings);
    for (const auto& f : report.findings)
        report.confirmed_count += f.confirmed ? 1 : 0;
    return report;
}

std::map<ToolKind, NormalizedScore> flat_scores(double value)
{
    std::map<ToolKind, NormalizedScore> scores;
    for (ToolKind tool : kAllTools)
        scores.emplace(tool, supplied_score(tool, value));
    return scores;
}

} // namespace

TEST(Scoring, SeverityBands)
{
    EXPECT_EQ(classify_severity(10.0), Severity::Critical);
    EXPECT_EQ(classify_severity(9.0), Severity::Critical);
    EXPECT_EQ(classify_severity(8.9), Severity::High);
    EXPECT_EQ(classify_severity(7.0), Severity::High);
    EXPECT_EQ(classify_severity(6.9), Severity::Medium);
    EXPECT_EQ(classify_severity(4.0), Severity::Medium);
    EXPECT_EQ(classify_severity(3.9), Severity::Low);
    EXPECT_EQ(classify_severity(0.0), Severity::Low);
    EXPECT_UCA_ERROR(classify_severity(10.1), ErrorCode::CvssOutOfRange);
    EXPECT_UCA_ERROR(classify_severity(-0.1), ErrorCode::CvssOutOfRange);
    EXPECT_UCA_ERROR(classify_severity(std::nan("")), ErrorCode::CvssOutOfRange);
}

TEST(Scoring, LynisIsIdentity)
{
    EXPECT_DOUBLE_EQ(normalize_lynis({59}).value, 59.0);
    EXPECT_DOUBLE_EQ(normalize_lynis({0}).value, 0.0);
    EXPECT_DOUBLE_EQ(normalize_lynis({100}).value, 100.0);
    EXPECT_EQ(normalize_lynis({59}).tool, ToolKind::Lynis);
}

TEST(Scoring, ScapFraction)
{
    EXPECT_NEAR(normalize_scap({ScapProfile::Standard, 29, 14}).value, 100.0 * 29 / 43, 1e-12);
    EXPECT_NEAR(normalize_scap({ScapProfile::Cis, 137, 100}).value, 100.0 * 137 / 237, 1e-12);
    EXPECT_DOUBLE_EQ(normalize_scap({ScapProfile::Cis, 0, 5}).value, 0.0);
    EXPECT_DOUBLE_EQ(normalize_scap({ScapProfile::Cis, 5, 0}).value, 100.0);
    EXPECT_EQ(normalize_scap({ScapProfile::Cis, 1, 1}).tool, ToolKind::OpenscapCis);
    EXPECT_EQ(normalize_scap({ScapProfile::Standard, 1, 1}).tool, ToolKind::OpenscapStandard);
    EXPECT_UCA_ERROR(normalize_scap({ScapProfile::Standard, 0, 0}), ErrorCode::EmptyResult);
}

TEST(Scoring, AideLogarithmic)
{
    EXPECT_DOUBLE_EQ(normalize_aide({0, 0, 0}).value, 100.0);
    EXPECT_DOUBLE_EQ(normalize_aide({1, 0, 0}).value, 100.0);
    EXPECT_NEAR(normalize_aide({0, 0, 10}).value, 90.0, 1e-12);
    EXPECT_NEAR(normalize_aide({11, 0, 35}).value, 100.0 - 10.0 * std::log10(46.0), 1e-12);
    // 10^10 changes reach the floor exactly; beyond stays at 0.
    EXPECT_NEAR(normalize_aide({0, 0, 10'000'000'000ULL}).value, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(normalize_aide({0, 0, 100'000'000'000ULL}).value, 0.0);
}

TEST(Scoring, TripwireRatio)
{
    EXPECT_NEAR(normalize_tripwire({76000, 13459}).value, 82.2907894736842, 1e-9);
    EXPECT_DOUBLE_EQ(normalize_tripwire({10, 0}).value, 100.0);
    EXPECT_DOUBLE_EQ(normalize_tripwire({10, 10}).value, 0.0);
    EXPECT_UCA_ERROR(normalize_tripwire({0, 0}), ErrorCode::EmptyDatabase);
}

TEST(Scoring, VulnPenaltyModel)
{
    const auto profile = WeightProfile::defaults();
    const auto report = scan(2, false,
                             {finding("a", Severity::Critical), finding("b", Severity::High),
                              finding("c", Severity::Medium), finding("d", Severity::Low),
                              finding("e", Severity::Critical, true)});
    // 15 + 8 + 4 + 1 + 3*2 + 10*1; the confirmed critical adds no severity weight.
    EXPECT_DOUBLE_EQ(vuln_raw_penalty(report, profile), 44.0);
    EXPECT_DOUBLE_EQ(normalize_vuln(report, profile).value, 56.0);

    auto firewalled = report;
    firewalled.firewall_active = true;
    EXPECT_DOUBLE_EQ(normalize_vuln(firewalled, profile).value, 66.0);
}

TEST(Scoring, VulnFirewallDiscountFloorsAtZeroPenalty)
{
    const auto profile = WeightProfile::defaults();
    const auto quiet = scan(1, true, {finding("a", Severity::Low)});
    EXPECT_DOUBLE_EQ(normalize_vuln(quiet, profile).value, 100.0);
}

TEST(Scoring, VulnClampsAtZero)
{
    const auto profile = WeightProfile::defaults();
    std::vector<VulnFinding> many;
    for (int i = 0; i < 20; ++i)
        many.push_back(finding("c" + std::to_string(i), Severity::Critical));
    EXPECT_DOUBLE_EQ(normalize_vuln(scan(0, true, many), profile).value, 0.0);
}

TEST(Scoring, VulnTableScores)
{
    const auto profile = WeightProfile::defaults();
    // Baseline: two open ports, four confirmed, two critical and three high unconfirmed.
    std::vector<VulnFinding> baseline = {finding("c1", Severity::Critical), finding("c2", Severity::Critical),
                                         finding("h1", Severity::High), finding("h2", Severity::High),
                                         finding("h3", Severity::High)};
    for (int i = 0; i < 4; ++i)
        baseline.push_back(finding("v" + std::to_string(i), Severity::High, true));
    EXPECT_DOUBLE_EQ(normalize_vuln(scan(2, false, baseline), profile).value, 0.0);

    // Hardened: one open port behind a firewall, severities summing to 60.
    std::vector<VulnFinding> hardened = {finding("c1", Severity::Critical), finding("c2", Severity::Critical),
                                         finding("h1", Severity::High), finding("h2", Severity::High),
                                         finding("h3", Severity::High), finding("m1", Severity::Medium),
                                         finding("l1", Severity::Low), finding("l2", Severity::Low)};
    EXPECT_DOUBLE_EQ(normalize_vuln(scan(1, true, hardened), profile).value, 47.0);
}

TEST(Scoring, CustomSeverityWeights)
{
    auto profile = WeightProfile::defaults();
    profile.severity_weights[Severity::Low] = 0.0;
    profile.port_penalty = 0.0;
    EXPECT_DOUBLE_EQ(normalize_vuln(scan(5, false, {finding("l", Severity::Low)}), profile).value, 100.0);
}

TEST(Scoring, NormalizeDispatch)
{
    const auto profile = WeightProfile::defaults();
    EXPECT_EQ(normalize(RawToolReport{AideReport{1, 2, 3}}, profile).tool, ToolKind::Aide);
    EXPECT_EQ(std::get<AideReport>(normalize(RawToolReport{AideReport{1, 2, 3}}, profile).raw).changed, 3u);
    EXPECT_UCA_ERROR(normalize(RawToolReport{SuppliedScore{}}, profile), ErrorCode::ConfigInvalid);
    EXPECT_EQ(tool_of(RawToolReport{VulnReport{}}), ToolKind::VulnScan);
    EXPECT_EQ(tool_of(RawToolReport{ScapReport{ScapProfile::Cis, 1, 1}}), ToolKind::OpenscapCis);
    EXPECT_FALSE(tool_of(RawToolReport{SuppliedScore{}}).has_value());
}

TEST(Scoring, SuppliedScoreRange)
{
    EXPECT_DOUBLE_EQ(supplied_score(ToolKind::VulnScan, 47).value, 47.0);
    EXPECT_UCA_ERROR(supplied_score(ToolKind::VulnScan, 100.5), ErrorCode::ValueOutOfRange);
    EXPECT_UCA_ERROR(supplied_score(ToolKind::VulnScan, -1), ErrorCode::ValueOutOfRange);
    EXPECT_UCA_ERROR(supplied_score(ToolKind::VulnScan, std::nan("")), ErrorCode::ValueOutOfRange);
}

TEST(Scoring, AggregateContributions)
{
    auto scores = flat_scores(50.0);
    scores[ToolKind::VulnScan] = supplied_score(ToolKind::VulnScan, 0.0);
    const auto assessment = aggregate(scores, WeightProfile::defaults(), "x");
    EXPECT_NEAR(assessment.composite, 42.5, 1e-12);
    EXPECT_NEAR(assessment.contributions.at(ToolKind::Lynis), 10.0, 1e-12);
    EXPECT_NEAR(assessment.contributions.at(ToolKind::VulnScan), 0.0, 1e-12);
    EXPECT_EQ(assessment.label, "x");
    EXPECT_EQ(assessment.scores.size(), 6u);
}

TEST(Scoring, AggregateNamesEveryMissingTool)
{
    auto scores = flat_scores(50.0);
    scores.erase(ToolKind::Aide);
    scores.erase(ToolKind::VulnScan);
    try {
        aggregate(scores, WeightProfile::defaults(), "x");
        FAIL() << "expected TOOL_MISSING";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ToolMissing);
        EXPECT_NE(std::string(e.what()).find("AIDE"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("VULN_SCAN"), std::string::npos);
    }
}

TEST(Scoring, AggregateRejectsInvalidWeights)
{
    auto profile = WeightProfile::defaults();
    profile.tool_weights[ToolKind::Aide] = 0.5;
    EXPECT_UCA_ERROR(aggregate(flat_scores(10), profile, "x"), ErrorCode::WeightSumInvalid);
}

TEST(Scoring, AggregateRejectsMismatchedScore)
{
    auto scores = flat_scores(50.0);
    scores[ToolKind::Aide] = supplied_score(ToolKind::Tripwire, 20.0);
    EXPECT_THROW(aggregate(scores, WeightProfile::defaults(), "x"), Error);
}
