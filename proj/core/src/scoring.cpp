#include "uca/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uca {

namespace {

double clamp_score(double value) { return std::clamp(value, 0.0, 100.0); }

} // namespace

Severity classify_severity(double cvss)
{
    if (std::isnan(cvss) || cvss < 0.0 || cvss > 10.0) {
        std::ostringstream msg;
        msg << "cvss " << cvss << " outside 0.0-10.0";
        throw Error(ErrorCode::CvssOutOfRange, msg.str());
    }
    if (cvss >= 9.0) return Severity::Critical;
    if (cvss >= 7.0) return Severity::High;
    if (cvss >= 4.0) return Severity::Medium;
    return Severity::Low;
}

NormalizedScore normalize_lynis(const LynisReport& report)
{
    return {ToolKind::Lynis, clamp_score(report.hardening_index), report};
}

NormalizedScore normalize_scap(const ScapReport& report)
{
    const ToolKind tool = report.profile == ScapProfile::Standard ? ToolKind::OpenscapStandard
                                                                  : ToolKind::OpenscapCis;
    const auto counted = report.pass_count + report.fail_count;
    if (counted == 0)
        throw Error(ErrorCode::EmptyResult, std::string(tool_name(tool))
                                                + ": no pass or fail results; score undefined");
    const double value = 100.0 * static_cast<double>(report.pass_count) / static_cast<double>(counted);
    return {tool, clamp_score(value), report};
}

NormalizedScore normalize_aide(const AideReport& report)
{
    const auto total = report.total();
    const double value = total == 0 ? 100.0
                                    : 100.0 - 10.0 * std::log10(static_cast<double>(total));
    return {ToolKind::Aide, clamp_score(value), report};
}

NormalizedScore normalize_tripwire(const TripwireReport& report)
{
    if (report.objects_scanned == 0)
        throw Error(ErrorCode::EmptyDatabase, "TRIPWIRE: zero objects scanned; score undefined");
    const double objects = static_cast<double>(report.objects_scanned);
    const double value = 100.0 * (objects - static_cast<double>(report.violations)) / objects;
    return {ToolKind::Tripwire, clamp_score(value), report};
}

double vuln_raw_penalty(const VulnReport& report, const WeightProfile& profile)
{
    double penalty = 0.0;
    for (const auto& finding : report.findings) {
        if (!finding.confirmed)
            penalty += profile.severity_weight(finding.severity);
    }
    penalty += profile.port_penalty * static_cast<double>(report.open_ports);
    penalty += profile.confirmed_penalty * static_cast<double>(report.confirmed_count);
    return penalty;
}

NormalizedScore normalize_vuln(const VulnReport& report, const WeightProfile& profile)
{
    double penalty = vuln_raw_penalty(report, profile);
    if (report.firewall_active)
        penalty = std::max(0.0, penalty - profile.firewall_discount);
    return {ToolKind::VulnScan, clamp_score(100.0 - penalty), report};
}

NormalizedScore normalize(const RawToolReport& report, const WeightProfile& profile)
{
    struct Visitor {
        const WeightProfile& profile;
        NormalizedScore operator()(const LynisReport& r) const { return normalize_lynis(r); }
        NormalizedScore operator()(const ScapReport& r) const { return normalize_scap(r); }
        NormalizedScore operator()(const AideReport& r) const { return normalize_aide(r); }
        NormalizedScore operator()(const TripwireReport& r) const { return normalize_tripwire(r); }
        NormalizedScore operator()(const VulnReport& r) const { return normalize_vuln(r, profile); }
        NormalizedScore operator()(const SuppliedScore&) const
        {
            throw Error(ErrorCode::ConfigInvalid, "a supplied score has no raw metrics to normalize");
        }
    };
    return std::visit(Visitor{profile}, report);
}

NormalizedScore supplied_score(ToolKind tool, double value)
{
    if (std::isnan(value) || value < 0.0 || value > 100.0) {
        std::ostringstream msg;
        msg << tool_name(tool) << ": supplied score " << value << " outside 0-100";
        throw Error(ErrorCode::ValueOutOfRange, msg.str());
    }
    return {tool, value, SuppliedScore{}};
}

std::optional<ToolKind> tool_of(const RawToolReport& report) noexcept
{
    struct Visitor {
        std::optional<ToolKind> operator()(const LynisReport&) const { return ToolKind::Lynis; }
        std::optional<ToolKind> operator()(const ScapReport& r) const
        {
            return r.profile == ScapProfile::Standard ? ToolKind::OpenscapStandard : ToolKind::OpenscapCis;
        }
        std::optional<ToolKind> operator()(const AideReport&) const { return ToolKind::Aide; }
        std::optional<ToolKind> operator()(const TripwireReport&) const { return ToolKind::Tripwire; }
        std::optional<ToolKind> operator()(const VulnReport&) const { return ToolKind::VulnScan; }
        std::optional<ToolKind> operator()(const SuppliedScore&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, report);
}

CompositeAssessment aggregate(const std::map<ToolKind, NormalizedScore>& scores,
                              const WeightProfile& profile, std::string label, Timestamp timestamp)
{
    std::string missing;
    for (ToolKind tool : kAllTools) {
        if (!scores.contains(tool))
            missing += (missing.empty() ? "" : ", ") + std::string(tool_name(tool));
    }
    if (!missing.empty())
        throw Error(ErrorCode::ToolMissing, "no score for " + missing);
    require_valid_weights(profile);

    CompositeAssessment assessment;
    assessment.label = std::move(label);
    assessment.timestamp = timestamp;
    assessment.weights = profile;

    double composite = 0.0;
    for (ToolKind tool : kAllTools) {
        const NormalizedScore& score = scores.at(tool);
        if (score.tool != tool)
            throw Error(ErrorCode::ConfigInvalid, "score filed under " + std::string(tool_name(tool))
                                                      + " belongs to " + std::string(tool_name(score.tool)));
        if (std::isnan(score.value) || score.value < 0.0 || score.value > 100.0) {
            std::ostringstream msg;
            msg << tool_name(tool) << " score " << score.value << " outside 0-100";
            throw Error(ErrorCode::ValueOutOfRange, msg.str());
        }
        const double contribution = profile.weight(tool) * score.value;
        assessment.contributions[tool] = contribution;
        assessment.scores.emplace(tool, score);
        composite += contribution;
    }
    assessment.composite = clamp_score(composite);
    return assessment;
}

} // namespace uca
