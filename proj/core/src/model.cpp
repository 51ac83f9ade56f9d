#include "uca/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace uca {

namespace {

std::string lower(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(out.begin(), out.end(), '_', '-');
    return out;
}

bool non_negative(double value) { return !std::isnan(value) && value >= 0.0; }

} // namespace

std::string_view tool_name(ToolKind tool) noexcept
{
    switch (tool) {
    case ToolKind::Lynis: return "LYNIS";
    case ToolKind::OpenscapStandard: return "OPENSCAP_STANDARD";
    case ToolKind::Aide: return "AIDE";
    case ToolKind::Tripwire: return "TRIPWIRE";
    case ToolKind::OpenscapCis: return "OPENSCAP_CIS";
    case ToolKind::VulnScan: return "VULN_SCAN";
    }
    return "UNKNOWN";
}

std::string_view tool_display_name(ToolKind tool) noexcept
{
    switch (tool) {
    case ToolKind::Lynis: return "Lynis";
    case ToolKind::OpenscapStandard: return "OpenSCAP Standard";
    case ToolKind::Aide: return "AIDE";
    case ToolKind::Tripwire: return "Tripwire";
    case ToolKind::OpenscapCis: return "OpenSCAP CIS";
    case ToolKind::VulnScan: return "Vulnerability";
    }
    return "Unknown";
}

std::optional<ToolKind> parse_tool(std::string_view text) noexcept
{
    const std::string key = lower(text);
    if (key == "lynis") return ToolKind::Lynis;
    if (key == "openscap-standard" || key == "stig" || key == "standard")
        return ToolKind::OpenscapStandard;
    if (key == "aide") return ToolKind::Aide;
    if (key == "tripwire") return ToolKind::Tripwire;
    if (key == "openscap-cis" || key == "cis") return ToolKind::OpenscapCis;
    if (key == "vuln-scan" || key == "vuln" || key == "nmap") return ToolKind::VulnScan;
    return std::nullopt;
}

std::string_view severity_name(Severity severity) noexcept
{
    switch (severity) {
    case Severity::Critical: return "CRITICAL";
    case Severity::High: return "HIGH";
    case Severity::Medium: return "MEDIUM";
    case Severity::Low: return "LOW";
    }
    return "LOW";
}

std::optional<Severity> parse_severity(std::string_view text) noexcept
{
    const std::string key = lower(text);
    if (key == "critical") return Severity::Critical;
    if (key == "high") return Severity::High;
    if (key == "medium") return Severity::Medium;
    if (key == "low") return Severity::Low;
    return std::nullopt;
}

std::string_view profile_name(ScapProfile profile) noexcept
{
    return profile == ScapProfile::Standard ? "STANDARD" : "CIS";
}

WeightProfile WeightProfile::defaults()
{
    WeightProfile profile;
    profile.tool_weights = {
        {ToolKind::Lynis, 0.20},    {ToolKind::OpenscapStandard, 0.15},
        {ToolKind::Aide, 0.15},     {ToolKind::Tripwire, 0.15},
        {ToolKind::OpenscapCis, 0.20}, {ToolKind::VulnScan, 0.15},
    };
    profile.severity_weights = {
        {Severity::Critical, 15.0}, {Severity::High, 8.0},
        {Severity::Medium, 4.0},    {Severity::Low, 1.0},
    };
    return profile;
}

double WeightProfile::weight(ToolKind tool) const noexcept
{
    auto it = tool_weights.find(tool);
    return it == tool_weights.end() ? 0.0 : it->second;
}

double WeightProfile::severity_weight(Severity severity) const noexcept
{
    auto it = severity_weights.find(severity);
    return it == severity_weights.end() ? 0.0 : it->second;
}

std::optional<Error> validate_weights(const WeightProfile& profile)
{
    for (ToolKind tool : kAllTools) {
        if (!profile.tool_weights.contains(tool))
            return Error(ErrorCode::ToolMissing,
                         "no weight for " + std::string(tool_name(tool)));
    }
    for (const auto& [tool, weight] : profile.tool_weights) {
        if (!non_negative(weight)) {
            std::ostringstream msg;
            msg << "weight for " << tool_name(tool) << " is " << weight;
            return Error(ErrorCode::WeightNegative, msg.str());
        }
    }
    for (const auto& [severity, weight] : profile.severity_weights) {
        if (!non_negative(weight)) {
            std::ostringstream msg;
            msg << "severity weight for " << severity_name(severity) << " is " << weight;
            return Error(ErrorCode::WeightNegative, msg.str());
        }
    }
    const std::pair<const char*, double> penalties[] = {
        {"port_penalty", profile.port_penalty},
        {"confirmed_penalty", profile.confirmed_penalty},
        {"firewall_discount", profile.firewall_discount},
    };
    for (const auto& [name, value] : penalties) {
        if (!non_negative(value)) {
            std::ostringstream msg;
            msg << name << " is " << value;
            return Error(ErrorCode::WeightNegative, msg.str());
        }
    }

    double sum = 0.0;
    for (ToolKind tool : kAllTools)
        sum += profile.weight(tool);
    if (!(std::abs(sum - 1.0) <= kWeightSumTolerance)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "tool weights sum to " << sum << ", expected 1.00 (";
        bool first = true;
        for (ToolKind tool : kAllTools) {
            msg << (first ? "" : ", ") << tool_name(tool) << '=' << profile.weight(tool);
            first = false;
        }
        msg << ')';
        return Error(ErrorCode::WeightSumInvalid, msg.str());
    }
    return std::nullopt;
}

void require_valid_weights(const WeightProfile& profile)
{
    if (auto error = validate_weights(profile))
        throw *error;
}

bool same_tool_weights(const WeightProfile& a, const WeightProfile& b,
                       double tolerance) noexcept
{
    return std::all_of(kAllTools.begin(), kAllTools.end(), [&](ToolKind tool) {
        return a.tool_weights.contains(tool) == b.tool_weights.contains(tool)
            && std::abs(a.weight(tool) - b.weight(tool)) <= tolerance;
    });
}

} // namespace uca
