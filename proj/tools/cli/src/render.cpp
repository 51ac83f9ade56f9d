#include "uca/cli/render.hpp"

#include "uca/scoring.hpp"
#include "uca/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace uca::cli {

using nlohmann::json;

std::string fixed(double value, int decimals)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    std::string out = buffer;
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos)
        out.erase(0, 1);
    return out;
}

std::string signed_fixed(double value, int decimals)
{
    std::string out = fixed(value, decimals);
    if (out.front() != '-' && out.find_first_not_of("0.") != std::string::npos)
        out.insert(out.begin(), '+');
    return out;
}

namespace {

std::string pad_right(const std::string& text, std::size_t width)
{
    return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string pad_left(const std::string& text, std::size_t width)
{
    return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

std::string percent(double fraction) { return fixed(fraction * 100.0, 1) + "%"; }

/// "+7.00 pts (+11.9%)"; the relative part is omitted from a zero start.
std::string change_cell(double first, double last)
{
    std::string out = signed_fixed(last - first, 2) + " pts";
    if (first != 0.0)
        out += " (" + signed_fixed((last - first) / first * 100.0, 1) + "%)";
    return out;
}

std::string markdown_report(const std::vector<HistoryRecord>& records)
{
    std::ostringstream out;
    const bool multi = records.size() >= 2;

    out << "# Compliance assessment report\n\n";
    out << "| Tool | Weight |";
    for (const auto& r : records)
        out << ' ' << r.assessment.label << " |";
    if (multi)
        out << " Change |";
    out << "\n|:-----|-----:|";
    for (std::size_t i = 0; i < records.size(); ++i)
        out << "-----:|";
    if (multi)
        out << ":-----|";
    out << '\n';

    const auto& first = records.front().assessment;
    const auto& last = records.back().assessment;
    for (ToolKind tool : kAllTools) {
        out << "| " << tool_display_name(tool) << " | " << fixed(first.weights.weight(tool), 2) << " |";
        for (const auto& r : records)
            out << ' ' << fixed(r.assessment.scores.at(tool).value, 2) << " |";
        if (multi)
            out << ' ' << change_cell(first.scores.at(tool).value, last.scores.at(tool).value) << " |";
        out << '\n';
    }
    out << "| **Composite** | **1.00** |";
    for (const auto& r : records)
        out << " **" << fixed(r.assessment.composite, 2) << "** |";
    if (multi)
        out << " **" << change_cell(first.composite, last.composite) << "** |";
    out << '\n';

    if (!multi)
        return out.str();

    std::vector<CompositeAssessment> assessments;
    for (const auto& r : records)
        assessments.push_back(r.assessment);
    const TrendTable trend = trend_series(assessments);

    out << "\n## Trends\n\n| Tool | Direction |\n|:-----|:-----|\n";
    for (ToolKind tool : kAllTools)
        out << "| " << tool_display_name(tool) << " | " << direction_name(trend.directions.at(tool)) << " |\n";
    out << "| **Composite** | **" << direction_name(trend.composite_direction) << "** |\n";

    const DeltaDecomposition decomposition = decompose_delta(first, last);
    out << "\n## Change decomposition (" << first.label << " -> " << last.label << ")\n\n";
    out << "| Tool | Weighted delta | Share |\n|:-----|-----:|-----:|\n";
    for (const auto& entry : rank_contributions(decomposition)) {
        out << "| " << tool_display_name(entry.tool) << " | " << signed_fixed(entry.delta, 2) << " | "
            << (entry.share ? percent(*entry.share) : std::string("-")) << " |\n";
    }
    out << "\nTotal change: " << signed_fixed(decomposition.total_delta, 2) << " pts.";
    if (decomposition.dominant_share) {
        out << " Dominant driver: " << tool_display_name(decomposition.dominant_tool) << ' '
            << signed_fixed(decomposition.per_tool_delta.at(decomposition.dominant_tool), 2) << " ("
            << percent(*decomposition.dominant_share) << ").";
    } else {
        out << " No dominant driver.";
    }
    out << '\n';
    return out.str();
}

std::string text_report(const std::vector<HistoryRecord>& records)
{
    std::ostringstream out;
    const bool multi = records.size() >= 2;
    constexpr std::size_t kToolWidth = 20;
    constexpr std::size_t kCellWidth = 12;

    out << pad_right("tool", kToolWidth) << pad_left("weight", 8);
    for (const auto& r : records)
        out << pad_left(r.assessment.label, kCellWidth);
    if (multi)
        out << "  change";
    out << '\n';

    const auto& first = records.front().assessment;
    const auto& last = records.back().assessment;
    for (ToolKind tool : kAllTools) {
        out << pad_right(std::string(tool_name(tool)), kToolWidth) << pad_left(fixed(first.weights.weight(tool), 2), 8);
        for (const auto& r : records)
            out << pad_left(fixed(r.assessment.scores.at(tool).value, 2), kCellWidth);
        if (multi)
            out << "  " << change_cell(first.scores.at(tool).value, last.scores.at(tool).value);
        out << '\n';
    }
    out << pad_right("COMPOSITE", kToolWidth) << pad_left("1.00", 8);
    for (const auto& r : records)
        out << pad_left(fixed(r.assessment.composite, 2), kCellWidth);
    if (multi)
        out << "  " << change_cell(first.composite, last.composite);
    out << '\n';

    if (!multi)
        return out.str();

    std::vector<CompositeAssessment> assessments;
    for (const auto& r : records)
        assessments.push_back(r.assessment);
    const TrendTable trend = trend_series(assessments);
    out << "\ntrends:\n";
    for (ToolKind tool : kAllTools)
        out << "  " << pad_right(std::string(tool_name(tool)), kToolWidth) << direction_name(trend.directions.at(tool)) << '\n';
    out << "  " << pad_right("COMPOSITE", kToolWidth) << direction_name(trend.composite_direction) << "\n\n";
    out << render_decomposition_text(decompose_delta(first, last));
    return out.str();
}

json trend_json(const TrendTable& trend)
{
    json series = json::object();
    json directions = json::object();
    for (ToolKind tool : kAllTools) {
        series[std::string(tool_name(tool))] = trend.series.at(tool);
        directions[std::string(tool_name(tool))] = direction_name(trend.directions.at(tool));
    }
    return {
        {"labels", trend.labels},
        {"series", std::move(series)},
        {"directions", std::move(directions)},
        {"composite", trend.composite},
        {"composite_direction", direction_name(trend.composite_direction)},
    };
}

std::string json_report(const std::vector<HistoryRecord>& records)
{
    json out = json::object();
    json assessments = json::array();
    for (const auto& record : records)
        assessments.push_back(json::parse(serialize_record(record)));
    out["assessments"] = std::move(assessments);
    if (records.size() >= 2) {
        std::vector<CompositeAssessment> list;
        for (const auto& r : records)
            list.push_back(r.assessment);
        out["trend"] = trend_json(trend_series(list));
        out["decomposition"] = decomposition_json(decompose_delta(list.front(), list.back()));
    }
    return out.dump(2) + "\n";
}

} // namespace

std::string render_raw_text(const RawToolReport& report)
{
    std::ostringstream out;
    struct Visitor {
        std::ostringstream& out;
        void operator()(const LynisReport& r) { out << "hardening_index: " << r.hardening_index << '\n'; }
        void operator()(const ScapReport& r)
        {
            out << "profile: " << profile_name(r.profile) << '\n'
                << "pass: " << r.pass_count << '\n'
                << "fail: " << r.fail_count << '\n';
        }
        void operator()(const AideReport& r)
        {
            out << "added: " << r.added << '\n'
                << "removed: " << r.removed << '\n'
                << "changed: " << r.changed << '\n'
                << "total_changes: " << r.total() << '\n';
        }
        void operator()(const TripwireReport& r)
        {
            out << "objects_scanned: " << r.objects_scanned << '\n'
                << "violations: " << r.violations << '\n';
        }
        void operator()(const VulnReport& r)
        {
            out << "open_ports: " << r.open_ports << '\n'
                << "filtered_ports: " << r.filtered_ports << '\n'
                << "firewall_active: " << (r.firewall_active ? "yes" : "no") << '\n'
                << "confirmed: " << r.confirmed_count << '\n'
                << "findings: " << r.findings.size() << '\n';
            for (const auto& f : r.findings) {
                out << "  - " << f.identifier << ' ' << severity_name(f.severity);
                if (f.cvss)
                    out << " cvss " << fixed(*f.cvss, 1);
                if (f.port)
                    out << " port " << *f.port;
                if (f.confirmed)
                    out << " confirmed";
                out << '\n';
            }
        }
        void operator()(const SuppliedScore&) { out << "supplied: yes\n"; }
    };
    std::visit(Visitor{out}, report);
    return out.str();
}

std::string render_assessment_text(const CompositeAssessment& assessment, const std::string& host)
{
    std::ostringstream out;
    out << "assessment: " << assessment.label << '\n';
    if (!host.empty())
        out << "host: " << host << '\n';
    out << pad_right("tool", 20) << pad_left("score", 8) << pad_left("weight", 8) << pad_left("contribution", 14) << '\n';
    for (ToolKind tool : kAllTools) {
        const auto& score = assessment.scores.at(tool);
        out << pad_right(std::string(tool_name(tool)), 20) << pad_left(fixed(score.value, 2), 8)
            << pad_left(fixed(assessment.weights.weight(tool), 2), 8)
            << pad_left(fixed(assessment.contributions.at(tool), 2), 14);
        if (std::holds_alternative<SuppliedScore>(score.raw))
            out << "  (supplied)";
        out << '\n';
    }
    out << "composite: " << fixed(assessment.composite, 2) << '\n';
    return out.str();
}

std::string render_decomposition_text(const DeltaDecomposition& decomposition)
{
    std::ostringstream out;
    out << "compare: " << decomposition.from_label << " -> " << decomposition.to_label << '\n';
    out << pad_right("tool", 20) << pad_left("delta", 10) << pad_left("share", 10) << '\n';
    for (const auto& entry : rank_contributions(decomposition)) {
        out << pad_right(std::string(tool_name(entry.tool)), 20) << pad_left(signed_fixed(entry.delta, 2), 10)
            << pad_left(entry.share ? percent(*entry.share) : std::string("-"), 10) << '\n';
    }
    out << "total delta: " << signed_fixed(decomposition.total_delta, 2) << '\n';
    if (decomposition.dominant_share) {
        out << "dominant: " << tool_name(decomposition.dominant_tool) << ' '
            << signed_fixed(decomposition.per_tool_delta.at(decomposition.dominant_tool), 2) << " ("
            << percent(*decomposition.dominant_share) << ")\n";
    } else {
        out << "no dominant driver\n";
    }
    return out.str();
}

json decomposition_json(const DeltaDecomposition& decomposition)
{
    json ranked = json::array();
    for (const auto& entry : rank_contributions(decomposition)) {
        ranked.push_back({
            {"tool", tool_name(entry.tool)},
            {"delta", entry.delta},
            {"share", entry.share ? json(*entry.share) : json(nullptr)},
        });
    }
    json dominant = nullptr;
    if (decomposition.dominant_share) {
        dominant = {
            {"tool", tool_name(decomposition.dominant_tool)},
            {"delta", decomposition.per_tool_delta.at(decomposition.dominant_tool)},
            {"share", *decomposition.dominant_share},
        };
    }
    return {
        {"from", decomposition.from_label},
        {"to", decomposition.to_label},
        {"per_tool", std::move(ranked)},
        {"total_delta", decomposition.total_delta},
        {"dominant", std::move(dominant)},
    };
}

std::string render_report(const std::vector<HistoryRecord>& records, ReportFormat format)
{
    if (records.empty())
        throw Error(ErrorCode::TooFewAssessments, "report needs at least one assessment");
    switch (format) {
    case ReportFormat::Markdown: return markdown_report(records);
    case ReportFormat::Json: return json_report(records);
    case ReportFormat::Text: return text_report(records);
    }
    return {};
}

} // namespace uca::cli
