#include "uca/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace uca {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what)
{
    throw Error(ErrorCode::SerializationFailure, what);
}

ToolKind tool_key(const std::string& key, ErrorCode code)
{
    // Only canonical names are accepted in documents.
    for (ToolKind tool : kAllTools) {
        if (tool_name(tool) == key)
            return tool;
    }
    throw Error(code, "unknown tool '" + key + "'");
}

Severity severity_key(const std::string& key, ErrorCode code)
{
    for (Severity severity : kAllSeverities) {
        if (severity_name(severity) == key)
            return severity;
    }
    throw Error(code, "unknown severity '" + key + "'");
}

double finite(double value, const char* field)
{
    if (!std::isfinite(value))
        fail(std::string(field) + " is not a finite number");
    return value;
}

} // namespace

// --- timestamps -------------------------------------------------------------

std::string format_timestamp(Timestamp timestamp)
{
    using namespace std::chrono;
    const auto day = floor<days>(timestamp);
    const year_month_day ymd{day};
    const hh_mm_ss<nanoseconds> tod{timestamp - day};

    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02d:%02d:%02d",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
    std::string out = buffer;
    if (const auto nanos = tod.subseconds().count(); nanos != 0) {
        std::snprintf(buffer, sizeof buffer, ".%09lld", static_cast<long long>(nanos));
        std::string fraction = buffer;
        while (fraction.back() == '0')
            fraction.pop_back();
        out += fraction;
    }
    return out + "Z";
}

Timestamp parse_timestamp(std::string_view text)
{
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, consumed = 0;
    const std::string str(text);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6
        || consumed != 19)
        fail("bad timestamp '" + str + "'");

    long long nanos = 0;
    std::size_t pos = 19;
    if (pos < str.size() && str[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < str.size() && std::isdigit(static_cast<unsigned char>(str[pos]))) {
            if (digits < 9) {
                nanos = nanos * 10 + (str[pos] - '0');
                ++digits;
            }
            ++pos;
        }
        if (digits == 0)
            fail("bad timestamp fraction '" + str + "'");
        for (; digits < 9; ++digits)
            nanos *= 10;
    }
    if (pos + 1 != str.size() || str[pos] != 'Z')
        fail("timestamp must end in Z: '" + str + "'");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60)
        fail("timestamp out of range '" + str + "'");
    return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s}
                     + nanoseconds{nanos}};
}

// --- raw reports ------------------------------------------------------------

json to_json(const VulnFinding& finding)
{
    json out{
        {"identifier", finding.identifier},
        {"severity", severity_name(finding.severity)},
        {"confirmed", finding.confirmed},
        {"description", finding.description},
    };
    out["cvss"] = finding.cvss ? json(finite(*finding.cvss, "cvss")) : json(nullptr);
    out["port"] = finding.port ? json(*finding.port) : json(nullptr);
    return out;
}

VulnFinding finding_from_json(const json& in)
{
    VulnFinding finding;
    finding.identifier = in.at("identifier").get<std::string>();
    finding.severity = severity_key(in.at("severity").get<std::string>(), ErrorCode::SerializationFailure);
    finding.confirmed = in.at("confirmed").get<bool>();
    finding.description = in.value("description", "");
    if (in.contains("cvss") && !in["cvss"].is_null())
        finding.cvss = in["cvss"].get<double>();
    if (in.contains("port") && !in["port"].is_null())
        finding.port = in["port"].get<int>();
    return finding;
}

json to_json(const RawToolReport& report)
{
    struct Visitor {
        json operator()(const LynisReport& r) const
        {
            return {{"kind", "lynis"}, {"hardening_index", r.hardening_index}};
        }
        json operator()(const ScapReport& r) const
        {
            return {{"kind", "xccdf"}, {"profile", profile_name(r.profile)},
                    {"pass_count", r.pass_count}, {"fail_count", r.fail_count}};
        }
        json operator()(const AideReport& r) const
        {
            return {{"kind", "aide"}, {"added", r.added}, {"removed", r.removed},
                    {"changed", r.changed}, {"total", r.total()}};
        }
        json operator()(const TripwireReport& r) const
        {
            return {{"kind", "tripwire"}, {"objects_scanned", r.objects_scanned},
                    {"violations", r.violations}};
        }
        json operator()(const VulnReport& r) const
        {
            json findings = json::array();
            for (const auto& f : r.findings)
                findings.push_back(to_json(f));
            return {{"kind", "nmap"}, {"open_ports", r.open_ports},
                    {"filtered_ports", r.filtered_ports}, {"firewall_active", r.firewall_active},
                    {"confirmed_count", r.confirmed_count}, {"findings", std::move(findings)}};
        }
        json operator()(const SuppliedScore&) const { return {{"kind", "supplied"}}; }
    };
    return std::visit(Visitor{}, report);
}

RawToolReport raw_report_from_json(const json& in)
{
    const auto kind = in.at("kind").get<std::string>();
    if (kind == "lynis")
        return LynisReport{in.at("hardening_index").get<int>()};
    if (kind == "xccdf") {
        const auto profile = in.at("profile").get<std::string>();
        if (profile != "STANDARD" && profile != "CIS")
            fail("unknown xccdf profile '" + profile + "'");
        return ScapReport{profile == "STANDARD" ? ScapProfile::Standard : ScapProfile::Cis,
                          in.at("pass_count").get<std::uint64_t>(),
                          in.at("fail_count").get<std::uint64_t>()};
    }
    if (kind == "aide")
        return AideReport{in.at("added").get<std::uint64_t>(), in.at("removed").get<std::uint64_t>(),
                          in.at("changed").get<std::uint64_t>()};
    if (kind == "tripwire")
        return TripwireReport{in.at("objects_scanned").get<std::uint64_t>(),
                              in.at("violations").get<std::uint64_t>()};
    if (kind == "nmap") {
        VulnReport r;
        r.open_ports = in.at("open_ports").get<std::uint64_t>();
        r.filtered_ports = in.at("filtered_ports").get<std::uint64_t>();
        r.firewall_active = in.at("firewall_active").get<bool>();
        r.confirmed_count = in.at("confirmed_count").get<std::uint64_t>();
        for (const auto& f : in.at("findings"))
            r.findings.push_back(finding_from_json(f));
        return r;
    }
    if (kind == "supplied")
        return SuppliedScore{};
    fail("unknown raw report kind '" + kind + "'");
}

// --- weights ----------------------------------------------------------------

json to_json(const WeightProfile& profile)
{
    json tools = json::object();
    for (const auto& [tool, weight] : profile.tool_weights)
        tools[std::string(tool_name(tool))] = finite(weight, "tool weight");
    json severity = json::object();
    for (const auto& [sev, weight] : profile.severity_weights)
        severity[std::string(severity_name(sev))] = finite(weight, "severity weight");
    return {
        {"tools", std::move(tools)},
        {"severity", std::move(severity)},
        {"port_penalty", finite(profile.port_penalty, "port_penalty")},
        {"confirmed_penalty", finite(profile.confirmed_penalty, "confirmed_penalty")},
        {"firewall_discount", finite(profile.firewall_discount, "firewall_discount")},
    };
}

WeightProfile weights_from_json(const json& in, const WeightProfile& base)
{
    if (!in.is_object())
        throw Error(ErrorCode::ConfigInvalid, "weights must be an object");
    const auto number = [](const json& value, const std::string& what) {
        if (!value.is_number())
            throw Error(ErrorCode::ConfigInvalid, what + " must be a number");
        return value.get<double>();
    };

    WeightProfile profile = base;
    for (const auto& [key, value] : in.items()) {
        if (key == "tools") {
            if (!value.is_object())
                throw Error(ErrorCode::ConfigInvalid, "weights.tools must be an object");
            for (const auto& [name, weight] : value.items())
                profile.tool_weights[tool_key(name, ErrorCode::ConfigInvalid)] = number(weight, "weights.tools." + name);
        } else if (key == "severity") {
            if (!value.is_object())
                throw Error(ErrorCode::ConfigInvalid, "weights.severity must be an object");
            for (const auto& [name, weight] : value.items())
                profile.severity_weights[severity_key(name, ErrorCode::ConfigInvalid)]
                    = number(weight, "weights.severity." + name);
        } else if (key == "port_penalty") {
            profile.port_penalty = number(value, "weights.port_penalty");
        } else if (key == "confirmed_penalty") {
            profile.confirmed_penalty = number(value, "weights.confirmed_penalty");
        } else if (key == "firewall_discount") {
            profile.firewall_discount = number(value, "weights.firewall_discount");
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown weights key '" + key + "'");
        }
    }
    return profile;
}

// --- scores and assessments -------------------------------------------------

json to_json(const NormalizedScore& score)
{
    return {{"value", finite(score.value, "score")}, {"raw", to_json(score.raw)}};
}

NormalizedScore score_from_json(ToolKind tool, const json& in)
{
    NormalizedScore score;
    score.tool = tool;
    score.value = in.at("value").get<double>();
    score.raw = raw_report_from_json(in.at("raw"));
    if (!(score.value >= 0.0 && score.value <= 100.0))
        fail(std::string(tool_name(tool)) + " score outside 0-100");
    return score;
}

json to_json(const CompositeAssessment& assessment)
{
    json scores = json::object();
    for (const auto& [tool, score] : assessment.scores)
        scores[std::string(tool_name(tool))] = to_json(score);
    json contributions = json::object();
    for (const auto& [tool, value] : assessment.contributions)
        contributions[std::string(tool_name(tool))] = finite(value, "contribution");
    return {
        {"label", assessment.label},
        {"timestamp", format_timestamp(assessment.timestamp)},
        {"composite", finite(assessment.composite, "composite")},
        {"weights", to_json(assessment.weights)},
        {"scores", std::move(scores)},
        {"contributions", std::move(contributions)},
    };
}

CompositeAssessment assessment_from_json(const json& in)
{
    try {
        CompositeAssessment assessment;
        assessment.label = in.at("label").get<std::string>();
        assessment.timestamp = parse_timestamp(in.at("timestamp").get<std::string>());
        assessment.composite = in.at("composite").get<double>();
        assessment.weights = weights_from_json(in.at("weights"), WeightProfile{});
        for (const auto& [name, value] : in.at("scores").items()) {
            const ToolKind tool = tool_key(name, ErrorCode::SerializationFailure);
            assessment.scores.emplace(tool, score_from_json(tool, value));
        }
        for (const auto& [name, value] : in.at("contributions").items())
            assessment.contributions[tool_key(name, ErrorCode::SerializationFailure)] = value.get<double>();
        for (ToolKind tool : kAllTools) {
            if (!assessment.scores.contains(tool) || !assessment.contributions.contains(tool))
                fail("assessment lacks " + std::string(tool_name(tool)));
        }
        return assessment;
    } catch (const json::exception& e) {
        fail(std::string("assessment: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SerializationFailure)
            throw;
        fail(e.what());
    }
}

json to_json(const ParseDiagnostics& diagnostics)
{
    json excluded = json::object();
    for (const auto& [value, count] : diagnostics.excluded_tallies)
        excluded[value] = count;
    return {
        {"source", diagnostics.source_path},
        {"tool", tool_name(diagnostics.tool)},
        {"warnings", diagnostics.warnings},
        {"provenance", diagnostics.provenance},
        {"excluded", std::move(excluded)},
    };
}

} // namespace uca
