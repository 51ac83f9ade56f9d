#include "uca/parsers.hpp"
#include "uca/scoring.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

namespace uca {

namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kAttrKey = "<xmlattr>";

std::string trimmed(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

/// Element name without its namespace prefix ("xccdf:rule-result" -> "rule-result").
std::string_view local_name(std::string_view name)
{
    const auto colon = name.rfind(':');
    return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

bool is_element(std::string_view key)
{
    return key != kAttrKey && key != "<xmlcomment>" && key != "<xmltext>";
}

std::string attribute(const pt::ptree& node, const std::string& name)
{
    if (auto attrs = node.get_child_optional(std::string(kAttrKey))) {
        for (const auto& [key, value] : *attrs) {
            if (local_name(key) == name)
                return value.data();
        }
    }
    return {};
}

const pt::ptree* child(const pt::ptree& node, std::string_view name)
{
    for (const auto& [key, value] : node) {
        if (is_element(key) && local_name(key) == name)
            return &value;
    }
    return nullptr;
}

std::vector<const pt::ptree*> children(const pt::ptree& node, std::string_view name)
{
    std::vector<const pt::ptree*> out;
    for (const auto& [key, value] : node) {
        if (is_element(key) && local_name(key) == name)
            out.push_back(&value);
    }
    return out;
}

/// Depth-first collection of every element with local name `name`,
/// including `node`'s own children but not `node` itself.
void collect(const pt::ptree& node, std::string_view name, std::vector<const pt::ptree*>& out)
{
    for (const auto& [key, value] : node) {
        if (!is_element(key))
            continue;
        if (local_name(key) == name)
            out.push_back(&value);
        collect(value, name, out);
    }
}

pt::ptree read_document(std::string_view xml, std::string_view source)
{
    std::istringstream in{std::string(xml)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::MalformedXml, std::string(source) + ":" + std::to_string(e.line())
                                                 + ": " + e.message());
    }
    return tree;
}

std::optional<std::uint64_t> to_count(const std::string& text)
{
    const auto clean = trimmed(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), value);
    if (ec != std::errc() || ptr != clean.data() + clean.size() || clean.empty())
        return std::nullopt;
    return value;
}

std::optional<double> to_decimal(const std::string& text)
{
    const auto clean = trimmed(text);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), value);
    if (ec != std::errc() || ptr != clean.data() + clean.size() || clean.empty())
        return std::nullopt;
    return value;
}

std::string lowercase(std::string text)
{
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

} // namespace

// --- XCCDF ------------------------------------------------------------------

Parsed<ScapReport> parse_xccdf(std::string_view result_xml, ScapProfile profile,
                               std::string_view source)
{
    Parsed<ScapReport> result;
    result.report.profile = profile;
    result.diagnostics.source_path = std::string(source);
    result.diagnostics.tool = profile == ScapProfile::Standard ? ToolKind::OpenscapStandard
                                                               : ToolKind::OpenscapCis;
    auto& diag = result.diagnostics;

    const pt::ptree document = read_document(result_xml, source);

    std::vector<const pt::ptree*> test_results;
    collect(document, "TestResult", test_results);

    std::vector<const pt::ptree*> rule_results;
    std::string scope;
    if (!test_results.empty()) {
        if (test_results.size() > 1)
            diag.warnings.push_back(std::string(source) + ": " + std::to_string(test_results.size())
                                    + " TestResult elements; the last one is used");
        const pt::ptree& chosen = *test_results.back();
        rule_results = children(chosen, "rule-result");
        scope = "TestResult " + attribute(chosen, "id");
    } else {
        collect(document, "rule-result", rule_results);
        scope = "document";
        if (!rule_results.empty())
            diag.warnings.push_back(std::string(source) + ": no TestResult element; rule-results counted document-wide");
    }

    if (rule_results.empty())
        throw Error(ErrorCode::NoTestResult, std::string(source) + ": no rule-result elements");

    static const std::set<std::string> kExcluded = {
        "notapplicable", "notchecked", "notselected", "informational", "unknown",
    };

    std::size_t index = 0;
    for (const pt::ptree* rule : rule_results) {
        ++index;
        const std::string idref = attribute(*rule, "idref");
        const pt::ptree* result_node = child(*rule, "result");
        const std::string where = std::string(source) + ": " + scope + " rule-result #"
                                  + std::to_string(index) + (idref.empty() ? "" : " " + idref);
        if (!result_node) {
            diag.warnings.push_back(where + ": no result element; excluded");
            ++diag.excluded_tallies["(missing)"];
            continue;
        }
        const std::string value = lowercase(trimmed(result_node->data()));
        if (value == "pass" || value == "fixed") {
            ++result.report.pass_count;
        } else if (value == "fail" || value == "error") {
            ++result.report.fail_count;
        } else {
            if (!kExcluded.contains(value))
                diag.warnings.push_back(where + ": unrecognised result '" + value + "'; excluded");
            ++diag.excluded_tallies[value];
        }
        diag.provenance.push_back(where + ": " + value);
    }
    return result;
}

// --- nmap -------------------------------------------------------------------

namespace {

const std::regex& cve_regex()
{
    static const std::regex re(R"(CVE-\d{4}-\d{4,})");
    return re;
}

/// Scans structured `vulners` tables: every table carrying an `id` elem is
/// one candidate entry.
void collect_vulners_tables(const pt::ptree& node,
                            std::vector<std::pair<std::string, std::optional<double>>>& out)
{
    for (const pt::ptree* table : children(node, "table")) {
        std::string id, type, cvss_text;
        for (const pt::ptree* elem : children(*table, "elem")) {
            const std::string key = attribute(*elem, "key");
            if (key == "id") id = trimmed(elem->data());
            else if (key == "type") type = lowercase(trimmed(elem->data()));
            else if (key == "cvss") cvss_text = trimmed(elem->data());
        }
        if (!id.empty() && (type == "cve" || std::regex_match(id, cve_regex())))
            out.emplace_back(id, cvss_text.empty() ? std::nullopt : to_decimal(cvss_text));
        collect_vulners_tables(*table, out);
    }
}

std::string first_line_summary(const std::string& output)
{
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        auto text = trimmed(line);
        if (text.empty() || text == "VULNERABLE:")
            continue;
        if (text.size() > 200)
            text = text.substr(0, 200);
        return text;
    }
    return {};
}

Severity severity_for(std::optional<double> cvss, const std::optional<Severity>& keyword)
{
    if (cvss && *cvss >= 0.0 && *cvss <= 10.0)
        return classify_severity(*cvss);
    if (keyword)
        return *keyword;
    return Severity::Low;
}

struct ScriptContext {
    std::string source;
    std::optional<int> port;
    std::string location;
};

void extract_vulners(const pt::ptree& script, const ScriptContext& ctx,
                     std::vector<VulnFinding>& findings, ParseDiagnostics& diag)
{
    std::vector<std::pair<std::string, std::optional<double>>> entries;
    collect_vulners_tables(script, entries);

    if (entries.empty()) {
        static const std::regex line_re(R"((CVE-\d{4}-\d{4,})\s+(\d+(?:\.\d+)?))");
        const std::string output = attribute(script, "output");
        for (auto it = std::sregex_iterator(output.begin(), output.end(), line_re);
             it != std::sregex_iterator(); ++it)
            entries.emplace_back((*it)[1].str(), to_decimal((*it)[2].str()));
    }

    std::set<std::string> seen;
    for (auto& [id, cvss] : entries) {
        if (!seen.insert(id).second)
            continue;
        if (cvss && (*cvss < 0.0 || *cvss > 10.0)) {
            diag.warnings.push_back(ctx.location + ": " + id + " cvss out of range; ignored");
            cvss.reset();
        }
        VulnFinding finding;
        finding.identifier = id;
        finding.cvss = cvss;
        finding.severity = severity_for(cvss, std::nullopt);
        finding.confirmed = false;
        finding.port = ctx.port;
        finding.description = "vulners";
        diag.provenance.push_back(ctx.location + ": vulners " + id
                                  + (cvss ? " cvss " + std::to_string(*cvss) : std::string(" no cvss")));
        findings.push_back(std::move(finding));
    }
}

void extract_vuln_script(const pt::ptree& script, const std::string& script_id,
                         const ScriptContext& ctx, std::vector<VulnFinding>& findings,
                         ParseDiagnostics& diag)
{
    static const std::regex state_re(R"(State:\s*(NOT VULNERABLE|LIKELY VULNERABLE|VULNERABLE))");
    static const std::regex banner_re(R"((^|\n)\s*VULNERABLE:)");
    static const std::regex cvss_re(R"(CVSS(?:v[23](?:\.\d)?)?(?:\s+base\s+score)?\s*:?\s*(\d+(?:\.\d+)?))",
                                    std::regex::icase);
    static const std::regex risk_re(R"(Risk factor:\s*(critical|high|medium|low))", std::regex::icase);

    const std::string output = attribute(script, "output");
    std::smatch match;

    std::string state;
    if (std::regex_search(output, match, state_re))
        state = match[1].str();
    if (state == "NOT VULNERABLE") {
        diag.provenance.push_back(ctx.location + ": " + script_id + " reports NOT VULNERABLE; skipped");
        return;
    }
    const bool confirmed = state == "VULNERABLE" || std::regex_search(output, banner_re);

    std::string identifier;
    if (std::regex_search(output, match, cve_regex()))
        identifier = match[0].str();
    if (identifier.empty() && !confirmed && state.empty())
        return;
    if (identifier.empty())
        identifier = script_id;

    std::optional<double> cvss;
    if (std::regex_search(output, match, cvss_re)) {
        cvss = to_decimal(match[1].str());
        if (cvss && (*cvss < 0.0 || *cvss > 10.0)) {
            diag.warnings.push_back(ctx.location + ": " + script_id + " cvss out of range; ignored");
            cvss.reset();
        }
    }
    std::optional<Severity> keyword;
    if (std::regex_search(output, match, risk_re))
        keyword = parse_severity(match[1].str());

    VulnFinding finding;
    finding.identifier = identifier;
    finding.cvss = cvss;
    finding.severity = severity_for(cvss, keyword);
    finding.confirmed = confirmed;
    finding.port = ctx.port;
    finding.description = script_id;
    if (const auto title = first_line_summary(output); !title.empty())
        finding.description += ": " + title;

    diag.provenance.push_back(ctx.location + ": " + script_id + " -> " + identifier
                              + (confirmed ? " (confirmed)" : "") + " severity "
                              + std::string(severity_name(finding.severity)));
    findings.push_back(std::move(finding));
}

void extract_script(const pt::ptree& script, const ScriptContext& ctx,
                    std::vector<VulnFinding>& findings, ParseDiagnostics& diag)
{
    const std::string id = attribute(script, "id");
    if (id == "vulners") {
        extract_vulners(script, ctx, findings, diag);
        return;
    }
    const std::string output = attribute(script, "output");
    const bool vuln_like = id.find("vuln") != std::string::npos
                           || output.find("VULNERABLE") != std::string::npos
                           || std::regex_search(output, cve_regex());
    if (vuln_like)
        extract_vuln_script(script, id, ctx, findings, diag);
}

} // namespace

Parsed<VulnReport> parse_nmap(std::string_view scan_xml, std::optional<bool> firewall_override,
                              std::string_view source)
{
    Parsed<VulnReport> result;
    result.diagnostics.source_path = std::string(source);
    result.diagnostics.tool = ToolKind::VulnScan;
    auto& diag = result.diagnostics;
    auto& report = result.report;

    const pt::ptree document = read_document(scan_xml, source);
    const pt::ptree* run = child(document, "nmaprun");
    if (!run)
        throw Error(ErrorCode::MalformedXml, std::string(source) + ": root element is not nmaprun");

    const auto hosts = children(*run, "host");
    if (hosts.empty())
        throw Error(ErrorCode::NoHost, std::string(source) + ": no host element");
    if (hosts.size() > 1)
        diag.warnings.push_back(std::string(source) + ": " + std::to_string(hosts.size())
                                + " hosts; port and finding counts are summed");

    std::size_t host_index = 0;
    for (const pt::ptree* host : hosts) {
        ++host_index;
        std::string host_name = "host #" + std::to_string(host_index);
        if (const pt::ptree* address = child(*host, "address"))
            host_name += " " + attribute(*address, "addr");
        const std::string host_where = std::string(source) + ": " + host_name;

        if (const pt::ptree* ports = child(*host, "ports")) {
            for (const pt::ptree* extra : children(*ports, "extraports")) {
                const std::string state = attribute(*extra, "state");
                const auto count = to_count(attribute(*extra, "count"));
                if (!count) {
                    diag.warnings.push_back(host_where + ": extraports without a count ignored");
                    continue;
                }
                if (state == "filtered") {
                    report.filtered_ports += *count;
                    diag.provenance.push_back(host_where + ": extraports filtered count=" + std::to_string(*count));
                } else if (state == "open") {
                    report.open_ports += *count;
                    diag.provenance.push_back(host_where + ": extraports open count=" + std::to_string(*count));
                }
            }
            for (const pt::ptree* port : children(*ports, "port")) {
                const std::string portid = attribute(*port, "portid");
                const std::string protocol = attribute(*port, "protocol");
                std::optional<int> port_number;
                if (auto n = to_count(portid); n && *n >= 1 && *n <= 65535)
                    port_number = static_cast<int>(*n);
                const std::string where = host_where + " port " + portid + "/" + protocol;

                std::string state;
                if (const pt::ptree* state_node = child(*port, "state"))
                    state = attribute(*state_node, "state");
                if (state == "open") {
                    ++report.open_ports;
                    diag.provenance.push_back(where + ": open");
                } else if (state == "filtered") {
                    ++report.filtered_ports;
                    diag.provenance.push_back(where + ": filtered");
                } else if (state.empty()) {
                    diag.warnings.push_back(where + ": no state element");
                }

                for (const pt::ptree* script : children(*port, "script"))
                    extract_script(*script, ScriptContext{std::string(source), port_number, where},
                                   report.findings, diag);
            }
        }
        if (const pt::ptree* hostscript = child(*host, "hostscript")) {
            for (const pt::ptree* script : children(*hostscript, "script"))
                extract_script(*script, ScriptContext{std::string(source), std::nullopt, host_where + " hostscript"},
                               report.findings, diag);
        }
    }

    report.confirmed_count = static_cast<std::uint64_t>(
        std::count_if(report.findings.begin(), report.findings.end(),
                      [](const VulnFinding& f) { return f.confirmed; }));
    report.firewall_active = detect_firewall(report.open_ports, report.filtered_ports, firewall_override);
    return result;
}

} // namespace uca
