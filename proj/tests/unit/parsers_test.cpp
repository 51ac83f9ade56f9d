#include "test_util.hpp"

#include "report_writers.hpp"

#include "uca/parsers.hpp"

using namespace uca;
using uca::testing::fixture_dir;

namespace {

std::filesystem::path level_file(const std::string& level, const std::string& name)
{
    return fixture_dir() / "hardening" / level / name;
}

std::string xccdf_with(const std::string& body)
{
    return "<?xml version=\"1.0\"?>\n<Benchmark xmlns=\"http://checklists.nist.gov/xccdf/1.2\">\n" + body
           + "</Benchmark>\n";
}

std::string rule(const std::string& result)
{
    return "<rule-result idref=\"r\"><result>" + result + "</result></rule-result>\n";
}

std::string nmap_with(const std::string& host_body)
{
    return "<?xml version=\"1.0\"?>\n<nmaprun scanner=\"nmap\"><host><address addr=\"10.0.0.1\" addrtype=\"ipv4\"/>"
           + host_body + "</host></nmaprun>\n";
}

} // namespace

// --- Lynis -------------------------------------------------------------------

TEST(LynisParser, ReadsHardeningIndex)
{
    const auto parsed = parse_lynis("# comment\nos=Linux\nhardening_index=59\n");
    EXPECT_EQ(parsed.report.hardening_index, 59);
    EXPECT_TRUE(parsed.diagnostics.warnings.empty());
    ASSERT_EQ(parsed.diagnostics.provenance.size(), 1u);
    EXPECT_NE(parsed.diagnostics.provenance[0].find("<memory>:3"), std::string::npos);
}

TEST(LynisParser, RepeatedKeyUsesLastWithWarning)
{
    const auto parsed = parse_lynis("hardening_index=40\nhardening_index=61\n");
    EXPECT_EQ(parsed.report.hardening_index, 61);
    EXPECT_EQ(parsed.diagnostics.warnings.size(), 1u);
}

TEST(LynisParser, ToleratesCrlfAndSpaces)
{
    EXPECT_EQ(parse_lynis("hardening_index = 66\r\n").report.hardening_index, 66);
}

TEST(LynisParser, Errors)
{
    EXPECT_UCA_ERROR(parse_lynis("os=Linux\n"), ErrorCode::KeyMissing);
    EXPECT_UCA_ERROR(parse_lynis(""), ErrorCode::KeyMissing);
    EXPECT_UCA_ERROR(parse_lynis("hardening_index=abc\n"), ErrorCode::ValueNotInteger);
    EXPECT_UCA_ERROR(parse_lynis("hardening_index=59.5\n"), ErrorCode::ValueNotInteger);
    EXPECT_UCA_ERROR(parse_lynis("hardening_index=101\n"), ErrorCode::ValueOutOfRange);
    EXPECT_UCA_ERROR(parse_lynis("hardening_index=-1\n"), ErrorCode::ValueOutOfRange);
    EXPECT_UCA_ERROR(parse_lynis("hardening_index=99999999999999999999999\n"), ErrorCode::ValueOutOfRange);
}

// --- XCCDF -------------------------------------------------------------------

TEST(XccdfParser, CountsPassAndFail)
{
    const auto parsed = parse_report_file(ToolKind::OpenscapStandard, level_file("baseline", "openscap-standard.xml"));
    EXPECT_EQ(std::get<ScapReport>(parsed.report), (ScapReport{ScapProfile::Standard, 29, 14}));
    EXPECT_EQ(parsed.diagnostics.excluded_tallies.at("notapplicable"), 3u);
    EXPECT_EQ(parsed.diagnostics.excluded_tallies.at("notchecked"), 1u);

    const auto cis = parse_report_file(ToolKind::OpenscapCis, level_file("baseline", "openscap-cis.xml"));
    EXPECT_EQ(std::get<ScapReport>(cis.report), (ScapReport{ScapProfile::Cis, 137, 100}));
}

TEST(XccdfParser, FixedAndErrorCount)
{
    const std::string xml = xccdf_with("<TestResult id=\"t\">" + rule("pass") + rule("fixed") + rule("fail")
                                       + rule("error") + rule("error") + rule("informational")
                                       + rule("notselected") + "</TestResult>");
    const auto parsed = parse_xccdf(xml, ScapProfile::Cis);
    EXPECT_EQ(parsed.report.pass_count, 2u);
    EXPECT_EQ(parsed.report.fail_count, 3u);
    EXPECT_EQ(parsed.diagnostics.excluded_tallies.at("informational"), 1u);
    EXPECT_EQ(parsed.diagnostics.excluded_tallies.at("notselected"), 1u);
}

TEST(XccdfParser, LastTestResultWins)
{
    const std::string xml = xccdf_with("<TestResult id=\"a\">" + rule("fail") + "</TestResult>"
                                       + "<TestResult id=\"b\">" + rule("pass") + rule("pass") + "</TestResult>");
    const auto parsed = parse_xccdf(xml, ScapProfile::Standard);
    EXPECT_EQ(parsed.report.pass_count, 2u);
    EXPECT_EQ(parsed.report.fail_count, 0u);
    EXPECT_FALSE(parsed.diagnostics.warnings.empty());
}

TEST(XccdfParser, WithoutNamespaceOrTestResult)
{
    const std::string xml = "<Benchmark><Group>" + rule("pass") + rule("fail") + "</Group></Benchmark>";
    const auto parsed = parse_xccdf(xml, ScapProfile::Standard);
    EXPECT_EQ(parsed.report.pass_count, 1u);
    EXPECT_EQ(parsed.report.fail_count, 1u);
}

TEST(XccdfParser, Errors)
{
    EXPECT_UCA_ERROR(parse_xccdf("<Benchmark><TestResult>", ScapProfile::Standard), ErrorCode::MalformedXml);
    EXPECT_UCA_ERROR(parse_xccdf("not xml at all", ScapProfile::Standard), ErrorCode::MalformedXml);
    EXPECT_UCA_ERROR(parse_xccdf(xccdf_with("<TestResult id=\"t\"/>"), ScapProfile::Standard),
                     ErrorCode::NoTestResult);
}

TEST(XccdfParser, ExcludedOnlyIsCountedAsEmpty)
{
    // Parsing succeeds; scoring reports the empty denominator.
    const auto parsed = parse_xccdf(xccdf_with("<TestResult id=\"t\">" + rule("notapplicable") + "</TestResult>"),
                                    ScapProfile::Standard);
    EXPECT_EQ(parsed.report.pass_count + parsed.report.fail_count, 0u);
}

// --- AIDE --------------------------------------------------------------------

TEST(AideParser, ReadsSummary)
{
    const auto parsed = parse_report_file(ToolKind::Aide, level_file("full", "aide-check.txt"));
    EXPECT_EQ(std::get<AideReport>(parsed.report), (AideReport{129, 0, 188}));
}

TEST(AideParser, NoDifferences)
{
    const auto a = parse_aide("AIDE found NO differences between database and filesystem. Looks okay!!\n");
    EXPECT_EQ(a.report.total(), 0u);
    const auto b = parse_aide("All files match AIDE database. Looks okay!\n");
    EXPECT_EQ(b.report.total(), 0u);
}

TEST(AideParser, SummaryBeatsMarker)
{
    const auto parsed = parse_aide("All files match AIDE database\nAdded entries: 1\nRemoved entries: 2\n"
                                   "Changed entries: 3\n");
    EXPECT_EQ(parsed.report, (AideReport{1, 2, 3}));
    EXPECT_EQ(parsed.diagnostics.warnings.size(), 1u);
}

TEST(AideParser, Errors)
{
    EXPECT_UCA_ERROR(parse_aide("Added entries: 1\nChanged entries: 3\n"), ErrorCode::SummaryMissing);
    EXPECT_UCA_ERROR(parse_aide("nothing here\n"), ErrorCode::SummaryMissing);
}

// --- Tripwire ------------------------------------------------------------------

TEST(TripwireParser, ReadsGroupedNumbers)
{
    const auto parsed = parse_report_file(ToolKind::Tripwire, level_file("baseline", "tripwire-check.txt"));
    EXPECT_EQ(std::get<TripwireReport>(parsed.report), (TripwireReport{76472, 13459}));
}

TEST(TripwireParser, Errors)
{
    EXPECT_UCA_ERROR(parse_tripwire("Total objects scanned: 10\n"), ErrorCode::SummaryMissing);
    EXPECT_UCA_ERROR(parse_tripwire("Total violations found: 10\n"), ErrorCode::SummaryMissing);
    EXPECT_UCA_ERROR(parse_tripwire("Total objects scanned: 10\nTotal violations found: 11\n"),
                     ErrorCode::ViolationsExceedObjects);
}

// --- nmap --------------------------------------------------------------------

TEST(NmapParser, BaselineFixture)
{
    const auto parsed = parse_report_file(ToolKind::VulnScan, level_file("baseline", "nmap-scan.xml"));
    const auto& report = std::get<VulnReport>(parsed.report);
    EXPECT_EQ(report.open_ports, 2u);
    EXPECT_EQ(report.filtered_ports, 0u);
    EXPECT_FALSE(report.firewall_active);
    EXPECT_EQ(report.confirmed_count, 4u);
    std::map<Severity, int> unconfirmed;
    for (const auto& f : report.findings)
        if (!f.confirmed)
            ++unconfirmed[f.severity];
    EXPECT_EQ(unconfirmed[Severity::Critical], 2);
    EXPECT_EQ(unconfirmed[Severity::High], 3);
    EXPECT_EQ(unconfirmed[Severity::Medium], 0);
    EXPECT_EQ(unconfirmed[Severity::Low], 0);
}

TEST(NmapParser, HardenedFixtureDetectsFirewall)
{
    const auto parsed = parse_report_file(ToolKind::VulnScan, level_file("full", "nmap-scan.xml"));
    const auto& report = std::get<VulnReport>(parsed.report);
    EXPECT_EQ(report.open_ports, 1u);
    EXPECT_EQ(report.filtered_ports, 65534u);
    EXPECT_TRUE(report.firewall_active);
    EXPECT_EQ(report.confirmed_count, 0u);
    EXPECT_EQ(report.findings.size(), 8u);
}

TEST(NmapParser, FirewallOverride)
{
    const auto path = level_file("full", "nmap-scan.xml");
    const auto off = parse_report_file(ToolKind::VulnScan, path, ParseOptions{false});
    EXPECT_FALSE(std::get<VulnReport>(off.report).firewall_active);
    EXPECT_TRUE(detect_firewall(0, kFirewallFilteredThreshold));
    EXPECT_FALSE(detect_firewall(0, kFirewallFilteredThreshold - 1));
    EXPECT_TRUE(detect_firewall(0, 0, true));
}

TEST(NmapParser, VulnScriptStates)
{
    const std::string xml = nmap_with(
        "<ports><port protocol=\"tcp\" portid=\"80\"><state state=\"open\"/>"
        "<script id=\"http-vuln-cve2017-5638\" output=\"&#xa;  VULNERABLE:&#xa;  Apache Struts RCE&#xa;"
        "    State: VULNERABLE&#xa;    IDs:  CVE:CVE-2017-5638&#xa;    CVSS: 10.0&#xa;\"/>"
        "<script id=\"http-vuln-cve2015-1635\" output=\"&#xa;  HTTP.sys RCE&#xa;    State: NOT VULNERABLE&#xa;"
        "    IDs:  CVE:CVE-2015-1635&#xa;\"/>"
        "<script id=\"http-slowloris-check\" output=\"&#xa;  Slowloris&#xa;    State: LIKELY VULNERABLE&#xa;"
        "    IDs:  CVE:CVE-2007-6750&#xa;    Risk factor: Medium&#xa;\"/>"
        "<script id=\"http-title\" output=\"Welcome\"/>"
        "</port><port protocol=\"tcp\" portid=\"81\"><state state=\"closed\"/></port></ports>");
    const auto parsed = parse_nmap(xml);
    const auto& report = parsed.report;
    EXPECT_EQ(report.open_ports, 1u);
    ASSERT_EQ(report.findings.size(), 2u);
    EXPECT_EQ(report.findings[0].identifier, "CVE-2017-5638");
    EXPECT_TRUE(report.findings[0].confirmed);
    EXPECT_EQ(report.findings[0].severity, Severity::Critical);
    EXPECT_EQ(report.findings[0].port, 80);
    EXPECT_EQ(report.findings[1].identifier, "CVE-2007-6750");
    EXPECT_FALSE(report.findings[1].confirmed);
    EXPECT_EQ(report.findings[1].severity, Severity::Medium);
    EXPECT_EQ(report.confirmed_count, 1u);
}

TEST(NmapParser, VulnersTextFallbackAndDuplicates)
{
    const std::string xml = nmap_with(
        "<ports><port protocol=\"tcp\" portid=\"22\"><state state=\"open\"/>"
        "<script id=\"vulners\" output=\"&#xa;  cpe:/a:openbsd:openssh:8.9p1:&#xa;"
        "    CVE-2023-38408&#x9;9.8&#x9;https://vulners.com/cve/CVE-2023-38408&#xa;"
        "    CVE-2023-38408&#x9;9.8&#x9;https://vulners.com/cve/CVE-2023-38408&#xa;"
        "    CVE-2023-48795&#x9;5.9&#x9;https://vulners.com/cve/CVE-2023-48795&#xa;\"/>"
        "</port></ports>");
    const auto report = parse_nmap(xml).report;
    ASSERT_EQ(report.findings.size(), 2u);
    EXPECT_EQ(report.findings[0].severity, Severity::Critical);
    EXPECT_EQ(report.findings[1].severity, Severity::Medium);
    EXPECT_EQ(report.findings[1].cvss, 5.9);
}

TEST(NmapParser, MultipleHostsAreSummed)
{
    const std::string host = "<host><ports><port protocol=\"tcp\" portid=\"22\"><state state=\"open\"/></port>"
                             "</ports></host>";
    const auto parsed = parse_nmap("<nmaprun>" + host + host + "</nmaprun>");
    EXPECT_EQ(parsed.report.open_ports, 2u);
    EXPECT_EQ(parsed.diagnostics.warnings.size(), 1u);
}

TEST(NmapParser, Errors)
{
    EXPECT_UCA_ERROR(parse_nmap("<nmaprun><host>"), ErrorCode::MalformedXml);
    EXPECT_UCA_ERROR(parse_nmap("<scan/>"), ErrorCode::MalformedXml);
    EXPECT_UCA_ERROR(parse_nmap("<nmaprun><runstats/></nmaprun>"), ErrorCode::NoHost);
}

// --- dispatch and IO ----------------------------------------------------------

TEST(ParseReport, DispatchesByTool)
{
    const auto parsed = parse_report(ToolKind::Lynis, "hardening_index=12\n", "mem");
    EXPECT_EQ(std::get<LynisReport>(parsed.report).hardening_index, 12);
    EXPECT_EQ(parsed.diagnostics.tool, ToolKind::Lynis);
    EXPECT_EQ(parsed.diagnostics.source_path, "mem");
}

TEST(ParseReport, MissingFile)
{
    EXPECT_UCA_ERROR(parse_report_file(ToolKind::Aide, fixture_dir() / "does-not-exist.txt"), ErrorCode::IoFailure);
}

TEST(ParseReport, InvalidUtf8IsReplaced)
{
    uca::testing::TempDir dir;
    const auto path = dir.write("lynis.dat", std::string("hostname=caf\xe9\nhardening_index=70\n"));
    EXPECT_EQ(read_text_file(path), "hostname=caf\xEF\xBF\xBD\nhardening_index=70\n");
    EXPECT_EQ(std::get<LynisReport>(parse_report_file(ToolKind::Lynis, path).report).hardening_index, 70);
    EXPECT_EQ(sanitize_utf8("ok \xE2\x9C\x93"), "ok \xE2\x9C\x93");
}
