#pragma once

#include "uca/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uca {

/// Side information produced alongside a parsed report. Nothing recorded
/// here changes the extracted values.
struct ParseDiagnostics {
    std::string source_path;
    ToolKind tool = ToolKind::Lynis;
    /// "<location>: <message>" for anything suspicious but non-fatal.
    std::vector<std::string> warnings;
    /// "<location>: <what was read>" for every number that fed the report.
    std::vector<std::string> provenance;
    /// XCCDF result values that were counted as neither pass nor fail.
    std::map<std::string, std::uint64_t> excluded_tallies;
};

template <typename Report>
struct Parsed {
    Report report;
    ParseDiagnostics diagnostics;
};

inline constexpr std::string_view kInMemorySource = "<memory>";

/// Lynis report-data (`key=value` per line, `#` comments).
Parsed<LynisReport> parse_lynis(std::string_view report_text,
                                std::string_view source = kInMemorySource);

/// XCCDF TestResult. pass+fixed count as pass, fail+error as fail; all
/// other result values are excluded and tallied in the diagnostics.
Parsed<ScapReport> parse_xccdf(std::string_view result_xml, ScapProfile profile,
                               std::string_view source = kInMemorySource);

/// AIDE check output, either the summary block or the no-differences line.
Parsed<AideReport> parse_aide(std::string_view report_text,
                              std::string_view source = kInMemorySource);

/// Tripwire check report summary (object and violation totals).
Parsed<TripwireReport> parse_tripwire(std::string_view report_text,
                                      std::string_view source = kInMemorySource);

/// nmap XML output including NSE vulnerability script results.
Parsed<VulnReport> parse_nmap(std::string_view scan_xml,
                              std::optional<bool> firewall_override = std::nullopt,
                              std::string_view source = kInMemorySource);

inline constexpr std::uint64_t kFirewallFilteredThreshold = 100;

/// `override` when given; otherwise true iff at least
/// kFirewallFilteredThreshold ports are filtered.
bool detect_firewall(std::uint64_t open_ports, std::uint64_t filtered_ports,
                     std::optional<bool> override = std::nullopt) noexcept;

struct ParsedReport {
    RawToolReport report;
    ParseDiagnostics diagnostics;
};

struct ParseOptions {
    std::optional<bool> firewall_override;
};

/// Dispatches to the parser for `tool`.
ParsedReport parse_report(ToolKind tool, std::string_view text,
                          std::string_view source = kInMemorySource,
                          const ParseOptions& options = {});

/// Reads `path` and parses it as `tool` output.
ParsedReport parse_report_file(ToolKind tool, const std::filesystem::path& path,
                               const ParseOptions& options = {});

/// Reads a whole file as UTF-8; invalid byte sequences become U+FFFD.
/// Throws IO_FAILURE when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

} // namespace uca
