#pragma once

#include "uca/error.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace uca {

/// The six assessment tools, in declaration order. Declaration order is
/// significant: it is the tie-break order for every ranking in the library.
enum class ToolKind {
    Lynis,
    OpenscapStandard,
    Aide,
    Tripwire,
    OpenscapCis,
    VulnScan,
};

inline constexpr std::array<ToolKind, 6> kAllTools = {
    ToolKind::Lynis, ToolKind::OpenscapStandard, ToolKind::Aide,
    ToolKind::Tripwire, ToolKind::OpenscapCis, ToolKind::VulnScan,
};

/// "LYNIS", "OPENSCAP_STANDARD", ... as used in config files and output.
std::string_view tool_name(ToolKind tool) noexcept;

/// Human label used in rendered tables ("OpenSCAP Standard").
std::string_view tool_display_name(ToolKind tool) noexcept;

/// Accepts canonical names case-insensitively plus the short CLI aliases
/// (lynis, stig, openscap-standard, aide, tripwire, cis, openscap-cis,
/// vuln, nmap).
std::optional<ToolKind> parse_tool(std::string_view text) noexcept;

enum class Severity { Critical, High, Medium, Low };

inline constexpr std::array<Severity, 4> kAllSeverities = {
    Severity::Critical, Severity::High, Severity::Medium, Severity::Low,
};

std::string_view severity_name(Severity severity) noexcept;
std::optional<Severity> parse_severity(std::string_view text) noexcept;

enum class ScapProfile { Standard, Cis };

std::string_view profile_name(ScapProfile profile) noexcept;

// --- raw metrics extracted by the parsers -----------------------------------

struct LynisReport {
    int hardening_index = 0;

    bool operator==(const LynisReport&) const = default;
};

struct ScapReport {
    ScapProfile profile = ScapProfile::Standard;
    std::uint64_t pass_count = 0;
    std::uint64_t fail_count = 0;

    bool operator==(const ScapReport&) const = default;
};

struct AideReport {
    std::uint64_t added = 0;
    std::uint64_t removed = 0;
    std::uint64_t changed = 0;

    std::uint64_t total() const noexcept { return added + removed + changed; }
    bool operator==(const AideReport&) const = default;
};

struct TripwireReport {
    std::uint64_t objects_scanned = 0;
    std::uint64_t violations = 0;

    bool operator==(const TripwireReport&) const = default;
};

struct VulnFinding {
    std::string identifier;
    std::optional<double> cvss;
    Severity severity = Severity::Low;
    bool confirmed = false;
    std::optional<int> port;
    std::string description;

    bool operator==(const VulnFinding&) const = default;
};

struct VulnReport {
    std::uint64_t open_ports = 0;
    std::uint64_t filtered_ports = 0;
    bool firewall_active = false;
    std::vector<VulnFinding> findings;
    std::uint64_t confirmed_count = 0;

    bool operator==(const VulnReport&) const = default;
};

/// Placeholder for a score supplied directly (e.g. a tool scanned out of
/// band); carries no raw metrics.
struct SuppliedScore {
    bool operator==(const SuppliedScore&) const = default;
};

using RawToolReport = std::variant<LynisReport, ScapReport, AideReport,
                                   TripwireReport, VulnReport, SuppliedScore>;

// --- scoring configuration --------------------------------------------------

struct WeightProfile {
    std::map<ToolKind, double> tool_weights;
    std::map<Severity, double> severity_weights;
    double port_penalty = 3.0;
    double confirmed_penalty = 10.0;
    double firewall_discount = 10.0;

    /// 0.20 for the two multi-domain tools (Lynis, OpenSCAP CIS), 0.15 for
    /// the rest; severity weights 15/8/4/1.
    static WeightProfile defaults();

    /// Weight for `tool`; 0 when absent.
    double weight(ToolKind tool) const noexcept;
    double severity_weight(Severity severity) const noexcept;

    bool operator==(const WeightProfile&) const = default;
};

inline constexpr double kWeightSumTolerance = 1e-9;

/// Returns the first problem found, or nothing when the profile is usable.
/// Checks, in order: every tool present, every weight and penalty
/// non-negative, tool weights summing to 1 within kWeightSumTolerance.
std::optional<Error> validate_weights(const WeightProfile& profile);

/// Throwing form of validate_weights.
void require_valid_weights(const WeightProfile& profile);

/// True when both profiles assign the same tool weights within tolerance.
bool same_tool_weights(const WeightProfile& a, const WeightProfile& b,
                       double tolerance = kWeightSumTolerance) noexcept;

// --- scores and assessments -------------------------------------------------

struct NormalizedScore {
    ToolKind tool = ToolKind::Lynis;
    double value = 0.0;
    RawToolReport raw;

    bool operator==(const NormalizedScore&) const = default;
};

using Timestamp = std::chrono::time_point<std::chrono::system_clock,
                                          std::chrono::nanoseconds>;

struct CompositeAssessment {
    std::string label;
    Timestamp timestamp{};
    std::map<ToolKind, NormalizedScore> scores;
    WeightProfile weights;
    double composite = 0.0;
    std::map<ToolKind, double> contributions;

    bool operator==(const CompositeAssessment&) const = default;
};

struct DeltaDecomposition {
    std::string from_label;
    std::string to_label;
    std::map<ToolKind, double> per_tool_delta;
    double total_delta = 0.0;
    ToolKind dominant_tool = ToolKind::Lynis;
    /// per_tool_delta[dominant_tool] / total_delta; empty when the total is
    /// zero.
    std::optional<double> dominant_share;
};

} // namespace uca
