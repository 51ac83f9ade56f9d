#pragma once

#include "uca/model.hpp"

#include <map>
#include <optional>
#include <string>

namespace uca {

/// CVSS v3 qualitative bands: >=9 critical, >=7 high, >=4 medium, else low.
/// Throws CVSS_OUT_OF_RANGE outside [0, 10].
Severity classify_severity(double cvss);

/// Hardening index taken as-is.
NormalizedScore normalize_lynis(const LynisReport& report);

/// 100 * pass / (pass + fail). Throws EMPTY_RESULT when nothing was counted.
NormalizedScore normalize_scap(const ScapReport& report);

/// 100 - 10 * log10(total changes), floored at 0. A report with no changes
/// scores 100 (the log form already gives 100 at one change).
NormalizedScore normalize_aide(const AideReport& report);

/// 100 * (objects - violations) / objects. Throws EMPTY_DATABASE when no
/// objects were scanned.
NormalizedScore normalize_tripwire(const TripwireReport& report);

/// Penalty model over the scan inventory:
///
///   penalty = sum over unconfirmed findings of severity_weight
///           + port_penalty * open_ports
///           + confirmed_penalty * confirmed_count
///
/// An active firewall subtracts firewall_discount from the penalty, which
/// never drops below 0. Score = clamp(100 - penalty, 0, 100). Confirmed
/// findings carry only the confirmed penalty, not their severity weight.
NormalizedScore normalize_vuln(const VulnReport& report, const WeightProfile& profile);

/// Raw penalty before the firewall discount, exposed for reporting.
double vuln_raw_penalty(const VulnReport& report, const WeightProfile& profile);

/// Dispatch over RawToolReport. A SuppliedScore cannot be normalized and
/// throws CONFIG_INVALID; use supplied_score() for those.
NormalizedScore normalize(const RawToolReport& report, const WeightProfile& profile);

/// Wraps an externally obtained 0-100 value. Throws VALUE_OUT_OF_RANGE for
/// values outside [0, 100] or NaN.
NormalizedScore supplied_score(ToolKind tool, double value);

/// Tool a raw report belongs to; nothing for SuppliedScore.
std::optional<ToolKind> tool_of(const RawToolReport& report) noexcept;

/// Weighted composite of all six scores:
///   contributions[t] = w_t * S_t,  composite = sum of contributions.
/// Throws TOOL_MISSING naming every absent tool, or the validate_weights
/// error for an invalid profile.
CompositeAssessment aggregate(const std::map<ToolKind, NormalizedScore>& scores,
                              const WeightProfile& profile, std::string label,
                              Timestamp timestamp = {});

} // namespace uca
