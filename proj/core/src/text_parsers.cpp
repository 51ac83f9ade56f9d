#include "uca/parsers.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

namespace uca {

namespace {

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

/// Calls `fn(line_number, line)` for every line, 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        ++line_no;
        if (!(end == std::string_view::npos && line.empty()))
            fn(line_no, line);
        if (end == std::string_view::npos)
            break;
        pos = end + 1;
    }
}

std::string at(std::string_view source, std::size_t line_no)
{
    return std::string(source) + ":" + std::to_string(line_no);
}

/// Parses a run of digits (commas allowed when `allow_commas`).
std::uint64_t parse_count(std::string_view digits, bool allow_commas,
                          const std::string& where)
{
    std::string clean;
    clean.reserve(digits.size());
    for (char c : digits) {
        if (allow_commas && c == ',')
            continue;
        clean.push_back(c);
    }
    std::uint64_t value = 0;
    const auto* begin = clean.data();
    const auto* end = clean.data() + clean.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc::result_out_of_range)
        throw Error(ErrorCode::ValueOutOfRange, where + ": count '" + std::string(digits) + "' overflows");
    if (ec != std::errc() || ptr != end || clean.empty())
        throw Error(ErrorCode::ValueNotInteger, where + ": '" + std::string(digits) + "' is not a count");
    return value;
}

struct SummaryHit {
    std::uint64_t value = 0;
    std::size_t line_no = 0;
    std::string text;
};

} // namespace

// --- Lynis ------------------------------------------------------------------

Parsed<LynisReport> parse_lynis(std::string_view report_text, std::string_view source)
{
    Parsed<LynisReport> result;
    result.diagnostics.source_path = std::string(source);
    result.diagnostics.tool = ToolKind::Lynis;

    std::optional<std::pair<std::size_t, std::string>> found;
    for_each_line(report_text, [&](std::size_t line_no, std::string_view line) {
        const auto content = trim(line);
        if (content.empty() || content.front() == '#')
            return;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos) {
            result.diagnostics.warnings.push_back(at(source, line_no) + ": line without '=' ignored");
            return;
        }
        if (trim(content.substr(0, eq)) != "hardening_index")
            return;
        if (found)
            result.diagnostics.warnings.push_back(
                at(source, line_no) + ": repeated hardening_index; later value used (first at line "
                + std::to_string(found->first) + ")");
        found.emplace(line_no, std::string(trim(content.substr(eq + 1))));
    });

    if (!found)
        throw Error(ErrorCode::KeyMissing, std::string(source) + ": no hardening_index line");

    const auto& [line_no, value_text] = *found;
    long long value = 0;
    const auto* end = value_text.data() + value_text.size();
    const auto [ptr, ec] = std::from_chars(value_text.data(), end, value);
    if (ec == std::errc::result_out_of_range)
        throw Error(ErrorCode::ValueOutOfRange,
                    at(source, line_no) + ": hardening_index '" + value_text + "' outside 0-100");
    if (ec != std::errc() || ptr != end)
        throw Error(ErrorCode::ValueNotInteger,
                    at(source, line_no) + ": hardening_index '" + value_text + "' is not an integer");
    if (value < 0 || value > 100)
        throw Error(ErrorCode::ValueOutOfRange,
                    at(source, line_no) + ": hardening_index " + value_text + " outside 0-100");

    result.report.hardening_index = static_cast<int>(value);
    result.diagnostics.provenance.push_back(at(source, line_no) + ": hardening_index=" + value_text);
    return result;
}

// --- AIDE -------------------------------------------------------------------

Parsed<AideReport> parse_aide(std::string_view report_text, std::string_view source)
{
    static const std::regex added_re(R"(added entries:\s*(\d+))", std::regex::icase);
    static const std::regex removed_re(R"(removed entries:\s*(\d+))", std::regex::icase);
    static const std::regex changed_re(R"(changed entries:\s*(\d+))", std::regex::icase);
    static const std::regex clean_re(
        R"(AIDE found NO differences between database and filesystem|All files match AIDE database)",
        std::regex::icase);

    Parsed<AideReport> result;
    result.diagnostics.source_path = std::string(source);
    result.diagnostics.tool = ToolKind::Aide;

    std::optional<SummaryHit> added, removed, changed;
    std::optional<std::size_t> clean_line;

    const auto capture = [&](std::optional<SummaryHit>& slot, const std::regex& re,
                             const std::string& line, std::size_t line_no) {
        std::smatch match;
        if (!std::regex_search(line, match, re))
            return;
        const auto where = at(source, line_no);
        if (slot) {
            result.diagnostics.warnings.push_back(where + ": repeated summary line ignored");
            return;
        }
        slot = SummaryHit{parse_count(match[1].str(), false, where), line_no,
                          std::string(trim(line))};
    };

    for_each_line(report_text, [&](std::size_t line_no, std::string_view view) {
        const std::string line(view);
        capture(added, added_re, line, line_no);
        capture(removed, removed_re, line, line_no);
        capture(changed, changed_re, line, line_no);
        if (!clean_line && std::regex_search(line, clean_re))
            clean_line = line_no;
    });

    if (added || removed || changed) {
        std::vector<std::string> missing;
        if (!added) missing.emplace_back("Added entries");
        if (!removed) missing.emplace_back("Removed entries");
        if (!changed) missing.emplace_back("Changed entries");
        if (!missing.empty()) {
            std::string names;
            for (const auto& m : missing)
                names += (names.empty() ? "" : ", ") + m;
            throw Error(ErrorCode::SummaryMissing,
                        std::string(source) + ": incomplete summary, missing " + names);
        }
        if (clean_line)
            result.diagnostics.warnings.push_back(
                at(source, *clean_line) + ": no-differences marker alongside a summary; summary used");
        result.report = AideReport{added->value, removed->value, changed->value};
        for (const auto* hit : {&*added, &*removed, &*changed})
            result.diagnostics.provenance.push_back(at(source, hit->line_no) + ": " + hit->text);
        return result;
    }

    if (clean_line) {
        result.report = AideReport{};
        result.diagnostics.provenance.push_back(at(source, *clean_line) + ": no-differences marker");
        return result;
    }

    throw Error(ErrorCode::SummaryMissing,
                std::string(source) + ": neither change summary nor no-differences marker found");
}

// --- Tripwire ---------------------------------------------------------------

Parsed<TripwireReport> parse_tripwire(std::string_view report_text, std::string_view source)
{
    static const std::regex objects_re(R"(Total objects scanned:\s*([\d,]+))", std::regex::icase);
    static const std::regex violations_re(R"(Total violations found:\s*([\d,]+))", std::regex::icase);

    Parsed<TripwireReport> result;
    result.diagnostics.source_path = std::string(source);
    result.diagnostics.tool = ToolKind::Tripwire;

    std::optional<SummaryHit> objects, violations;
    for_each_line(report_text, [&](std::size_t line_no, std::string_view view) {
        const std::string line(view);
        std::smatch match;
        for (auto [slot, re] : {std::pair{&objects, &objects_re}, std::pair{&violations, &violations_re}}) {
            if (!std::regex_search(line, match, *re))
                continue;
            const auto where = at(source, line_no);
            if (*slot) {
                result.diagnostics.warnings.push_back(where + ": repeated summary line ignored");
                continue;
            }
            *slot = SummaryHit{parse_count(match[1].str(), true, where), line_no,
                               std::string(trim(line))};
        }
    });

    if (!objects || !violations) {
        std::string missing = !objects ? "Total objects scanned" : "";
        if (!violations)
            missing += (missing.empty() ? "" : ", ") + std::string("Total violations found");
        throw Error(ErrorCode::SummaryMissing, std::string(source) + ": missing " + missing);
    }
    if (violations->value > objects->value) {
        throw Error(ErrorCode::ViolationsExceedObjects,
                    at(source, violations->line_no) + ": " + std::to_string(violations->value)
                        + " violations exceed " + std::to_string(objects->value) + " objects scanned");
    }

    result.report = TripwireReport{objects->value, violations->value};
    result.diagnostics.provenance.push_back(at(source, objects->line_no) + ": " + objects->text);
    result.diagnostics.provenance.push_back(at(source, violations->line_no) + ": " + violations->text);
    return result;
}

// --- shared -----------------------------------------------------------------

bool detect_firewall(std::uint64_t, std::uint64_t filtered_ports,
                     std::optional<bool> override) noexcept
{
    if (override)
        return *override;
    return filtered_ports >= kFirewallFilteredThreshold;
}

ParsedReport parse_report(ToolKind tool, std::string_view text, std::string_view source,
                          const ParseOptions& options)
{
    const auto wrap = [](auto parsed) {
        return ParsedReport{RawToolReport{std::move(parsed.report)}, std::move(parsed.diagnostics)};
    };
    switch (tool) {
    case ToolKind::Lynis: return wrap(parse_lynis(text, source));
    case ToolKind::OpenscapStandard: return wrap(parse_xccdf(text, ScapProfile::Standard, source));
    case ToolKind::Aide: return wrap(parse_aide(text, source));
    case ToolKind::Tripwire: return wrap(parse_tripwire(text, source));
    case ToolKind::OpenscapCis: return wrap(parse_xccdf(text, ScapProfile::Cis, source));
    case ToolKind::VulnScan: return wrap(parse_nmap(text, options.firewall_override, source));
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown tool");
}

ParsedReport parse_report_file(ToolKind tool, const std::filesystem::path& path,
                               const ParseOptions& options)
{
    const std::string text = read_text_file(path);
    return parse_report(tool, text, path.string(), options);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, path.string() + ": cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoFailure, path.string() + ": read failed");
    return sanitize_utf8(buffer.str());
}

std::string sanitize_utf8(std::string_view bytes)
{
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto lead = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        std::uint32_t min_code = 0;
        if (lead < 0x80) {
            out.push_back(static_cast<char>(lead));
            ++i;
            continue;
        } else if ((lead & 0xE0) == 0xC0) {
            len = 2;
            min_code = 0x80;
        } else if ((lead & 0xF0) == 0xE0) {
            len = 3;
            min_code = 0x800;
        } else if ((lead & 0xF8) == 0xF0) {
            len = 4;
            min_code = 0x10000;
        }

        bool valid = len != 0 && i + len <= bytes.size();
        std::uint32_t code = valid ? (lead & (0xFF >> (len + 1))) : 0;
        for (std::size_t k = 1; valid && k < len; ++k) {
            const auto cont = static_cast<unsigned char>(bytes[i + k]);
            if ((cont & 0xC0) != 0x80)
                valid = false;
            else
                code = (code << 6) | (cont & 0x3F);
        }
        if (valid && (code < min_code || code > 0x10FFFF || (code >= 0xD800 && code <= 0xDFFF)))
            valid = false;

        if (valid) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

} // namespace uca
