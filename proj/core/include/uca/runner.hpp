#pragma once

#include "uca/error.hpp"
#include "uca/model.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace uca {

/// How to run one tool and where its report ends up.
///
/// `command_template` is split shell-style (quotes and backslash escapes,
/// no expansion) and `{name}` placeholders are substituted from `variables`.
/// `{output}` is reserved: when present the tool writes its report to that
/// path itself; otherwise the tool's standard output becomes the report.
/// Standard error (and standard output when the tool writes its own file)
/// goes to `<output_path>.log`.
struct ToolInvocation {
    ToolKind tool = ToolKind::Lynis;
    std::string command_template;
    std::chrono::milliseconds timeout = std::chrono::hours(1);
    std::filesystem::path output_path;
    /// Exit statuses treated as success. File-integrity checkers report
    /// detected changes through non-zero statuses.
    std::set<int> accepted_exit_codes{0};
    std::map<std::string, std::string> variables;
};

struct InvocationResult {
    ToolKind tool = ToolKind::Lynis;
    std::filesystem::path report_path;
    int exit_code = 0;
    std::chrono::milliseconds elapsed{0};
};

/// Runs the tool and leaves its report at `output_path`. Output is staged
/// in `<output_path>.partial` and only renamed into place on success.
/// Errors: TOOL_NOT_FOUND, TIMEOUT_EXCEEDED, UNEXPECTED_EXIT_CODE,
/// OUTPUT_MISSING (no or empty report), CONFIG_INVALID (bad template),
/// IO_FAILURE.
InvocationResult invoke_tool(const ToolInvocation& invocation);

struct ToolFailure {
    ToolKind tool;
    Error error;
};

struct ScanOutcome {
    std::map<ToolKind, std::filesystem::path> reports;
    std::map<ToolKind, int> exit_codes;
    /// Ordered by ToolKind.
    std::vector<ToolFailure> failures;
};

/// Runs every invocation, sequentially unless `parallel`. Failures of single
/// tools are collected rather than thrown; only a duplicate tool entry
/// (DUPLICATE_TOOL) aborts before anything runs.
ScanOutcome orchestrate_scan(const std::vector<ToolInvocation>& invocations, bool parallel = false);

/// Splits and substitutes a command template. Throws CONFIG_INVALID for
/// unbalanced quotes, unknown placeholders, or an empty command.
std::vector<std::string> expand_command(const std::string& command_template,
                                        const std::map<std::string, std::string>& variables);

/// Resolves a program name against PATH (names containing '/' are checked
/// directly).
std::optional<std::filesystem::path> find_executable(const std::string& program);

/// Placeholder values used by the default command templates.
std::map<std::string, std::string> default_variables();

/// Command templates for all six tools, writing into `output_dir`.
std::vector<ToolInvocation> default_invocations(const std::filesystem::path& output_dir,
                                                const std::map<std::string, std::string>& variables
                                                = default_variables());

/// Initialisation of a file-integrity database, done once on the unmodified
/// baseline. `produced_path`, when set, is where the tool writes the fresh
/// database; it is moved to `database_path` afterwards.
struct IntegrityInit {
    ToolKind tool = ToolKind::Aide;
    std::string command_template;
    std::filesystem::path database_path;
    std::optional<std::filesystem::path> produced_path;
    std::chrono::milliseconds timeout = std::chrono::hours(2);
    std::set<int> accepted_exit_codes{0};
    std::map<std::string, std::string> variables;
};

/// Defaults for AIDE or Tripwire; CONFIG_INVALID for other tools.
IntegrityInit default_integrity_init(ToolKind tool,
                                     const std::map<std::string, std::string>& variables = default_variables());

/// Builds the database. Refuses with ALREADY_INITIALIZED when the database
/// exists and `force` is false. Returns the database path.
std::filesystem::path init_integrity_db(const IntegrityInit& init, bool force = false);

} // namespace uca
