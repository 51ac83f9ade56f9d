#include "uca/cli/app.hpp"

#include "uca/analysis.hpp"
#include "uca/cli/pipeline.hpp"
#include "uca/cli/render.hpp"
#include "uca/config.hpp"
#include "uca/runner.hpp"
#include "uca/scoring.hpp"
#include "uca/serialization.hpp"
#include "uca/store.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace uca::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string weights_path;
    bool json = false;
    bool verbose = false;
};

struct Context {
    GlobalOptions global;
    Config config;
    std::ostream& out;
    std::ostream& err;
};

Config resolve_config(const GlobalOptions& global)
{
    Config config;
    if (!global.config_path.empty()) {
        config = load_config(global.config_path);
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
        config = load_config(env);
    }
    if (!global.weights_path.empty())
        config.weights = load_weights_file(global.weights_path);
    return config;
}

std::optional<bool> parse_firewall_mode(const std::string& mode)
{
    if (mode == "on")
        return true;
    if (mode == "off")
        return false;
    if (mode == "auto" || mode.empty())
        return std::nullopt;
    throw Error(ErrorCode::ConfigInvalid, "--firewall must be auto, on or off");
}

void print_diagnostics(Context& ctx, const ParseDiagnostics& diagnostics)
{
    for (const auto& warning : diagnostics.warnings)
        ctx.err << "warning: " << warning << '\n';
    if (!ctx.global.verbose)
        return;
    for (const auto& line : diagnostics.provenance)
        ctx.err << "debug: " << line << '\n';
    for (const auto& [value, count] : diagnostics.excluded_tallies)
        ctx.err << "debug: " << diagnostics.source_path << ": excluded " << value << " x" << count << '\n';
}

fs::path history_path(const Context& ctx, const std::string& flag)
{
    if (!flag.empty())
        return flag;
    if (ctx.config.history_path)
        return *ctx.config.history_path;
    throw Error(ErrorCode::ConfigInvalid, "no history file: pass --history or set \"history\" in the config");
}

HistoryLoad load_history_reporting(Context& ctx, const fs::path& path, const std::optional<std::string>& host)
{
    HistoryLoad loaded = load_history(path, host);
    for (const auto& warning : loaded.warnings)
        ctx.err << "warning: " << warning << '\n';
    return loaded;
}

// --- parse ------------------------------------------------------------------

struct ParseArgs {
    std::string tool;
    std::string file;
    std::string firewall;
};

int cmd_parse(Context& ctx, const ParseArgs& args)
{
    const auto tool = parse_tool(args.tool);
    if (!tool)
        throw Error(ErrorCode::ConfigInvalid, "unknown tool '" + args.tool + "'");

    ParseOptions options;
    options.firewall_override = args.firewall.empty() ? ctx.config.firewall_override : parse_firewall_mode(args.firewall);
    const ParsedReport parsed = parse_report_file(*tool, args.file, options);
    print_diagnostics(ctx, parsed.diagnostics);
    const NormalizedScore score = normalize(parsed.report, ctx.config.weights);

    if (ctx.global.json) {
        json out{
            {"tool", tool_name(*tool)},
            {"source", args.file},
            {"raw", to_json(parsed.report)},
            {"score", score.value},
        };
        if (ctx.global.verbose)
            out["diagnostics"] = to_json(parsed.diagnostics);
        ctx.out << out.dump() << '\n';
        return kExitOk;
    }
    ctx.out << "tool: " << tool_name(*tool) << '\n'
            << "source: " << args.file << '\n'
            << render_raw_text(parsed.report)
            << "score: " << fixed(score.value, 2) << '\n';
    return kExitOk;
}

// --- score ------------------------------------------------------------------

struct ScoreArgs {
    std::string manifest;
    std::string label;
    std::string host;
    std::string history;
    std::string timestamp;
    std::optional<double> min_score;
    bool record = false;
};

int cmd_score(Context& ctx, const ScoreArgs& args)
{
    const Manifest manifest = load_manifest(args.manifest);
    const std::string label = !args.label.empty() ? args.label : manifest.label.value_or("assessment");
    const std::string host = !args.host.empty() ? args.host
                                                : manifest.host.value_or(ctx.config.host_label.value_or("local"));
    const Timestamp timestamp = args.timestamp.empty() ? now() : parse_timestamp(args.timestamp);

    const ScoredManifest scored = score_manifest(manifest, ctx.config.weights, label, timestamp,
                                                 ctx.config.firewall_override);
    for (const auto& [tool, diagnostics] : scored.diagnostics)
        print_diagnostics(ctx, diagnostics);

    const HistoryRecord record{scored.assessment, host, kHistorySchemaVersion};
    if (ctx.global.json)
        ctx.out << serialize_record(record) << '\n';
    else
        ctx.out << render_assessment_text(scored.assessment, host);

    std::string history_flag = args.history;
    if (history_flag.empty() && args.record)
        history_flag = history_path(ctx, {}).string();
    if (!history_flag.empty()) {
        append_record(history_flag, record);
        if (!ctx.global.json)
            ctx.out << "recorded: " << history_flag << '\n';
    }

    if (args.min_score && scored.assessment.composite < *args.min_score) {
        ctx.err << "threshold: composite " << fixed(scored.assessment.composite, 2) << " below minimum "
                << fixed(*args.min_score, 2) << '\n';
        return kExitThreshold;
    }
    return kExitOk;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
    std::string from;
    std::string to;
    std::string history;
    std::string host;
};

/// A path to a manifest or single-record JSON file, or a label looked up
/// in the history (latest record with that label wins).
CompositeAssessment resolve_assessment(Context& ctx, const std::string& spec, const CompareArgs& args)
{
    std::error_code ec;
    if (fs::is_regular_file(spec, ec)) {
        const std::string text = read_text_file(spec);
        json document;
        try {
            document = json::parse(text);
        } catch (const json::exception&) {
            // Not a single JSON document: treat as a history file holding one record.
            HistoryLoad loaded = load_history_reporting(ctx, spec, std::nullopt);
            if (loaded.records.size() != 1)
                throw Error(ErrorCode::ConfigInvalid, spec + ": expected a manifest or a single assessment record");
            return loaded.records.front().assessment;
        }
        if (document.is_object() && document.contains("tools")) {
            const Manifest manifest = manifest_from_json(document, fs::path(spec).parent_path());
            const auto scored = score_manifest(manifest, ctx.config.weights,
                                               manifest.label.value_or(fs::path(spec).stem().string()), now(),
                                               ctx.config.firewall_override);
            for (const auto& [tool, diagnostics] : scored.diagnostics)
                print_diagnostics(ctx, diagnostics);
            return scored.assessment;
        }
        if (document.is_object() && document.contains("assessment"))
            return deserialize_record(text).assessment;
        throw Error(ErrorCode::ConfigInvalid, spec + ": expected a manifest or an assessment record");
    }

    const fs::path path = history_path(ctx, args.history);
    const std::optional<std::string> host = args.host.empty() ? std::nullopt : std::optional(args.host);
    const HistoryLoad loaded = load_history_reporting(ctx, path, host);
    for (auto it = loaded.records.rbegin(); it != loaded.records.rend(); ++it) {
        if (it->assessment.label == spec)
            return it->assessment;
    }
    throw Error(ErrorCode::ConfigInvalid, "'" + spec + "' is neither a file nor a label in " + path.string());
}

int cmd_compare(Context& ctx, const CompareArgs& args)
{
    const CompositeAssessment from = resolve_assessment(ctx, args.from, args);
    const CompositeAssessment to = resolve_assessment(ctx, args.to, args);
    const DeltaDecomposition decomposition = decompose_delta(from, to);
    if (ctx.global.json)
        ctx.out << decomposition_json(decomposition).dump() << '\n';
    else
        ctx.out << render_decomposition_text(decomposition);
    return kExitOk;
}

// --- history ----------------------------------------------------------------

struct HistoryArgs {
    std::string history;
    std::string host;
};

int cmd_history(Context& ctx, const HistoryArgs& args)
{
    const fs::path path = history_path(ctx, args.history);
    const std::optional<std::string> host = args.host.empty() ? std::nullopt : std::optional(args.host);
    const HistoryLoad loaded = load_history_reporting(ctx, path, host);
    if (ctx.global.json) {
        for (const auto& record : loaded.records)
            ctx.out << serialize_record(record) << '\n';
        return kExitOk;
    }
    for (const auto& record : loaded.records) {
        ctx.out << format_timestamp(record.assessment.timestamp) << "  " << record.host_label << "  "
                << record.assessment.label << "  " << fixed(record.assessment.composite, 2) << '\n';
    }
    ctx.out << loaded.records.size() << " record(s)";
    if (loaded.skipped > 0)
        ctx.out << ", " << loaded.skipped << " unreadable line(s) skipped";
    ctx.out << '\n';
    return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> labels;
    std::string history;
    std::string host;
    std::string format;
};

int cmd_report(Context& ctx, const ReportArgs& args)
{
    ReportFormat format = ReportFormat::Markdown;
    std::string format_name = args.format.empty() ? (ctx.global.json ? "json" : "markdown") : args.format;
    if (format_name == "json")
        format = ReportFormat::Json;
    else if (format_name == "text")
        format = ReportFormat::Text;
    else if (format_name != "markdown")
        throw Error(ErrorCode::ConfigInvalid, "--format must be markdown, json or text");

    const fs::path path = history_path(ctx, args.history);
    const std::optional<std::string> host = args.host.empty() ? std::nullopt : std::optional(args.host);
    const HistoryLoad loaded = load_history_reporting(ctx, path, host);

    std::vector<HistoryRecord> selected;
    for (const auto& label : args.labels) {
        const HistoryRecord* match = nullptr;
        for (const auto& record : loaded.records) {
            if (record.assessment.label == label)
                match = &record;
        }
        if (!match)
            throw Error(ErrorCode::ConfigInvalid, "unknown label '" + label + "' in " + path.string());
        selected.push_back(*match);
    }
    ctx.out << render_report(selected, format);
    return kExitOk;
}

// --- run --------------------------------------------------------------------

struct RunArgs {
    std::vector<std::string> tools;
    std::string output_dir;
    std::string manifest_out;
    std::string label;
    bool parallel = false;
};

int cmd_run(Context& ctx, const RunArgs& args)
{
    Config config = ctx.config;
    if (!args.output_dir.empty())
        config.output_dir = args.output_dir;

    std::set<ToolKind> only;
    for (const auto& name : args.tools) {
        const auto tool = parse_tool(name);
        if (!tool)
            throw Error(ErrorCode::ConfigInvalid, "unknown tool '" + name + "'");
        only.insert(*tool);
    }

    const auto invocations = configured_invocations(config, only);
    const ScanOutcome outcome = orchestrate_scan(invocations, args.parallel || config.parallel);

    Manifest manifest;
    if (!args.label.empty())
        manifest.label = args.label;
    manifest.host = config.host_label;
    for (const auto& [tool, path] : outcome.reports)
        manifest.entries[tool].report = fs::absolute(path);

    const fs::path manifest_path = args.manifest_out.empty() ? config.output_dir / "manifest.json"
                                                             : fs::path(args.manifest_out);
    if (!manifest_path.parent_path().empty())
        fs::create_directories(manifest_path.parent_path());
    {
        std::ofstream file(manifest_path);
        file << manifest_to_json(manifest, fs::absolute(manifest_path).parent_path()).dump(2) << '\n';
        if (!file)
            throw Error(ErrorCode::IoFailure, manifest_path.string() + ": cannot write manifest");
    }

    for (const auto& [tool, path] : outcome.reports)
        ctx.out << tool_name(tool) << ": ok " << path.string() << " (exit " << outcome.exit_codes.at(tool) << ")\n";
    for (const auto& failure : outcome.failures)
        ctx.out << tool_name(failure.tool) << ": failed " << failure.error.what() << '\n';
    ctx.out << "manifest: " << manifest_path.string() << '\n';
    return outcome.failures.empty() ? kExitOk : kExitInputError;
}

// --- init-integrity-db --------------------------------------------------------

struct InitArgs {
    std::string tool;
    bool force = false;
};

int cmd_init_integrity_db(Context& ctx, const InitArgs& args)
{
    const auto tool = parse_tool(args.tool);
    if (!tool || (*tool != ToolKind::Aide && *tool != ToolKind::Tripwire))
        throw Error(ErrorCode::ConfigInvalid, "--tool must be aide or tripwire");
    const fs::path database = init_integrity_db(configured_integrity_init(ctx.config, *tool), args.force);
    ctx.out << tool_name(*tool) << ": database initialised at " << database.string() << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Scores security tool reports into a weighted compliance composite.", "uca"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    GlobalOptions global;
    app.add_option("--config", global.config_path, "Configuration file (default: $UCA_CONFIG)");
    app.add_option("--weights", global.weights_path, "Weight profile file overriding the configured weights");
    app.add_flag("--json", global.json, "Machine-readable output");
    app.add_flag("-v,--verbose", global.verbose, "Print parser provenance to stderr");

    ParseArgs parse_args;
    auto* parse = app.add_subcommand("parse", "Parse one tool report and print its normalized score");
    parse->add_option("--tool", parse_args.tool, "lynis, stig, aide, tripwire, cis or vuln")->required();
    parse->add_option("file", parse_args.file, "Report file")->required();
    parse->add_option("--firewall", parse_args.firewall, "Firewall detection for nmap reports: auto, on, off");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score a manifest of six reports into a composite");
    score->add_option("manifest", score_args.manifest, "Manifest file")->required();
    score->add_option("--label", score_args.label, "Assessment label (default: manifest label)");
    score->add_option("--host", score_args.host, "Host label stored with the record");
    score->add_option("--history", score_args.history, "Append the assessment to this history file");
    score->add_flag("--record", score_args.record, "Append to the configured history file");
    score->add_option("--timestamp", score_args.timestamp, "Assessment time, RFC 3339 UTC (default: now)");
    score->add_option("--min-score", score_args.min_score, "Exit 3 when the composite is below this value");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Decompose the composite change between two assessments");
    compare->add_option("from", compare_args.from, "Manifest, record file, or history label")->required();
    compare->add_option("to", compare_args.to, "Manifest, record file, or history label")->required();
    compare->add_option("--history", compare_args.history, "History file for label lookups");
    compare->add_option("--host", compare_args.host, "Only consider records for this host");

    HistoryArgs history_args;
    auto* history = app.add_subcommand("history", "List stored assessments");
    history->add_option("--history", history_args.history, "History file");
    history->add_option("--host", history_args.host, "Only records for this host");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Render stored assessments as a report");
    report->add_option("labels", report_args.labels, "Assessment labels in column order")->required();
    report->add_option("--history", report_args.history, "History file");
    report->add_option("--host", report_args.host, "Only records for this host");
    report->add_option("--format", report_args.format, "markdown (default), json or text");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run the security tools locally and write a manifest");
    run_cmd->add_option("--tools", run_args.tools, "Subset of tools to run")->delimiter(',');
    run_cmd->add_option("--output-dir", run_args.output_dir, "Directory for reports");
    run_cmd->add_option("--manifest-out", run_args.manifest_out, "Manifest path (default: <output-dir>/manifest.json)");
    run_cmd->add_option("--label", run_args.label, "Label written into the manifest");
    run_cmd->add_flag("--parallel", run_args.parallel, "Run tools concurrently");

    InitArgs init_args;
    auto* init = app.add_subcommand("init-integrity-db", "Build the AIDE or Tripwire baseline database once");
    init->add_option("--tool", init_args.tool, "aide or tripwire")->required();
    init->add_flag("--force", init_args.force, "Rebuild an existing database");

    for (auto* sub : {parse, score, compare, history, report, run_cmd, init})
        sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& arg : args)
        argv.push_back(arg.c_str());
    if (argv.empty())
        argv.push_back("uca");

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    try {
        Context ctx{global, resolve_config(global), out, err};
        if (*parse) return cmd_parse(ctx, parse_args);
        if (*score) return cmd_score(ctx, score_args);
        if (*compare) return cmd_compare(ctx, compare_args);
        if (*history) return cmd_history(ctx, history_args);
        if (*report) return cmd_report(ctx, report_args);
        if (*run_cmd) return cmd_run(ctx, run_args);
        if (*init) return cmd_init_integrity_db(ctx, init_args);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

} // namespace uca::cli
