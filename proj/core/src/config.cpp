#include "uca/config.hpp"
#include "uca/parsers.hpp"
#include "uca/serialization.hpp"

namespace uca {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorCode::ConfigInvalid, what);
}

fs::path resolve(const fs::path& base_dir, const std::string& value)
{
    fs::path path(value);
    if (path.is_relative() && !base_dir.empty())
        return base_dir / path;
    return path;
}

ToolKind tool_from_key(const std::string& key)
{
    if (auto tool = parse_tool(key))
        return *tool;
    invalid("unknown tool '" + key + "'");
}

std::string string_field(const json& value, const std::string& where)
{
    if (!value.is_string())
        invalid(where + " must be a string");
    return value.get<std::string>();
}

std::chrono::milliseconds seconds_field(const json& value, const std::string& where)
{
    if (!value.is_number() || value.get<double>() <= 0)
        invalid(where + " must be a positive number of seconds");
    return std::chrono::milliseconds(static_cast<long long>(value.get<double>() * 1000.0));
}

ToolCommandConfig tool_command(const json& in, const std::string& where)
{
    if (!in.is_object())
        invalid(where + " must be an object");
    ToolCommandConfig out;
    for (const auto& [key, value] : in.items()) {
        const std::string field = where + "." + key;
        if (key == "command") {
            out.command = string_field(value, field);
        } else if (key == "timeout") {
            out.timeout = seconds_field(value, field);
        } else if (key == "accept_exit_codes") {
            if (!value.is_array())
                invalid(field + " must be an array of integers");
            std::set<int> codes;
            for (const auto& code : value) {
                if (!code.is_number_integer())
                    invalid(field + " must be an array of integers");
                codes.insert(code.get<int>());
            }
            out.accepted_exit_codes = std::move(codes);
        } else if (key == "output") {
            out.output_file = string_field(value, field);
        } else {
            invalid("unknown key " + field);
        }
    }
    return out;
}

IntegrityConfig integrity_command(const json& in, const std::string& where, const fs::path& base_dir)
{
    if (!in.is_object())
        invalid(where + " must be an object");
    IntegrityConfig out;
    for (const auto& [key, value] : in.items()) {
        const std::string field = where + "." + key;
        if (key == "command")
            out.command = string_field(value, field);
        else if (key == "database")
            out.database = resolve(base_dir, string_field(value, field));
        else if (key == "produced")
            out.produced = resolve(base_dir, string_field(value, field));
        else if (key == "timeout")
            out.timeout = seconds_field(value, field);
        else
            invalid("unknown key " + field);
    }
    return out;
}

json read_json_file(const fs::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        invalid(path.string() + ": " + e.what());
    }
}

} // namespace

Config config_from_json(const json& document, const fs::path& base_dir)
{
    if (!document.is_object())
        invalid("configuration must be a JSON object");

    Config config;
    for (const auto& [key, value] : document.items()) {
        if (key == "weights") {
            config.weights = weights_from_json(value);
        } else if (key == "history") {
            config.history_path = resolve(base_dir, string_field(value, "history"));
        } else if (key == "host") {
            config.host_label = string_field(value, "host");
        } else if (key == "firewall_override") {
            if (!value.is_null() && !value.is_boolean())
                invalid("firewall_override must be true, false or null");
            if (value.is_boolean())
                config.firewall_override = value.get<bool>();
        } else if (key == "runner") {
            if (!value.is_object())
                invalid("runner must be an object");
            for (const auto& [rkey, rvalue] : value.items()) {
                if (rkey == "output_dir") {
                    config.output_dir = resolve(base_dir, string_field(rvalue, "runner.output_dir"));
                } else if (rkey == "parallel") {
                    if (!rvalue.is_boolean())
                        invalid("runner.parallel must be a boolean");
                    config.parallel = rvalue.get<bool>();
                } else if (rkey == "variables") {
                    if (!rvalue.is_object())
                        invalid("runner.variables must be an object");
                    for (const auto& [name, v] : rvalue.items())
                        config.variables[name] = string_field(v, "runner.variables." + name);
                } else if (rkey == "tools") {
                    if (!rvalue.is_object())
                        invalid("runner.tools must be an object");
                    for (const auto& [name, v] : rvalue.items())
                        config.tools[tool_from_key(name)] = tool_command(v, "runner.tools." + name);
                } else if (rkey == "integrity") {
                    if (!rvalue.is_object())
                        invalid("runner.integrity must be an object");
                    for (const auto& [name, v] : rvalue.items()) {
                        const ToolKind tool = tool_from_key(name);
                        if (tool != ToolKind::Aide && tool != ToolKind::Tripwire)
                            invalid("runner.integrity." + name + ": only AIDE and TRIPWIRE have databases");
                        config.integrity[tool] = integrity_command(v, "runner.integrity." + name, base_dir);
                    }
                } else {
                    invalid("unknown key runner." + rkey);
                }
            }
        } else {
            invalid("unknown configuration key '" + key + "'");
        }
    }
    require_valid_weights(config.weights);
    return config;
}

Config load_config(const fs::path& path)
{
    return config_from_json(read_json_file(path), path.parent_path());
}

WeightProfile load_weights_file(const fs::path& path)
{
    const json document = read_json_file(path);
    if (!document.is_object())
        invalid(path.string() + ": weights file must be a JSON object");
    WeightProfile profile = document.contains("weights") ? weights_from_json(document.at("weights"))
                                                         : weights_from_json(document);
    require_valid_weights(profile);
    return profile;
}

std::vector<ToolInvocation> configured_invocations(const Config& config, const std::set<ToolKind>& only)
{
    std::vector<ToolInvocation> out;
    for (auto invocation : default_invocations(config.output_dir, config.variables)) {
        if (!only.empty() && !only.contains(invocation.tool))
            continue;
        if (auto it = config.tools.find(invocation.tool); it != config.tools.end()) {
            const auto& overrides = it->second;
            if (overrides.command)
                invocation.command_template = *overrides.command;
            if (overrides.timeout)
                invocation.timeout = *overrides.timeout;
            if (overrides.accepted_exit_codes)
                invocation.accepted_exit_codes = *overrides.accepted_exit_codes;
            if (overrides.output_file)
                invocation.output_path = config.output_dir / *overrides.output_file;
        }
        out.push_back(std::move(invocation));
    }
    return out;
}

IntegrityInit configured_integrity_init(const Config& config, ToolKind tool)
{
    IntegrityInit init = default_integrity_init(tool, config.variables);
    if (auto it = config.integrity.find(tool); it != config.integrity.end()) {
        const auto& overrides = it->second;
        if (overrides.command)
            init.command_template = *overrides.command;
        if (overrides.database)
            init.database_path = *overrides.database;
        if (overrides.produced)
            init.produced_path = *overrides.produced;
        if (overrides.timeout)
            init.timeout = *overrides.timeout;
    }
    return init;
}

} // namespace uca
