#include "uca/runner.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <future>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace uca {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd& operator=(Fd&& other) noexcept
    {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    int get() const { return fd_; }
    void reset()
    {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

Fd open_for_write(const fs::path& path)
{
    Fd fd(::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0640));
    if (fd.get() < 0)
        throw Error(ErrorCode::IoFailure, path.string() + ": cannot open: " + std::strerror(errno));
    return fd;
}

struct ProcessSpec {
    fs::path program;
    std::vector<std::string> argv;
    int stdout_fd = -1; // -1 inherits
    int stderr_fd = -1;
    std::chrono::milliseconds timeout{0};
};

struct ProcessResult {
    bool timed_out = false;
    bool signalled = false;
    int status = 0; // exit status, or signal number when signalled
};

/// fork/exec with a deadline. Everything the child touches is prepared
/// before fork so the child only makes async-signal-safe calls.
ProcessResult run_process(const ProcessSpec& spec)
{
    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const auto& arg : spec.argv)
        argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    const std::string program = spec.program.string();

    int exec_pipe[2];
    if (::pipe2(exec_pipe, O_CLOEXEC) != 0)
        throw Error(ErrorCode::IoFailure, std::string("pipe: ") + std::strerror(errno));
    Fd exec_read(exec_pipe[0]);
    Fd exec_write(exec_pipe[1]);
    Fd dev_null(::open("/dev/null", O_RDONLY | O_CLOEXEC));

    const pid_t pid = ::fork();
    if (pid < 0)
        throw Error(ErrorCode::IoFailure, std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        ::setpgid(0, 0);
        if (dev_null.get() >= 0)
            ::dup2(dev_null.get(), STDIN_FILENO);
        if (spec.stdout_fd >= 0)
            ::dup2(spec.stdout_fd, STDOUT_FILENO);
        if (spec.stderr_fd >= 0)
            ::dup2(spec.stderr_fd, STDERR_FILENO);
        ::execv(program.c_str(), argv.data());
        const int err = errno;
        [[maybe_unused]] auto ignored = ::write(exec_write.get(), &err, sizeof err);
        ::_exit(127);
    }

    ::setpgid(pid, pid);
    exec_write.reset();
    int exec_errno = 0;
    ssize_t got = 0;
    do {
        got = ::read(exec_read.get(), &exec_errno, sizeof exec_errno);
    } while (got < 0 && errno == EINTR);
    if (got == static_cast<ssize_t>(sizeof exec_errno)) {
        int status = 0;
        ::waitpid(pid, &status, 0);
        if (exec_errno == ENOENT || exec_errno == EACCES || exec_errno == ENOEXEC)
            throw Error(ErrorCode::ToolNotFound, program + ": " + std::strerror(exec_errno));
        throw Error(ErrorCode::IoFailure, program + ": exec failed: " + std::strerror(exec_errno));
    }

    const auto deadline = std::chrono::steady_clock::now() + spec.timeout;
    auto poll_interval = 1ms;
    ProcessResult result;
    for (;;) {
        int status = 0;
        const pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) {
            if (WIFEXITED(status)) {
                result.status = WEXITSTATUS(status);
            } else {
                result.signalled = true;
                result.status = WIFSIGNALED(status) ? WTERMSIG(status) : 0;
            }
            return result;
        }
        if (done < 0 && errno != EINTR)
            throw Error(ErrorCode::IoFailure, std::string("waitpid: ") + std::strerror(errno));
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
            }
            result.timed_out = true;
            return result;
        }
        std::this_thread::sleep_for(poll_interval);
        poll_interval = std::min(poll_interval * 2, std::chrono::milliseconds(50));
    }
}

std::string describe_codes(const std::set<int>& codes)
{
    std::string out;
    for (int code : codes)
        out += (out.empty() ? "" : ",") + std::to_string(code);
    return "{" + out + "}";
}

fs::path with_suffix(const fs::path& path, const std::string& suffix)
{
    return fs::path(path.string() + suffix);
}

void ensure_parent(const fs::path& path)
{
    const auto parent = path.parent_path();
    if (parent.empty())
        return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, parent.string() + ": " + ec.message());
}

bool mentions_placeholder(const std::string& command_template, const std::string& name)
{
    return command_template.find("{" + name + "}") != std::string::npos;
}

} // namespace

std::vector<std::string> expand_command(const std::string& command_template,
                                        const std::map<std::string, std::string>& variables)
{
    std::vector<std::string> tokens;
    std::string current;
    bool in_token = false;
    char quote = 0;

    const auto substitute = [&](std::size_t& i) {
        const auto close = command_template.find('}', i);
        if (close == std::string::npos)
            throw Error(ErrorCode::ConfigInvalid, "unterminated placeholder in '" + command_template + "'");
        const std::string name = command_template.substr(i + 1, close - i - 1);
        const auto it = variables.find(name);
        if (it == variables.end())
            throw Error(ErrorCode::ConfigInvalid, "unknown placeholder {" + name + "} in '" + command_template + "'");
        current += it->second;
        i = close;
    };

    for (std::size_t i = 0; i < command_template.size(); ++i) {
        const char c = command_template[i];
        if (quote == '\'') {
            if (c == '\'')
                quote = 0;
            else
                current.push_back(c);
            continue;
        }
        if (quote == '"') {
            if (c == '"')
                quote = 0;
            else if (c == '\\' && i + 1 < command_template.size()
                     && (command_template[i + 1] == '"' || command_template[i + 1] == '\\'))
                current.push_back(command_template[++i]);
            else if (c == '{')
                substitute(i);
            else
                current.push_back(c);
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\n') {
            if (in_token) {
                tokens.push_back(std::move(current));
                current.clear();
                in_token = false;
            }
            continue;
        }
        in_token = true;
        if (c == '\'' || c == '"')
            quote = c;
        else if (c == '\\' && i + 1 < command_template.size())
            current.push_back(command_template[++i]);
        else if (c == '{')
            substitute(i);
        else
            current.push_back(c);
    }
    if (quote != 0)
        throw Error(ErrorCode::ConfigInvalid, "unbalanced quote in '" + command_template + "'");
    if (in_token)
        tokens.push_back(std::move(current));
    if (tokens.empty())
        throw Error(ErrorCode::ConfigInvalid, "empty command");
    return tokens;
}

std::optional<fs::path> find_executable(const std::string& program)
{
    const auto executable = [](const fs::path& candidate) {
        std::error_code ec;
        return fs::is_regular_file(candidate, ec) && ::access(candidate.c_str(), X_OK) == 0;
    };
    if (program.empty())
        return std::nullopt;
    if (program.find('/') != std::string::npos) {
        if (executable(program))
            return fs::path(program);
        return std::nullopt;
    }
    const char* path_env = std::getenv("PATH");
    std::string_view search = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin:/usr/sbin:/sbin";
    while (true) {
        const auto colon = search.find(':');
        std::string dir(search.substr(0, colon));
        if (dir.empty())
            dir = ".";
        const fs::path candidate = fs::path(dir) / program;
        if (executable(candidate))
            return candidate;
        if (colon == std::string_view::npos)
            break;
        search.remove_prefix(colon + 1);
    }
    return std::nullopt;
}

InvocationResult invoke_tool(const ToolInvocation& invocation)
{
    if (invocation.timeout <= std::chrono::milliseconds::zero())
        throw Error(ErrorCode::ConfigInvalid, std::string(tool_name(invocation.tool)) + ": timeout must be positive");
    if (invocation.output_path.empty())
        throw Error(ErrorCode::ConfigInvalid, std::string(tool_name(invocation.tool)) + ": no output path");

    const fs::path partial = with_suffix(invocation.output_path, ".partial");
    const fs::path log_path = with_suffix(invocation.output_path, ".log");
    const bool tool_writes_file = mentions_placeholder(invocation.command_template, "output");

    auto variables = invocation.variables;
    variables["output"] = partial.string();
    const auto argv = expand_command(invocation.command_template, variables);

    const auto program = find_executable(argv.front());
    if (!program)
        throw Error(ErrorCode::ToolNotFound, std::string(tool_name(invocation.tool)) + ": '" + argv.front()
                                                 + "' not found on PATH");

    ensure_parent(invocation.output_path);
    std::error_code ec;
    fs::remove(partial, ec);

    Fd log = open_for_write(log_path);
    Fd capture;
    if (!tool_writes_file)
        capture = open_for_write(partial);

    ProcessSpec spec;
    spec.program = *program;
    spec.argv = argv;
    spec.stdout_fd = tool_writes_file ? log.get() : capture.get();
    spec.stderr_fd = log.get();
    spec.timeout = invocation.timeout;

    const auto started = std::chrono::steady_clock::now();
    ProcessResult outcome;
    try {
        outcome = run_process(spec);
    } catch (...) {
        fs::remove(partial, ec);
        throw;
    }
    capture.reset();
    log.reset();

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    const std::string who = std::string(tool_name(invocation.tool));

    if (outcome.timed_out) {
        fs::remove(partial, ec);
        throw Error(ErrorCode::TimeoutExceeded, who + ": killed after " + std::to_string(invocation.timeout.count())
                                                    + " ms; partial output discarded");
    }
    if (outcome.signalled) {
        fs::remove(partial, ec);
        throw Error(ErrorCode::UnexpectedExitCode, who + ": terminated by signal " + std::to_string(outcome.status));
    }
    if (!invocation.accepted_exit_codes.contains(outcome.status)) {
        fs::remove(partial, ec);
        throw Error(ErrorCode::UnexpectedExitCode, who + ": exit status " + std::to_string(outcome.status)
                                                       + " not in " + describe_codes(invocation.accepted_exit_codes)
                                                       + " (see " + log_path.string() + ")");
    }
    if (!fs::exists(partial, ec) || fs::file_size(partial, ec) == 0) {
        fs::remove(partial, ec);
        throw Error(ErrorCode::OutputMissing, who + ": no report produced at " + invocation.output_path.string());
    }
    fs::rename(partial, invocation.output_path, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, invocation.output_path.string() + ": " + ec.message());

    return {invocation.tool, invocation.output_path, outcome.status, elapsed};
}

ScanOutcome orchestrate_scan(const std::vector<ToolInvocation>& invocations, bool parallel)
{
    std::set<ToolKind> seen;
    for (const auto& invocation : invocations) {
        if (!seen.insert(invocation.tool).second)
            throw Error(ErrorCode::DuplicateTool, std::string(tool_name(invocation.tool)) + " listed more than once");
    }

    struct Attempt {
        ToolKind tool;
        std::optional<InvocationResult> result;
        std::optional<Error> error;
    };
    const auto attempt = [](const ToolInvocation& invocation) {
        Attempt a{invocation.tool, std::nullopt, std::nullopt};
        try {
            a.result = invoke_tool(invocation);
        } catch (const Error& e) {
            a.error = e;
        } catch (const std::exception& e) {
            a.error = Error(ErrorCode::IoFailure, std::string(tool_name(invocation.tool)) + ": " + e.what());
        }
        return a;
    };

    std::vector<Attempt> attempts;
    if (parallel) {
        std::vector<std::future<Attempt>> running;
        for (const auto& invocation : invocations)
            running.push_back(std::async(std::launch::async, attempt, std::cref(invocation)));
        for (auto& f : running)
            attempts.push_back(f.get());
    } else {
        for (const auto& invocation : invocations)
            attempts.push_back(attempt(invocation));
    }

    ScanOutcome outcome;
    for (auto& a : attempts) {
        if (a.result) {
            outcome.reports[a.tool] = a.result->report_path;
            outcome.exit_codes[a.tool] = a.result->exit_code;
        } else {
            outcome.failures.push_back({a.tool, *a.error});
        }
    }
    std::stable_sort(outcome.failures.begin(), outcome.failures.end(),
                     [](const ToolFailure& x, const ToolFailure& y) { return x.tool < y.tool; });
    return outcome;
}

std::map<std::string, std::string> default_variables()
{
    char host[256] = {};
    if (::gethostname(host, sizeof host - 1) != 0)
        std::strcpy(host, "localhost");
    return {
        {"target", "127.0.0.1"},
        {"datastream", "/usr/share/xml/scap/ssg/content/ssg-ubuntu2204-ds.xml"},
        {"standard_profile", "xccdf_org.ssgproject.content_profile_stig"},
        {"cis_profile", "xccdf_org.ssgproject.content_profile_cis_level1_server"},
        {"hostname", host},
    };
}

std::vector<ToolInvocation> default_invocations(const fs::path& output_dir,
                                                const std::map<std::string, std::string>& variables)
{
    const std::set<int> bitmask_codes{0, 1, 2, 3, 4, 5, 6, 7};
    const auto make = [&](ToolKind tool, std::string command, std::string file, std::set<int> codes) {
        ToolInvocation invocation;
        invocation.tool = tool;
        invocation.command_template = std::move(command);
        invocation.output_path = output_dir / file;
        invocation.accepted_exit_codes = std::move(codes);
        invocation.variables = variables;
        return invocation;
    };
    return {
        make(ToolKind::Lynis, "lynis audit system --quick --no-colors --report-file {output}",
             "lynis-report.dat", {0}),
        make(ToolKind::OpenscapStandard,
             "oscap xccdf eval --profile {standard_profile} --results {output} {datastream}",
             "openscap-standard.xml", {0, 2}),
        make(ToolKind::Aide, "aide --check", "aide-check.txt", bitmask_codes),
        make(ToolKind::Tripwire, "tripwire --check", "tripwire-check.txt", bitmask_codes),
        make(ToolKind::OpenscapCis, "oscap xccdf eval --profile {cis_profile} --results {output} {datastream}",
             "openscap-cis.xml", {0, 2}),
        make(ToolKind::VulnScan, "nmap -sV --script vuln,vulners -p- -oX {output} {target}", "nmap-scan.xml", {0}),
    };
}

IntegrityInit default_integrity_init(ToolKind tool, const std::map<std::string, std::string>& variables)
{
    IntegrityInit init;
    init.tool = tool;
    init.variables = variables;
    if (tool == ToolKind::Aide) {
        init.command_template = "aide --init";
        init.produced_path = "/var/lib/aide/aide.db.new";
        init.database_path = "/var/lib/aide/aide.db";
        return init;
    }
    if (tool == ToolKind::Tripwire) {
        init.command_template = "tripwire --init";
        const auto host = variables.contains("hostname") ? variables.at("hostname") : std::string("localhost");
        init.database_path = "/var/lib/tripwire/" + host + ".twd";
        return init;
    }
    throw Error(ErrorCode::ConfigInvalid, std::string(tool_name(tool)) + " has no integrity database");
}

fs::path init_integrity_db(const IntegrityInit& init, bool force)
{
    const std::string who = std::string(tool_name(init.tool));
    std::error_code ec;
    if (fs::exists(init.database_path, ec) && !force)
        throw Error(ErrorCode::AlreadyInitialized, who + ": database " + init.database_path.string()
                                                       + " already exists; pass force to rebuild it");
    if (init.timeout <= std::chrono::milliseconds::zero())
        throw Error(ErrorCode::ConfigInvalid, who + ": timeout must be positive");

    const auto argv = expand_command(init.command_template, init.variables);
    const auto program = find_executable(argv.front());
    if (!program)
        throw Error(ErrorCode::ToolNotFound, who + ": '" + argv.front() + "' not found on PATH");

    ProcessSpec spec;
    spec.program = *program;
    spec.argv = argv;
    spec.timeout = init.timeout;
    const ProcessResult outcome = run_process(spec);
    if (outcome.timed_out)
        throw Error(ErrorCode::TimeoutExceeded, who + ": database initialisation timed out");
    if (outcome.signalled || !init.accepted_exit_codes.contains(outcome.status))
        throw Error(ErrorCode::UnexpectedExitCode, who + ": initialisation exited with status "
                                                       + std::to_string(outcome.status));

    if (init.produced_path) {
        if (!fs::exists(*init.produced_path, ec))
            throw Error(ErrorCode::OutputMissing, who + ": expected " + init.produced_path->string());
        ensure_parent(init.database_path);
        fs::rename(*init.produced_path, init.database_path, ec);
        if (ec)
            throw Error(ErrorCode::IoFailure, init.database_path.string() + ": " + ec.message());
    } else if (!fs::exists(init.database_path, ec)) {
        throw Error(ErrorCode::OutputMissing, who + ": expected " + init.database_path.string());
    }
    return init.database_path;
}

} // namespace uca
