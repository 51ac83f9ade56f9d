#include "uca/store.hpp"
#include "uca/serialization.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>

#include <fcntl.h>
#include <unistd.h>

namespace uca {

using nlohmann::json;

namespace {

class FileDescriptor {
public:
    explicit FileDescriptor(int fd) : fd_(fd) {}
    ~FileDescriptor()
    {
        if (fd_ >= 0)
            ::close(fd_);
    }
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;

    int get() const { return fd_; }
    int release()
    {
        const int fd = fd_;
        fd_ = -1;
        return fd;
    }

private:
    int fd_;
};

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path)
{
    while (!bytes.empty()) {
        const auto n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error(ErrorCode::IoFailure, path.string() + ": write failed: " + errno_text());
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

/// True when the file is non-empty and its last byte is not '\n'.
bool ends_mid_line(int fd)
{
    const off_t size = ::lseek(fd, 0, SEEK_END);
    if (size <= 0)
        return false;
    char last = '\n';
    if (::pread(fd, &last, 1, size - 1) != 1)
        return false;
    return last != '\n';
}

} // namespace

std::string serialize_record(const HistoryRecord& record)
{
    json out;
    try {
        out = {
            {"schema_version", record.schema_version},
            {"host", record.host_label},
            {"assessment", to_json(record.assessment)},
        };
        return out.dump();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SerializationFailure, e.what());
    }
}

HistoryRecord deserialize_record(std::string_view line)
{
    json in;
    try {
        in = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SerializationFailure, std::string("not a JSON record: ") + e.what());
    }
    try {
        if (!in.is_object())
            throw Error(ErrorCode::SerializationFailure, "record is not an object");
        HistoryRecord record;
        record.schema_version = in.at("schema_version").get<int>();
        if (record.schema_version < 1 || record.schema_version > kHistorySchemaVersion)
            throw Error(ErrorCode::SerializationFailure,
                        "schema_version " + std::to_string(record.schema_version) + " not supported (current "
                            + std::to_string(kHistorySchemaVersion) + ")");
        record.host_label = in.at("host").get<std::string>();
        record.assessment = assessment_from_json(in.at("assessment"));
        return record;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SerializationFailure, e.what());
    }
}

void append_record(const std::filesystem::path& path, const HistoryRecord& record)
{
    const std::string line = serialize_record(record) + "\n";

    FileDescriptor fd(::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
    if (fd.get() < 0)
        throw Error(ErrorCode::IoFailure, path.string() + ": cannot open for append: " + errno_text());

    const std::string payload = ends_mid_line(fd.get()) ? "\n" + line : line;
    write_all(fd.get(), payload, path);
    if (::fsync(fd.get()) != 0)
        throw Error(ErrorCode::IoFailure, path.string() + ": fsync failed: " + errno_text());
    if (::close(fd.release()) != 0)
        throw Error(ErrorCode::IoFailure, path.string() + ": close failed: " + errno_text());
}

HistoryLoad load_history(const std::filesystem::path& path, const std::optional<std::string>& host_filter)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, path.string() + ": cannot open history");

    HistoryLoad result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        try {
            HistoryRecord record = deserialize_record(line);
            if (host_filter && record.host_label != *host_filter)
                continue;
            result.records.push_back(std::move(record));
        } catch (const Error& e) {
            ++result.skipped;
            result.warnings.push_back(path.string() + ":" + std::to_string(line_no) + ": skipped: " + e.what());
        }
    }
    if (in.bad())
        throw Error(ErrorCode::IoFailure, path.string() + ": read failed");
    return result;
}

} // namespace uca
