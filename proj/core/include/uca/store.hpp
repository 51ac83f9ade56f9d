#pragma once

#include "uca/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uca {

inline constexpr int kHistorySchemaVersion = 1;

struct HistoryRecord {
    CompositeAssessment assessment;
    std::string host_label;
    int schema_version = kHistorySchemaVersion;

    bool operator==(const HistoryRecord&) const = default;
};

/// One record as a single JSON line (no trailing newline).
/// Throws SERIALIZATION_FAILURE for non-finite values.
std::string serialize_record(const HistoryRecord& record);

/// Throws SERIALIZATION_FAILURE for malformed lines or a schema version
/// newer than kHistorySchemaVersion.
HistoryRecord deserialize_record(std::string_view line);

/// Appends one line to the history file, creating it if needed. The file is
/// opened O_APPEND and fsync'd after the write. A torn final line left by an
/// earlier crash is terminated first so it cannot swallow the new record.
void append_record(const std::filesystem::path& path, const HistoryRecord& record);

struct HistoryLoad {
    std::vector<HistoryRecord> records;
    /// Lines that could not be read back (corrupt, torn, or newer schema).
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

/// Records in file order, optionally restricted to one host label.
/// Throws IO_FAILURE when the file cannot be opened.
HistoryLoad load_history(const std::filesystem::path& path,
                         const std::optional<std::string>& host_filter = std::nullopt);

} // namespace uca
