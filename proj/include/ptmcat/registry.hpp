#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ptmcat {

/// One row of the registry metadata export: the model identifier, its
/// README-like card text, the registry-maintained pipeline tag, and the
/// like/download counters. Card and tag are absent when the export holds
/// an empty or null value for them.
struct PtmRecord {
    std::string model_id;                       // unique, possibly "owner/name"
    std::optional<std::string> card_data;
    std::optional<std::string> pipeline_tag;
    std::int64_t likes = 0;
    std::int64_t downloads = 0;

    bool operator==(const PtmRecord&) const = default;
};

using Dataset = std::vector<PtmRecord>;

enum class RegistryFormat { Auto, Csv, JsonLines };

struct IngestOptions {
    RegistryFormat format = RegistryFormat::Auto;
    char delimiter = ',';
    // strict: any malformed row aborts ingestion with MalformedRow.
    // default: malformed rows are skipped and counted; null/empty numeric
    // fields fall back to 0.
    bool strict = false;
};

struct Registry {
    Dataset records;
    std::string source_path;
    std::size_t ingested_count = 0;
    std::size_t rejected_count = 0;
};

struct RegistryStats {
    std::size_t records = 0;
    std::size_t distinct_tags = 0;
    std::size_t missing_card = 0;
    std::size_t missing_tag = 0;
};

/// Parse a CSV export (RFC-4180 quoting, header required). Rows with a
/// duplicate model_id keep the first occurrence; the rest are counted in
/// rejected_count. Row order is preserved.
Registry ingest_csv(const std::string& path, const IngestOptions& options = {});

/// Parse a JSON-lines export: one object per line with the same five keys,
/// absent fields as null.
Registry ingest_jsonl(const std::string& path, const IngestOptions& options = {});

/// Dispatch on options.format, falling back to the file extension
/// (.jsonl/.ndjson -> JSON-lines, anything else -> CSV).
Registry ingest_file(const std::string& path, const IngestOptions& options = {});

RegistryStats registry_stats(const Registry& registry);

/// Write the registry back out in the export formats; ingest(save(r)) is
/// field-identical to r.
void save_csv(const Registry& registry, const std::string& path, char delimiter = ',');
void save_jsonl(const Registry& registry, const std::string& path);

} // namespace ptmcat
