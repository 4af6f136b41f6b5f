#include "ptmcat/registry.hpp"
#include "ptmcat/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <unordered_set>

namespace ptmcat {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Reads one RFC-4180 record; quoted fields may span lines. Returns false at EOF.
bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields,
                     std::size_t& line_no) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;

    std::string field;
    bool quoted = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(field);
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                int next = in.peek();
                if (next == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_no;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !any) {
            quoted = true;
        } else if (ch == delimiter) {
            fields.push_back(field);
            field.clear();
            any = false;
            c = in.get();
            continue;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            ++line_no;
            fields.push_back(field);
            return true;
        } else if (ch == '\n') {
            ++line_no;
            fields.push_back(field);
            return true;
        } else {
            field.push_back(ch);
            any = true;
        }
        c = in.get();
    }
}

// Non-negative integer field. Empty/null behaviour is decided by the caller.
bool parse_count(const std::string& raw, std::int64_t& out) {
    std::string t = trim(raw);
    if (t.empty() || t.size() > 18) return false;
    for (char ch : t)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    out = std::stoll(t);
    return true;
}

std::optional<std::string> normalize_text_field(const std::string& raw) {
    if (trim(raw).empty()) return std::nullopt;
    return raw;
}

constexpr const char* kColumns[5] = {"model_id", "card_data", "pipeline_tag", "likes",
                                     "downloads"};

struct RowOutcome {
    bool ok = false;
    std::string why;
    PtmRecord record;
};

RowOutcome build_record(std::string model_id_raw, std::string card_raw, std::string tag_raw,
                        const std::string& likes_raw, const std::string& downloads_raw,
                        bool strict) {
    RowOutcome out;
    std::string model_id = trim(model_id_raw);
    if (model_id.empty()) {
        out.why = "empty model_id";
        return out;
    }
    PtmRecord rec;
    rec.model_id = std::move(model_id);
    rec.card_data = normalize_text_field(card_raw);
    if (auto tag = normalize_text_field(tag_raw)) rec.pipeline_tag = trim(*tag);

    auto read_count = [&](const std::string& raw, std::int64_t& value,
                          const char* what) -> bool {
        if (trim(raw).empty()) {
            if (strict) {
                out.why = std::string("null ") + what;
                return false;
            }
            value = 0; // lax mode: missing counters default to 0
            return true;
        }
        if (!parse_count(raw, value)) {
            out.why = std::string("unparseable ") + what + ": '" + trim(raw) + "'";
            return false;
        }
        return true;
    };
    if (!read_count(likes_raw, rec.likes, "likes")) return out;
    if (!read_count(downloads_raw, rec.downloads, "downloads")) return out;

    out.ok = true;
    out.record = std::move(rec);
    return out;
}

} // namespace

Registry ingest_csv(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path);

    Registry reg;
    reg.source_path = path;

    std::size_t line_no = 1;
    std::vector<std::string> fields;
    if (!read_csv_record(in, options.delimiter, fields, line_no))
        throw HeaderMismatchError("model_id, card_data, pipeline_tag, likes, downloads");

    // Header columns match case-insensitively; extra columns are ignored.
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
        fields[0].erase(0, 3); // UTF-8 BOM
    std::array<int, 5> col{-1, -1, -1, -1, -1};
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name = to_lower(trim(fields[i]));
        for (int k = 0; k < 5; ++k)
            if (name == kColumns[k] && col[k] < 0) col[k] = static_cast<int>(i);
    }
    std::string missing;
    for (int k = 0; k < 5; ++k) {
        if (col[k] < 0) {
            if (!missing.empty()) missing += ", ";
            missing += kColumns[k];
        }
    }
    if (!missing.empty()) throw HeaderMismatchError(missing);

    std::unordered_set<std::string> seen_ids;
    while (true) {
        std::size_t row_line = line_no;
        if (!read_csv_record(in, options.delimiter, fields, line_no)) break;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue; // blank line

        if (fields.size() < 5) {
            if (options.strict)
                throw MalformedRowError(row_line, "expected at least 5 fields, got " +
                                                      std::to_string(fields.size()));
            ++reg.rejected_count;
            continue;
        }
        auto get = [&](int k) { return fields[static_cast<std::size_t>(col[k])]; };
        RowOutcome row = build_record(get(0), get(1), get(2), get(3), get(4), options.strict);
        if (!row.ok) {
            if (options.strict) throw MalformedRowError(row_line, row.why);
            ++reg.rejected_count;
            continue;
        }
        if (!seen_ids.insert(row.record.model_id).second) {
            ++reg.rejected_count; // duplicate id: first occurrence wins
            continue;
        }
        reg.records.push_back(std::move(row.record));
    }
    reg.ingested_count = reg.records.size();
    return reg;
}

Registry ingest_jsonl(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path);

    Registry reg;
    reg.source_path = path;

    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        auto reject = [&](const std::string& why) {
            if (options.strict) throw MalformedRowError(line_no, why);
            ++reg.rejected_count;
        };

        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            reject("not a JSON object");
            continue;
        }
        auto text_field = [&](const char* key) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) return "";
            return it->is_string() ? it->get<std::string>() : it->dump();
        };
        auto count_field = [&](const char* key) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) return "";
            if (it->is_number_unsigned() || it->is_number_integer())
                return std::to_string(it->get<std::int64_t>());
            return it->is_string() ? it->get<std::string>() : it->dump();
        };
        RowOutcome row = build_record(text_field("model_id"), text_field("card_data"),
                                      text_field("pipeline_tag"), count_field("likes"),
                                      count_field("downloads"), options.strict);
        if (!row.ok) {
            reject(row.why);
            continue;
        }
        if (!seen_ids.insert(row.record.model_id).second) {
            ++reg.rejected_count;
            continue;
        }
        reg.records.push_back(std::move(row.record));
    }
    reg.ingested_count = reg.records.size();
    return reg;
}

Registry ingest_file(const std::string& path, const IngestOptions& options) {
    RegistryFormat fmt = options.format;
    if (fmt == RegistryFormat::Auto) {
        std::string ext = to_lower(std::filesystem::path(path).extension().string());
        fmt = (ext == ".jsonl" || ext == ".ndjson") ? RegistryFormat::JsonLines
                                                    : RegistryFormat::Csv;
    }
    return fmt == RegistryFormat::JsonLines ? ingest_jsonl(path, options)
                                            : ingest_csv(path, options);
}

RegistryStats registry_stats(const Registry& registry) {
    RegistryStats stats;
    stats.records = registry.records.size();
    std::unordered_set<std::string> tags;
    for (const PtmRecord& rec : registry.records) {
        if (!rec.card_data) ++stats.missing_card;
        if (!rec.pipeline_tag)
            ++stats.missing_tag;
        else
            tags.insert(*rec.pipeline_tag);
    }
    stats.distinct_tags = tags.size();
    return stats;
}

namespace {

std::string csv_quote(const std::string& field, char delimiter) {
    bool needs = field.find_first_of("\"\r\n") != std::string::npos ||
                 field.find(delimiter) != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void save_csv(const Registry& registry, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFoundError(path);
    out << "model_id" << delimiter << "card_data" << delimiter << "pipeline_tag" << delimiter
        << "likes" << delimiter << "downloads" << "\n";
    for (const PtmRecord& rec : registry.records) {
        out << csv_quote(rec.model_id, delimiter) << delimiter
            << csv_quote(rec.card_data.value_or(""), delimiter) << delimiter
            << csv_quote(rec.pipeline_tag.value_or(""), delimiter) << delimiter << rec.likes
            << delimiter << rec.downloads << "\n";
    }
}

void save_jsonl(const Registry& registry, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFoundError(path);
    for (const PtmRecord& rec : registry.records) {
        nlohmann::ordered_json obj;
        obj["model_id"] = rec.model_id;
        obj["card_data"] = rec.card_data ? nlohmann::json(*rec.card_data) : nlohmann::json();
        obj["pipeline_tag"] =
            rec.pipeline_tag ? nlohmann::json(*rec.pipeline_tag) : nlohmann::json();
        obj["likes"] = rec.likes;
        obj["downloads"] = rec.downloads;
        out << obj.dump() << "\n";
    }
}

} // namespace ptmcat
