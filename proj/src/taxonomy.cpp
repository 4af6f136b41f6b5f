#include "ptmcat/taxonomy.hpp"
#include "ptmcat/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

namespace ptmcat {

namespace {

using nlohmann::json;

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Case-insensitive needle search with a word boundary before the match and,
// unless `prefix`, after it as well.
bool contains_word(std::string_view text_lower, std::string_view needle_lower, bool prefix) {
    if (needle_lower.empty()) return false;
    std::size_t pos = 0;
    while ((pos = text_lower.find(needle_lower, pos)) != std::string_view::npos) {
        bool start_ok = pos == 0 || !word_char(text_lower[pos - 1]);
        std::size_t end = pos + needle_lower.size();
        bool end_ok = prefix || end >= text_lower.size() || !word_char(text_lower[end]);
        if (start_ok && end_ok) return true;
        ++pos;
    }
    return false;
}

json parse_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw SchemaError(what, "not valid JSON");
    return parsed;
}

std::string string_field(const json& obj, const std::string& path, const char* key,
                         bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw SchemaError(path + "." + key, "missing");
        return {};
    }
    if (!it->is_string()) throw SchemaError(path + "." + key, "expected a string");
    return it->get<std::string>();
}

} // namespace

std::vector<TaxonomyEntry> load_taxonomy(const std::string& path) {
    json parsed = parse_file(path, "taxonomy");
    if (!parsed.is_array() || parsed.empty())
        throw SchemaError("taxonomy", "expected a non-empty JSON array");

    std::vector<TaxonomyEntry> entries;
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        std::string where = "taxonomy[" + std::to_string(i) + "]";
        const json& obj = parsed[i];
        if (!obj.is_object()) throw SchemaError(where, "expected an object");

        TaxonomyEntry entry;
        entry.macro_id = string_field(obj, where, "macro_id");
        entry.name = string_field(obj, where, "name");
        if (!ids.insert(entry.macro_id).second)
            throw SchemaError(where + ".macro_id", "duplicate id '" + entry.macro_id + "'");

        auto subs = obj.find("sub_tasks");
        if (subs == obj.end() || !subs->is_array() || subs->empty())
            throw SchemaError(where + ".sub_tasks", "expected a non-empty array");
        for (std::size_t s = 0; s < subs->size(); ++s) {
            if (!(*subs)[s].is_string())
                throw SchemaError(where + ".sub_tasks[" + std::to_string(s) + "]",
                                  "expected a string");
            entry.sub_tasks.push_back((*subs)[s].get<std::string>());
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<EvidenceDoc> load_evidence(const std::string& path,
                                       const std::vector<TaxonomyEntry>& taxonomy,
                                       const EvidenceLoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);

    std::unordered_set<std::string> known_macros;
    for (const TaxonomyEntry& entry : taxonomy) known_macros.insert(entry.macro_id);

    std::vector<EvidenceDoc> docs;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = "docs[" + std::to_string(docs.size()) + "]";

        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw SchemaError(where, "line " + std::to_string(line_no) + " is not a JSON object");

        EvidenceDoc doc;
        doc.doc_id = string_field(obj, where, "doc_id");
        doc.title = string_field(obj, where, "title");
        doc.abstract = string_field(obj, where, "abstract");
        doc.venue = string_field(obj, where, "venue", false);
        if (!ids.insert(doc.doc_id).second)
            throw SchemaError(where + ".doc_id", "duplicate id '" + doc.doc_id + "'");

        auto year = obj.find("year");
        if (year == obj.end() || !year->is_number_integer())
            throw SchemaError(where + ".year", "expected an integer");
        doc.year = year->get<int>();

        auto included = obj.find("included");
        doc.included = included != obj.end() && included->is_boolean() ? included->get<bool>()
                                                                       : true;
        if (doc.included && (doc.year < options.min_year || doc.year > options.max_year))
            throw SchemaError(where + ".year",
                              std::to_string(doc.year) + " outside the publication window " +
                                  std::to_string(options.min_year) + ".." +
                                  std::to_string(options.max_year));

        auto names = obj.find("ptm_names");
        if (names != obj.end() && names->is_array())
            for (const json& n : *names)
                if (n.is_string()) doc.ptm_names.push_back(n.get<std::string>());

        auto macros = obj.find("macro_ids");
        if (macros == obj.end() || !macros->is_array())
            throw SchemaError(where + ".macro_ids", "expected an array");
        for (std::size_t m = 0; m < macros->size(); ++m) {
            if (!(*macros)[m].is_string())
                throw SchemaError(where + ".macro_ids[" + std::to_string(m) + "]",
                                  "expected a string");
            std::string id = (*macros)[m].get<std::string>();
            if (!known_macros.count(id))
                throw SchemaError(where + ".macro_ids[" + std::to_string(m) + "]",
                                  "unknown macro id '" + id + "'");
            doc.macro_ids.push_back(std::move(id));
        }
        docs.push_back(std::move(doc));
    }
    if (docs.empty()) throw SchemaError("docs", "evidence file holds no records");
    return docs;
}

KeywordQuery load_query(const std::string& path) {
    json parsed = parse_file(path, "query");
    const json* groups = &parsed;
    if (parsed.is_object()) {
        auto it = parsed.find("groups");
        if (it == parsed.end()) throw SchemaError("query.groups", "missing");
        groups = &*it;
    }
    if (!groups->is_array() || groups->empty())
        throw SchemaError("query.groups", "expected a non-empty array of keyword lists");

    KeywordQuery query;
    for (std::size_t g = 0; g < groups->size(); ++g) {
        const json& group = (*groups)[g];
        if (!group.is_array() || group.empty())
            throw SchemaError("query.groups[" + std::to_string(g) + "]",
                              "expected a non-empty array");
        std::vector<std::string> keywords;
        for (const json& kw : group) {
            if (!kw.is_string())
                throw SchemaError("query.groups[" + std::to_string(g) + "]",
                                  "keywords must be strings");
            keywords.push_back(kw.get<std::string>());
        }
        query.groups.push_back(std::move(keywords));
    }
    return query;
}

void save_taxonomy(const std::vector<TaxonomyEntry>& taxonomy, const std::string& path) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const TaxonomyEntry& entry : taxonomy) {
        nlohmann::ordered_json obj;
        obj["macro_id"] = entry.macro_id;
        obj["name"] = entry.name;
        obj["sub_tasks"] = entry.sub_tasks;
        out.push_back(std::move(obj));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw FileNotFoundError(path);
    file << out.dump(2) << "\n";
}

void save_evidence(const std::vector<EvidenceDoc>& docs, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw FileNotFoundError(path);
    for (const EvidenceDoc& doc : docs) {
        nlohmann::ordered_json obj;
        obj["doc_id"] = doc.doc_id;
        obj["title"] = doc.title;
        obj["abstract"] = doc.abstract;
        obj["venue"] = doc.venue;
        obj["year"] = doc.year;
        obj["ptm_names"] = doc.ptm_names;
        obj["macro_ids"] = doc.macro_ids;
        obj["included"] = doc.included;
        file << obj.dump() << "\n";
    }
}

bool query_matches(const EvidenceDoc& doc, const KeywordQuery& query) {
    std::string text = to_lower(doc.title + " " + doc.abstract);
    for (const std::vector<std::string>& group : query.groups) {
        bool hit = false;
        for (const std::string& keyword : group) {
            bool prefix = !keyword.empty() && keyword.back() == '*';
            std::string needle = to_lower(prefix ? keyword.substr(0, keyword.size() - 1)
                                                 : keyword);
            if (contains_word(text, needle, prefix)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

std::vector<EvidenceDoc> screen(const std::vector<EvidenceDoc>& docs,
                                const KeywordQuery& query) {
    std::vector<EvidenceDoc> included;
    for (const EvidenceDoc& doc : docs)
        if (query_matches(doc, query)) included.push_back(doc);
    return included;
}

std::set<std::string> tasks_for_ptm(const std::string& name,
                                    const std::vector<EvidenceDoc>& docs) {
    std::string needle = to_lower(name);
    while (!needle.empty() && std::isspace(static_cast<unsigned char>(needle.front())))
        needle.erase(needle.begin());
    while (!needle.empty() && std::isspace(static_cast<unsigned char>(needle.back())))
        needle.pop_back();
    if (needle.empty()) throw EmptyNameError();

    std::set<std::string> macros;
    for (const EvidenceDoc& doc : docs) {
        if (!doc.included) continue;
        if (contains_word(to_lower(doc.abstract), needle, false))
            macros.insert(doc.macro_ids.begin(), doc.macro_ids.end());
    }
    return macros;
}

} // namespace ptmcat
