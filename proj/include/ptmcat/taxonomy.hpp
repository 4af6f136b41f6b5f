#pragma once

#include <set>
#include <string>
#include <vector>

namespace ptmcat {

/// One macro task (M1..M6) with its grouped sub-tasks.
struct TaxonomyEntry {
    std::string macro_id;
    std::string name;
    std::vector<std::string> sub_tasks;
};

/// One screened literature record linking PTM names to macro tasks.
struct EvidenceDoc {
    std::string doc_id;
    std::string title;
    std::string abstract;
    std::string venue;
    int year = 0;
    std::vector<std::string> ptm_names;
    std::vector<std::string> macro_ids;
    bool included = true;
};

/// Conjunction of keyword groups: a document matches iff every group has at
/// least one hit over title+abstract. A trailing '*' makes the keyword a
/// prefix; matching is case-insensitive and anchored at word boundaries.
struct KeywordQuery {
    std::vector<std::vector<std::string>> groups;
};

struct EvidenceLoadOptions {
    int min_year = 2018; // publication window enforced for included docs
    int max_year = 2024;
};

std::vector<TaxonomyEntry> load_taxonomy(const std::string& path);
std::vector<EvidenceDoc> load_evidence(const std::string& path,
                                       const std::vector<TaxonomyEntry>& taxonomy,
                                       const EvidenceLoadOptions& options = {});
KeywordQuery load_query(const std::string& path);

void save_taxonomy(const std::vector<TaxonomyEntry>& taxonomy, const std::string& path);
void save_evidence(const std::vector<EvidenceDoc>& docs, const std::string& path);

bool query_matches(const EvidenceDoc& doc, const KeywordQuery& query);

/// Subset of docs matching every keyword group.
std::vector<EvidenceDoc> screen(const std::vector<EvidenceDoc>& docs, const KeywordQuery& query);

/// Union of macro ids over included docs whose abstract mentions the PTM name
/// as a whole word (case-insensitive; "bert" does not hit "roberta").
std::set<std::string> tasks_for_ptm(const std::string& name,
                                    const std::vector<EvidenceDoc>& docs);

} // namespace ptmcat
