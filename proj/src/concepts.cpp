#include "itgc/concepts.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "itgc/errors.hpp"

namespace itgc {

using nlohmann::json;

void ClusteringTask::validate() const {
    if (item_ids.empty()) throw InvalidTask("item_ids is empty");
    std::set<std::string> seen(item_ids.begin(), item_ids.end());
    if (seen.size() != item_ids.size()) throw InvalidTask("item_ids contains duplicates");
    if (num_clusters) {
        int k = *num_clusters;
        if (k < 2) throw InvalidTask("num_clusters must be >= 2");
        if (static_cast<std::size_t>(k) > item_ids.size())
            throw InvalidTask("num_clusters exceeds item count");
    }
}

Assignment Assignment::from_labels(std::vector<int> labels) {
    Assignment a;
    a.labels = std::move(labels);
    std::unordered_set<int> distinct;
    for (int label : a.labels) {
        if (label >= 0) distinct.insert(label);
    }
    a.k_effective = static_cast<int>(distinct.size());
    return a;
}

void SearchHistory::append(HistoryRecord record) {
    records_.push_back(std::move(record));
    if (records_.size() == 1 || records_.back().silhouette > records_[best_index_].silhouette) {
        best_index_ = records_.size() - 1;
    }
}

std::string concept_dedupe_key(const std::string& concept_text) {
    std::string key;
    key.reserve(concept_text.size());
    bool pending_space = false;
    for (unsigned char c : concept_text) {
        if (std::isspace(c)) {
            pending_space = !key.empty();
            continue;
        }
        if (pending_space) {
            key.push_back(' ');
            pending_space = false;
        }
        key.push_back(static_cast<char>(std::tolower(c)));
    }
    return key;
}

namespace {

std::string strip(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> dedupe(const std::vector<std::string>& concepts) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& c : concepts) {
        if (seen.insert(concept_dedupe_key(c)).second) out.push_back(c);
    }
    return out;
}

}  // namespace

ConceptSet parse_concept_list(const std::string& raw, int iteration) {
    std::vector<std::string> concepts;
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        std::string trimmed = strip(line);
        if (trimmed.empty() || trimmed.front() != '-') continue;
        std::string body = strip(trimmed.substr(1));
        if (body.empty()) continue;
        concepts.push_back(std::move(body));
    }
    concepts = dedupe(concepts);
    if (concepts.empty()) throw EmptyConceptSet();
    return ConceptSet{std::move(concepts), iteration};
}

ConceptSet validate_concept_set(ConceptSet cs, std::size_t min_m) {
    std::vector<std::string> trimmed;
    for (auto& c : cs.concepts) {
        std::size_t end = c.size();
        while (end > 0 && std::ispunct(static_cast<unsigned char>(c[end - 1]))) --end;
        std::string t = strip(c.substr(0, end));
        if (!t.empty()) trimmed.push_back(std::move(t));
    }
    cs.concepts = dedupe(trimmed);
    if (cs.concepts.size() < min_m) throw TooFewConcepts(cs.concepts.size(), min_m);
    return cs;
}

std::string render_concept_list(const ConceptSet& cs) {
    std::string out;
    for (const auto& c : cs.concepts) {
        out += "- ";
        out += c;
        out += '\n';
    }
    return out;
}

std::string concept_set_to_json(const ConceptSet& cs) {
    json j;
    j["iteration"] = cs.iteration;
    j["concepts"] = cs.concepts;
    return j.dump();
}

ConceptSet concept_set_from_json(const std::string& text) {
    json j = json::parse(text);
    ConceptSet cs;
    cs.iteration = j.at("iteration").get<int>();
    cs.concepts = j.at("concepts").get<std::vector<std::string>>();
    return cs;
}

namespace {

json record_to_json(const HistoryRecord& r) {
    json j;
    j["iteration"] = r.concept_set.iteration;
    j["concepts"] = r.concept_set.concepts;
    j["silhouette"] = r.silhouette;
    if (r.aux_acc) {
        j["aux_acc"] = *r.aux_acc;
    } else {
        j["aux_acc"] = nullptr;
    }
    return j;
}

HistoryRecord record_from_json(const json& j) {
    HistoryRecord r;
    r.concept_set.iteration = j.at("iteration").get<int>();
    r.concept_set.concepts = j.at("concepts").get<std::vector<std::string>>();
    r.silhouette = j.at("silhouette").get<double>();
    if (j.contains("aux_acc") && !j.at("aux_acc").is_null()) {
        r.aux_acc = j.at("aux_acc").get<double>();
    }
    return r;
}

}  // namespace

std::string history_to_json(const SearchHistory& history) {
    json arr = json::array();
    for (const auto& r : history.records()) arr.push_back(record_to_json(r));
    return arr.dump();
}

SearchHistory history_from_json(const std::string& text) {
    SearchHistory history;
    for (const auto& j : json::parse(text)) history.append(record_from_json(j));
    return history;
}

}  // namespace itgc
