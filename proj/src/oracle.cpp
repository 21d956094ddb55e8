#include "itgc/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "itgc/errors.hpp"
#include "itgc/rng.hpp"

namespace itgc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "attribute: value" -> (attribute, value); nullopt when there is no colon.
std::optional<std::pair<std::string, std::string>> split_concept(const std::string& text) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    return std::make_pair(trim(text.substr(0, colon)), trim(text.substr(colon + 1)));
}

const SynthWorld::Item* find_item(const SynthWorld& world, const std::string& id) {
    for (const auto& item : world.items) {
        if (item.id == id) return &item;
    }
    return nullptr;
}

double noise_for(const std::string& item_id, const std::string& concept_text,
                 const SynthOraclePolicy& policy) {
    if (policy.noise_sigma <= 0.0) return 0.0;
    std::uint64_t h = fnv1a64(item_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(concept_text, h);
    SplitMix64 rng(fnv1a64_mix(h, policy.seed));
    return rng.next_gaussian() * policy.noise_sigma;
}

double base_score(const SynthWorld& world, const SynthWorld::Item& item,
                  const std::string& concept_text) {
    auto parts = split_concept(concept_text);
    if (!parts) return 0.5;
    auto attr = world.attributes.find(parts->first);
    if (attr == world.attributes.end()) return 0.5;
    bool known_value =
        std::find(attr->second.begin(), attr->second.end(), parts->second) != attr->second.end();
    if (!known_value) return 0.5;
    return item.attrs.at(parts->first) == parts->second ? 1.0 : 0.0;
}

}  // namespace

double oracle_score(const SynthWorld& world, const std::string& item_id,
                    const std::string& concept_text, const SynthOraclePolicy& policy) {
    const SynthWorld::Item* item = find_item(world, item_id);
    if (!item) throw UnknownCriterion("item id " + item_id);
    return base_score(world, *item, concept_text) + noise_for(item_id, concept_text, policy);
}

ConceptSet oracle_generate(const SynthWorld& world, const std::string& criterion,
                           const SearchHistory& history, const SynthOraclePolicy& policy,
                           std::uint64_t sample_index) {
    if (!world.attributes.count(criterion)) throw UnknownCriterion(criterion);

    const int iteration = static_cast<int>(history.size()) + 1;
    if (sample_index == 0) sample_index = static_cast<std::uint64_t>(iteration);
    SplitMix64 rng(fnv1a64_mix(policy.seed, 0x517cc1b727220a95ull + sample_index));

    std::vector<std::string> distractors;
    std::size_t max_vocab = 0;
    for (const auto& [name, vocab] : world.attributes) {
        max_vocab = std::max(max_vocab, vocab.size());
        if (name != criterion) distractors.push_back(name);
    }
    const std::size_t target = 2 * max_vocab;

    std::vector<std::string> pool;
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& concept_text) {
        if (seen.insert(concept_dedupe_key(concept_text)).second) pool.push_back(concept_text);
    };

    auto draw_concept = [&] {
        const std::string* attr = &criterion;
        if (!distractors.empty() && rng.next_double() >= policy.relevance_bias) {
            attr = &distractors[rng.next_below(distractors.size())];
        }
        const auto& vocab = world.attributes.at(*attr);
        add(*attr + ": " + vocab[rng.next_below(vocab.size())]);
    };

    if (history.empty()) {
        // fresh proposal, duplicates collapse like parsed generator output
        for (std::size_t attempt = 0; pool.size() < target && attempt < 20 * target;
             ++attempt) {
            draw_concept();
        }
    } else {
        // Survivors of the best round so far seed the next proposal. Dropped
        // concepts are only occasionally replaced by a single fresh draw, so
        // the pool contracts onto a high-scoring core over the iterations.
        for (const auto& c : history.best().concept_set.concepts) {
            if (rng.next_double() >= policy.pool_mutation_rate) {
                add(c);
            } else if (rng.next_double() < 0.1) {
                draw_concept();
            }
        }
    }

    // Guarantee full value coverage for one attribute: the queried criterion
    // whenever the policy targets it at all (the prompt names it), otherwise
    // the best-covered attribute.
    std::string fill = criterion;
    if (policy.relevance_bias <= 0.0) {
        std::map<std::string, std::set<std::string>> covered;
        for (const auto& c : pool) {
            if (auto parts = split_concept(c)) {
                auto attr = world.attributes.find(parts->first);
                if (attr != world.attributes.end())
                    covered[parts->first].insert(parts->second);
            }
        }
        double best_ratio = -1.0;
        for (const auto& [name, vocab] : world.attributes) {
            if (name == criterion) continue;
            double ratio =
                static_cast<double>(covered[name].size()) / static_cast<double>(vocab.size());
            if (ratio > best_ratio) {
                best_ratio = ratio;
                fill = name;
            }
        }
    }
    for (const auto& value : world.attributes.at(fill)) {
        add(fill + ": " + value);
    }

    return ConceptSet{std::move(pool), iteration};
}

ConceptMatrix oracle_encode(const SynthWorld& world, const std::vector<std::string>& item_ids,
                            const ConceptSet& cs, const SynthOraclePolicy& policy) {
    std::unordered_map<std::string, const SynthWorld::Item*> index;
    index.reserve(world.items.size());
    for (const auto& item : world.items) index[item.id] = &item;

    ConceptMatrix z;
    z.n = item_ids.size();
    z.m = cs.size();
    z.concept_set = cs;
    z.scores.resize(z.n * z.m);
    for (std::size_t i = 0; i < z.n; ++i) {
        auto it = index.find(item_ids[i]);
        if (it == index.end()) throw UnknownCriterion("item id " + item_ids[i]);
        for (std::size_t c = 0; c < z.m; ++c) {
            z.at(i, c) = base_score(world, *it->second, cs.concepts[c]) +
                         noise_for(item_ids[i], cs.concepts[c], policy);
        }
    }
    return z;
}

namespace {

// Recovers (concepts, score) blocks from a rendered mutation prompt; the
// initial prompt yields no blocks. This is the oracle's only channel, the
// same one a live model gets.
SearchHistory history_from_prompt(const std::string& prompt) {
    SearchHistory history;
    std::vector<std::string> concepts;
    std::istringstream lines(prompt);
    std::string line;
    int iteration = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("- ", 0) == 0) {
            concepts.push_back(trim(line.substr(2)));
            continue;
        }
        if (concepts.empty()) continue;
        std::istringstream score_line(line);
        double score = 0.0;
        if (score_line >> score) {
            HistoryRecord record;
            record.concept_set = ConceptSet{concepts, ++iteration};
            record.silhouette = score;
            history.append(std::move(record));
            concepts.clear();
        }
    }
    return history;
}

}  // namespace

OracleGenerator::OracleGenerator(const SynthWorld& world, std::string criterion,
                                 SynthOraclePolicy policy)
    : world_(world), criterion_(std::move(criterion)), policy_(policy) {}

std::string OracleGenerator::generate(const std::string& prompt) {
    SearchHistory history = history_from_prompt(prompt);
    return render_concept_list(oracle_generate(world_, criterion_, history, policy_, ++calls_));
}

OracleEncoder::OracleEncoder(const SynthWorld& world, SynthOraclePolicy policy)
    : world_(world), policy_(policy) {}

ConceptMatrix OracleEncoder::encode(const std::vector<std::string>& item_ids,
                                    const ConceptSet& cs) {
    return oracle_encode(world_, item_ids, cs, policy_);
}

OracleScorer::OracleScorer(const SynthWorld& world, SynthOraclePolicy policy)
    : world_(world), policy_(policy) {}

double OracleScorer::score(const std::string& item_id, const std::string& concept_text) {
    double raw = oracle_score(world_, item_id, concept_text, policy_);
    return std::clamp(raw * 10.0, 0.0, 10.0);
}

}  // namespace itgc
