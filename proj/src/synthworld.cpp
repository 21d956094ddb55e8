#include "itgc/synthworld.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "itgc/errors.hpp"
#include "itgc/rng.hpp"

namespace itgc {

using nlohmann::json;

std::vector<std::string> SynthWorld::item_ids() const {
    std::vector<std::string> ids;
    ids.reserve(items.size());
    for (const auto& item : items) ids.push_back(item.id);
    return ids;
}

SynthWorld generate_world(std::size_t n_items,
                          const std::map<std::string, std::size_t>& attribute_sizes,
                          std::uint64_t seed) {
    if (n_items == 0) throw InvalidTask("world needs at least one item");

    SynthWorld world;
    world.seed = seed;
    world.items.resize(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        world.items[i].id = "item" + std::to_string(i);
    }

    for (const auto& [name, vocab_size] : attribute_sizes) {
        if (vocab_size < 2) throw InvalidTask("attribute '" + name + "' needs >= 2 values");
        std::vector<std::string> vocab;
        vocab.reserve(vocab_size);
        for (std::size_t v = 0; v < vocab_size; ++v) {
            vocab.push_back(name + "_v" + std::to_string(v));
        }

        // round-robin values over a per-attribute shuffled item order keeps
        // class sizes within one of each other and attributes independent
        std::vector<std::size_t> order(n_items);
        std::iota(order.begin(), order.end(), 0);
        SplitMix64 rng(fnv1a64(name, fnv1a64_mix(0xcbf29ce484222325ull, seed)));
        for (std::size_t i = n_items; i > 1; --i) {
            std::size_t j = rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t pos = 0; pos < n_items; ++pos) {
            world.items[order[pos]].attrs[name] = vocab[pos % vocab_size];
        }
        world.attributes[name] = std::move(vocab);
    }
    return world;
}

std::vector<int> labels_for(const SynthWorld& world, const std::string& criterion) {
    auto it = world.attributes.find(criterion);
    if (it == world.attributes.end()) throw UnknownCriterion(criterion);

    std::map<std::string, int> value_index;
    for (std::size_t v = 0; v < it->second.size(); ++v) {
        value_index[it->second[v]] = static_cast<int>(v);
    }
    std::vector<int> labels;
    labels.reserve(world.items.size());
    for (const auto& item : world.items) {
        labels.push_back(value_index.at(item.attrs.at(criterion)));
    }
    return labels;
}

std::string world_to_jsonl(const SynthWorld& world) {
    std::string out;
    for (const auto& item : world.items) {
        json j;
        j["id"] = item.id;
        j["attrs"] = item.attrs;
        out += j.dump();
        out += '\n';
    }
    return out;
}

SynthWorld world_from_jsonl(const std::string& text) {
    SynthWorld world;
    std::istringstream lines(text);
    std::string line;
    std::map<std::string, std::set<std::string>> values_seen;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        SynthWorld::Item item;
        item.id = j.at("id").get<std::string>();
        for (const auto& [name, value] : j.at("attrs").items()) {
            item.attrs[name] = value.get<std::string>();
            values_seen[name].insert(value.get<std::string>());
        }
        world.items.push_back(std::move(item));
    }
    for (const auto& [name, values] : values_seen) {
        world.attributes[name] = std::vector<std::string>(values.begin(), values.end());
    }
    return world;
}

}  // namespace itgc
