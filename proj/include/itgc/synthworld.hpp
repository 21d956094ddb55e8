#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace itgc {

/// A synthetic multi-criteria dataset: every item carries one value per
/// latent attribute, and every attribute induces its own ground-truth
/// partition.
struct SynthWorld {
    struct Item {
        std::string id;
        std::map<std::string, std::string> attrs;  // attribute name -> value
    };

    std::vector<Item> items;
    std::map<std::string, std::vector<std::string>> attributes;  // name -> value vocabulary
    std::uint64_t seed = 0;

    std::vector<std::string> item_ids() const;
};

/// Builds a world of n_items with independent, (near-)balanced attribute
/// assignments: per attribute the class sizes differ by at most one.
/// Deterministic given the seed.
SynthWorld generate_world(std::size_t n_items,
                          const std::map<std::string, std::size_t>& attribute_sizes,
                          std::uint64_t seed);

/// Ground-truth integer labels under one attribute, value -> vocabulary index.
std::vector<int> labels_for(const SynthWorld& world, const std::string& criterion);

/// One item per line: {"id": ..., "attrs": {...}}.
std::string world_to_jsonl(const SynthWorld& world);
SynthWorld world_from_jsonl(const std::string& text);

}  // namespace itgc
