#include <doctest.h>

#include <cmath>
#include <map>

#include "itgc/errors.hpp"
#include "itgc/eval.hpp"
#include "itgc/synthworld.hpp"

using namespace itgc;

namespace {

// normalized mutual information between two labelings, test-only
double normalized_mi(const std::vector<int>& a, const std::vector<int>& b) {
    Contingency c = contingency(a, b);
    double n = static_cast<double>(c.total);
    std::vector<double> pa(c.t_classes, 0), pb(c.p_clusters, 0);
    for (std::size_t t = 0; t < c.t_classes; ++t) {
        for (std::size_t p = 0; p < c.p_clusters; ++p) {
            pa[t] += static_cast<double>(c.matrix[t][p]);
            pb[p] += static_cast<double>(c.matrix[t][p]);
        }
    }
    double mi = 0, ha = 0, hb = 0;
    for (double v : pa) {
        if (v > 0) ha -= v / n * std::log(v / n);
    }
    for (double v : pb) {
        if (v > 0) hb -= v / n * std::log(v / n);
    }
    for (std::size_t t = 0; t < c.t_classes; ++t) {
        for (std::size_t p = 0; p < c.p_clusters; ++p) {
            double joint = static_cast<double>(c.matrix[t][p]) / n;
            if (joint > 0) mi += joint * std::log(joint * n * n / (pa[t] * pb[p]));
        }
    }
    double denom = std::sqrt(ha * hb);
    return denom > 0 ? mi / denom : 0.0;
}

}  // namespace

TEST_CASE("balanced assignment for a single attribute") {
    SynthWorld world = generate_world(8, {{"color", 2}}, 0);
    std::map<std::string, int> counts;
    for (const auto& item : world.items) ++counts[item.attrs.at("color")];
    CHECK(counts["color_v0"] == 4);
    CHECK(counts["color_v1"] == 4);
}

TEST_CASE("same seed reproduces the world, different seed does not") {
    SynthWorld a = generate_world(50, {{"color", 3}, {"shape", 4}}, 7);
    SynthWorld b = generate_world(50, {{"color", 3}, {"shape", 4}}, 7);
    CHECK(world_to_jsonl(a) == world_to_jsonl(b));

    SynthWorld c = generate_world(50, {{"color", 3}, {"shape", 4}}, 8);
    CHECK(world_to_jsonl(a) != world_to_jsonl(c));
}

TEST_CASE("clevr-like world balances every attribute") {
    SynthWorld world = generate_world(
        500, {{"shape", 10}, {"color", 10}, {"texture", 10}, {"count", 10}}, 1);
    for (const auto& [name, vocab] : world.attributes) {
        std::map<std::string, int> counts;
        for (const auto& item : world.items) ++counts[item.attrs.at(name)];
        REQUIRE(counts.size() == 10);
        for (const auto& [value, count] : counts) CHECK(count == 50);
    }
}

TEST_CASE("near-balance when sizes do not divide evenly") {
    SynthWorld world = generate_world(10, {{"shape", 3}}, 2);
    std::map<std::string, int> counts;
    for (const auto& item : world.items) ++counts[item.attrs.at("shape")];
    int lo = 1000, hi = 0;
    for (const auto& [value, count] : counts) {
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }
    CHECK(hi - lo <= 1);
}

TEST_CASE("labels_for is stable and self-consistent") {
    SynthWorld world = generate_world(8, {{"color", 2}}, 0);
    std::vector<int> labels = labels_for(world, "color");
    CHECK(labels.size() == 8);
    CHECK(labels == labels_for(world, "color"));
    for (int l : labels) CHECK((l == 0 || l == 1));
    CHECK(accuracy(labels, labels) == doctest::Approx(1.0));

    CHECK_THROWS_AS(labels_for(world, "nope"), UnknownCriterion);
}

TEST_CASE("criteria are statistically independent") {
    SynthWorld world = generate_world(1000, {{"color", 5}, {"shape", 5}}, 3);
    double nmi = normalized_mi(labels_for(world, "color"), labels_for(world, "shape"));
    CHECK(nmi < 0.05);
}

TEST_CASE("jsonl round-trip preserves items and labels") {
    SynthWorld world = generate_world(12, {{"color", 3}, {"shape", 2}}, 5);
    SynthWorld back = world_from_jsonl(world_to_jsonl(world));
    REQUIRE(back.items.size() == world.items.size());
    CHECK(back.items[4].id == world.items[4].id);
    CHECK(back.items[4].attrs == world.items[4].attrs);
    CHECK(labels_for(back, "color") == labels_for(world, "color"));
}

TEST_CASE("world generation rejects bad specs") {
    CHECK_THROWS_AS(generate_world(0, {{"color", 2}}, 0), InvalidTask);
    CHECK_THROWS_AS(generate_world(10, {{"color", 1}}, 0), InvalidTask);
}
