#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "itgc/errors.hpp"
#include "itgc/runner.hpp"
#include "itgc/synthworld.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void print_error(const std::string& message) {
    json j;
    j["error"] = message;
    std::cerr << j.dump() << '\n';
}

int cmd_run(const std::string& manifest_path, const std::string& out_override) {
    itgc::RunManifest manifest = itgc::load_manifest(manifest_path);
    std::string out_dir = out_override.empty() ? manifest.output_dir : out_override;
    itgc::RunOutcome outcome = itgc::execute_run(manifest);
    itgc::write_run_artifacts(manifest, outcome, out_dir);
    json summary;
    summary["best_silhouette"] = outcome.result.best_silhouette;
    summary["iterations_run"] = outcome.result.iterations_run;
    summary["stop_reason"] = itgc::to_string(outcome.result.stop_reason);
    summary["output_dir"] = out_dir;
    std::cout << summary.dump() << '\n';
    return outcome.exit_code;
}

int cmd_eval(const std::string& pred, const std::string& truth) {
    double acc = itgc::eval_label_files(pred, truth);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "{\"acc\": %.4f}", acc);
    std::cout << buf << '\n';
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw itgc::Error("cannot read spec: " + spec_path);
    json spec = json::parse(in);

    std::map<std::string, std::size_t> attributes;
    for (const auto& [name, size] : spec.at("attributes").items()) {
        attributes[name] = size.get<std::size_t>();
    }
    itgc::SynthWorld world = itgc::generate_world(spec.at("n_items").get<std::size_t>(),
                                                  attributes, spec.value("seed", 0ull));

    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "world.jsonl") << itgc::world_to_jsonl(world);
    for (const auto& [name, vocab] : world.attributes) {
        itgc::write_label_csv((fs::path(out_dir) / ("labels_" + name + ".csv")).string(),
                              world.item_ids(), itgc::labels_for(world, name));
    }
    json summary;
    summary["items"] = world.items.size();
    summary["criteria"] = json::object();
    for (const auto& [name, vocab] : world.attributes) summary["criteria"][name] = vocab.size();
    std::cout << summary.dump() << '\n';
    return 0;
}

int cmd_inspect(const std::string& report_path, const std::string& item_id, int top_k) {
    std::ifstream in(report_path);
    if (!in) throw itgc::Error("cannot read report: " + report_path);
    json report = json::parse(in);
    const json& activations = report.at("activations");
    if (!activations.contains(item_id)) {
        throw itgc::Error("item " + item_id + " not present in report activations");
    }
    const json& list = activations.at(item_id);
    int shown = 0;
    for (const auto& entry : list) {
        if (shown++ >= top_k) break;
        json line;
        line["concept"] = entry.at(0);
        line["score"] = entry.at(1);
        std::cout << line.dump() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative text-guided clustering in a language concept space"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string out_override;
    auto* run = app.add_subcommand("run", "run a search from a JSON manifest");
    run->add_option("--manifest", manifest_path, "manifest path")->required();
    run->add_option("--out", out_override, "override the manifest output directory");

    std::string pred_path;
    std::string truth_path;
    auto* eval = app.add_subcommand("eval", "clustering accuracy of predictions vs truth");
    eval->add_option("--pred", pred_path, "predicted labels csv")->required();
    eval->add_option("--truth", truth_path, "ground-truth labels csv")->required();

    std::string spec_path;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate a synthetic multi-criteria world");
    synth->add_option("--spec", spec_path, "world spec json")->required();
    synth->add_option("--out", synth_out, "output directory")->required();

    std::string report_path;
    std::string item_id;
    int top_k = 4;
    auto* inspect = app.add_subcommand("inspect", "top activated concepts for one item");
    inspect->add_option("--report", report_path, "report.json path")->required();
    inspect->add_option("--item", item_id, "item id")->required();
    inspect->add_option("--top-k", top_k, "number of concepts to show");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(manifest_path, out_override);
        if (eval->parsed()) return cmd_eval(pred_path, truth_path);
        if (synth->parsed()) return cmd_synth(spec_path, synth_out);
        if (inspect->parsed()) return cmd_inspect(report_path, item_id, top_k);
    } catch (const std::exception& e) {
        print_error(e.what());
        return 1;
    }
    return 0;
}
