#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string out;
};

CommandResult run_cli(const std::string& args) {
    std::string cmd = std::string(ITGC_BIN) + " " + args + " 2>/tmp/itgc_cli_stderr.txt";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) {
        result.out.append(buf, n);
    }
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string stderr_text() { return read_file("/tmp/itgc_cli_stderr.txt"); }

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("itgc_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t line_count(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

void write_synth_manifest(const fs::path& path, const fs::path& out_dir, int iterations) {
    json manifest;
    manifest["criteria"] = "color";
    manifest["num_clusters"] = 3;
    manifest["seed"] = 7;
    manifest["output_dir"] = out_dir.string();
    manifest["search"] = {{"max_iterations", iterations}};
    manifest["clustering"] = {{"algorithm", "kmeans"}};
    manifest["input"] = {
        {"type", "synthetic"},
        {"world",
         {{"n_items", 60}, {"attributes", {{"color", 3}, {"shape", 3}}}, {"seed", 7}}},
        {"policy",
         {{"relevance_bias", 0.8}, {"noise_sigma", 0.02}, {"seed", 7}}}};
    manifest["generator"] = {{"type", "oracle"}};
    std::ofstream(path) << manifest.dump(2);
}

}  // namespace

TEST_CASE("synth writes the world plus one label file per criterion") {
    fs::path dir = fresh_dir("synth");
    json spec = {{"n_items", 40},
                 {"attributes",
                  {{"shape", 4}, {"color", 4}, {"texture", 2}, {"count", 2}}},
                 {"seed", 3}};
    std::ofstream(dir / "spec.json") << spec.dump();

    CommandResult r = run_cli("synth --spec " + (dir / "spec.json").string() + " --out " +
                              (dir / "world").string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "world" / "world.jsonl"));
    for (const char* name : {"shape", "color", "texture", "count"}) {
        CHECK(fs::exists(dir / "world" / ("labels_" + std::string(name) + ".csv")));
    }
    CHECK(line_count(dir / "world" / "labels_color.csv") == 40);
}

TEST_CASE("synth is byte-reproducible for a fixed seed") {
    fs::path dir = fresh_dir("synth_repro");
    json spec = {{"n_items", 30}, {"attributes", {{"color", 3}}}, {"seed", 11}};
    std::ofstream(dir / "spec.json") << spec.dump();

    run_cli("synth --spec " + (dir / "spec.json").string() + " --out " +
            (dir / "a").string());
    run_cli("synth --spec " + (dir / "spec.json").string() + " --out " +
            (dir / "b").string());
    CHECK(read_file(dir / "a" / "world.jsonl") == read_file(dir / "b" / "world.jsonl"));
    CHECK(read_file(dir / "a" / "labels_color.csv") ==
          read_file(dir / "b" / "labels_color.csv"));
}

TEST_CASE("synth rejects an empty world") {
    fs::path dir = fresh_dir("synth_bad");
    std::ofstream(dir / "spec.json") << R"({"n_items": 0, "attributes": {"color": 3}})";
    CommandResult r = run_cli("synth --spec " + (dir / "spec.json").string() + " --out " +
                              (dir / "x").string());
    CHECK(r.exit_code == 1);
    CHECK(stderr_text().find("error") != std::string::npos);
}

TEST_CASE("run produces the five artifacts with consistent row counts") {
    fs::path dir = fresh_dir("run");
    write_synth_manifest(dir / "manifest.json", dir / "out", 3);

    CommandResult r = run_cli("run --manifest " + (dir / "manifest.json").string());
    CHECK(r.exit_code == 0);
    json summary = json::parse(r.out);

    for (const char* name :
         {"report.json", "assignments.csv", "history.csv", "concepts.txt",
          "activations.json"}) {
        CHECK(fs::exists(dir / "out" / name));
    }
    CHECK(line_count(dir / "out" / "assignments.csv") == 60);
    // header plus one row per completed iteration
    CHECK(line_count(dir / "out" / "history.csv") ==
          1 + summary.at("iterations_run").get<std::size_t>());

    json report = json::parse(read_file(dir / "out" / "report.json"));
    CHECK(report.at("assignments").size() == 60);
    CHECK(report.at("history").size() == summary.at("iterations_run").get<std::size_t>());

    // concepts.txt is a parseable dash list
    std::string concepts = read_file(dir / "out" / "concepts.txt");
    CHECK(concepts.rfind("- ", 0) == 0);
}

TEST_CASE("run fails cleanly when the embedding file is missing") {
    fs::path dir = fresh_dir("run_missing");
    json manifest;
    manifest["criteria"] = "color";
    manifest["num_clusters"] = 2;
    manifest["output_dir"] = (dir / "out").string();
    manifest["input"] = {{"type", "embedding_file"}, {"path", (dir / "absent.bin").string()}};
    manifest["concept_embeddings"] = {{"base_url", "http://127.0.0.1:1"}};
    manifest["generator"] = {{"type", "chat"},
                             {"backend", {{"base_url", "http://127.0.0.1:1"}}}};
    std::ofstream(dir / "manifest.json") << manifest.dump();

    CommandResult r = run_cli("run --manifest " + (dir / "manifest.json").string());
    CHECK(r.exit_code == 1);
    CHECK(stderr_text().find("absent.bin") != std::string::npos);
}

TEST_CASE("eval reports accuracy as four-decimal json") {
    fs::path dir = fresh_dir("eval");
    std::ofstream(dir / "truth.csv") << "a,0\nb,0\nc,1\nd,1\n";
    std::ofstream(dir / "same.csv") << "a,0\nb,0\nc,1\nd,1\n";
    CommandResult same = run_cli("eval --pred " + (dir / "same.csv").string() + " --truth " +
                                 (dir / "truth.csv").string());
    CHECK(same.exit_code == 0);
    CHECK(same.out == "{\"acc\": 1.0000}\n");

    // the half-right fixture: one cluster splits across both classes
    std::ofstream(dir / "half.csv") << "a,0\nb,1\nc,0\nd,1\n";
    CommandResult half = run_cli("eval --pred " + (dir / "half.csv").string() + " --truth " +
                                 (dir / "truth.csv").string());
    CHECK(half.out == "{\"acc\": 0.5000}\n");

    std::ofstream(dir / "other.csv") << "x,0\ny,0\nz,1\nw,1\n";
    CommandResult bad = run_cli("eval --pred " + (dir / "other.csv").string() + " --truth " +
                                (dir / "truth.csv").string());
    CHECK(bad.exit_code == 1);
    CHECK(stderr_text().find("id mismatch") != std::string::npos);
}

TEST_CASE("inspect prints ranked concepts for an item") {
    fs::path dir = fresh_dir("inspect");
    write_synth_manifest(dir / "manifest.json", dir / "out", 2);
    REQUIRE(run_cli("run --manifest " + (dir / "manifest.json").string()).exit_code == 0);

    CommandResult four = run_cli("inspect --report " + (dir / "out" / "report.json").string() +
                                 " --item item0");
    CHECK(four.exit_code == 0);
    std::size_t lines = 0;
    std::stringstream stream(four.out);
    std::string line;
    while (std::getline(stream, line)) {
        json parsed = json::parse(line);
        CHECK(parsed.contains("concept"));
        CHECK(parsed.contains("score"));
        ++lines;
    }
    CHECK(lines == 4);

    CommandResult two = run_cli("inspect --report " + (dir / "out" / "report.json").string() +
                                " --item item0 --top-k 2");
    CHECK(std::count(two.out.begin(), two.out.end(), '\n') == 2);

    CommandResult bogus = run_cli("inspect --report " +
                                  (dir / "out" / "report.json").string() + " --item nope");
    CHECK(bogus.exit_code == 1);
}
