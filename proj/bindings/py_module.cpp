#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "itgc/clustering.hpp"
#include "itgc/concepts.hpp"
#include "itgc/encoding.hpp"
#include "itgc/errors.hpp"
#include "itgc/eval.hpp"
#include "itgc/oracle.hpp"
#include "itgc/search.hpp"
#include "itgc/synthworld.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

itgc::EmbeddingMatrix to_embedding(const Rows& rows) {
    itgc::EmbeddingMatrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? 0 : rows[0].size();
    for (const auto& row : rows) {
        if (row.size() != m.cols) throw itgc::DimensionMismatch(row.size(), m.cols);
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

itgc::ConceptMatrix to_concept_matrix(const Rows& rows, std::vector<std::string> concepts) {
    itgc::ConceptMatrix z;
    z.n = rows.size();
    z.m = rows.empty() ? 0 : rows[0].size();
    if (concepts.empty()) {
        for (std::size_t c = 0; c < z.m; ++c) concepts.push_back("c" + std::to_string(c));
    }
    if (concepts.size() != z.m) throw itgc::DimensionMismatch(concepts.size(), z.m);
    z.concept_set = itgc::ConceptSet{std::move(concepts), 0};
    for (const auto& row : rows) {
        if (row.size() != z.m) throw itgc::DimensionMismatch(row.size(), z.m);
        z.scores.insert(z.scores.end(), row.begin(), row.end());
    }
    return z;
}

Rows from_concept_matrix(const itgc::ConceptMatrix& z) {
    Rows rows(z.n);
    for (std::size_t i = 0; i < z.n; ++i) {
        rows[i].assign(z.row(i).begin(), z.row(i).end());
    }
    return rows;
}

py::dict search_result_to_dict(const itgc::SearchResult& result) {
    py::dict out;
    out["best_concepts"] = result.best_concepts.concepts;
    out["best_silhouette"] = result.best_silhouette;
    out["labels"] = result.best_assignment.labels;
    out["iterations_run"] = result.iterations_run;
    out["stop_reason"] = itgc::to_string(result.stop_reason);
    py::list history;
    for (const auto& record : result.history.records()) {
        py::dict rec;
        rec["iteration"] = record.concept_set.iteration;
        rec["concepts"] = record.concept_set.concepts;
        rec["silhouette"] = record.silhouette;
        history.append(std::move(rec));
    }
    out["history"] = std::move(history);
    return out;
}

}  // namespace

PYBIND11_MODULE(_itgc, m) {
    m.doc() = "Iterative text-guided clustering core";

    py::register_exception<itgc::Error>(m, "ItgcError");

    py::class_<itgc::SynthWorld>(m, "SynthWorld")
        .def_property_readonly("item_ids", &itgc::SynthWorld::item_ids)
        .def_property_readonly("attributes",
                               [](const itgc::SynthWorld& w) { return w.attributes; })
        .def("labels_for",
             [](const itgc::SynthWorld& w, const std::string& criterion) {
                 return itgc::labels_for(w, criterion);
             })
        .def("to_jsonl", [](const itgc::SynthWorld& w) { return itgc::world_to_jsonl(w); });

    m.def(
        "parse_concept_list",
        [](const std::string& raw) { return itgc::parse_concept_list(raw).concepts; },
        py::arg("raw"));

    m.def(
        "render_concept_list",
        [](const std::vector<std::string>& concepts) {
            return itgc::render_concept_list(itgc::ConceptSet{concepts, 0});
        },
        py::arg("concepts"));

    m.def(
        "initial_prompt",
        [](const std::string& criteria) { return itgc::initial_prompt(criteria); },
        py::arg("criteria"));

    m.def(
        "project",
        [](const Rows& images, const Rows& concept_embeddings,
           std::vector<std::string> concepts, bool normalize) {
            itgc::EmbeddingMatrix img = to_embedding(images);
            itgc::EmbeddingMatrix txt = to_embedding(concept_embeddings);
            if (concepts.empty()) {
                for (std::size_t c = 0; c < txt.rows; ++c)
                    concepts.push_back("c" + std::to_string(c));
            }
            return from_concept_matrix(
                itgc::project(img, txt, itgc::ConceptSet{std::move(concepts), 0}, normalize));
        },
        py::arg("images"), py::arg("concept_embeddings"),
        py::arg("concepts") = std::vector<std::string>{}, py::arg("normalize") = true);

    m.def(
        "standardize_columns",
        [](const Rows& z) {
            return from_concept_matrix(itgc::standardize_columns(to_concept_matrix(z, {})));
        },
        py::arg("z"));

    m.def(
        "top_activations",
        [](const Rows& z, const std::vector<std::string>& concepts, std::size_t item,
           std::size_t top_k) {
            return itgc::top_activations(to_concept_matrix(z, concepts), item, top_k);
        },
        py::arg("z"), py::arg("concepts"), py::arg("item"), py::arg("top_k"));

    m.def(
        "kmeans",
        [](const Rows& z, int k, int restarts, int max_iters, double tol,
           std::uint64_t seed) {
            itgc::KMeansConfig cfg{k, restarts, max_iters, tol, seed};
            return itgc::kmeans(to_concept_matrix(z, {}), cfg).labels;
        },
        py::arg("z"), py::arg("k"), py::arg("restarts") = 10, py::arg("max_iters") = 300,
        py::arg("tol") = 1e-4, py::arg("seed") = 0);

    m.def(
        "dbscan",
        [](const Rows& z, double eps, int min_pts) {
            itgc::DensityConfig cfg;
            cfg.eps = eps;
            cfg.min_pts = min_pts;
            return itgc::dbscan(to_concept_matrix(z, {}), cfg).labels;
        },
        py::arg("z"), py::arg("eps"), py::arg("min_pts") = 5);

    m.def(
        "hdbscan_lite",
        [](const Rows& z, const std::vector<double>& eps_grid, int min_pts) {
            itgc::DensityConfig cfg;
            cfg.eps_grid = eps_grid;
            cfg.eps = eps_grid.empty() ? 0.0 : eps_grid.front();
            cfg.min_pts = min_pts;
            return itgc::hdbscan_lite(to_concept_matrix(z, {}), cfg).labels;
        },
        py::arg("z"), py::arg("eps_grid"), py::arg("min_pts") = 5);

    m.def(
        "silhouette",
        [](const Rows& z, const std::vector<int>& labels) {
            return itgc::silhouette(to_concept_matrix(z, {}),
                                    itgc::Assignment::from_labels(labels));
        },
        py::arg("z"), py::arg("labels"));

    m.def("accuracy", &itgc::accuracy, py::arg("y_true"), py::arg("y_pred"));

    m.def(
        "generate_world",
        [](std::size_t n_items, const std::map<std::string, std::size_t>& attributes,
           std::uint64_t seed) { return itgc::generate_world(n_items, attributes, seed); },
        py::arg("n_items"), py::arg("attributes"), py::arg("seed") = 0);

    m.def(
        "run_oracle_search",
        [](const itgc::SynthWorld& world, const std::string& criteria, int num_clusters,
           int max_iterations, double relevance_bias, double pool_mutation_rate,
           double noise_sigma, std::uint64_t seed) {
            itgc::SynthOraclePolicy policy{relevance_bias, pool_mutation_rate, noise_sigma,
                                           seed};
            itgc::ClusteringTask task{criteria, num_clusters, world.item_ids()};
            itgc::SearchConfig cfg;
            cfg.max_iterations = max_iterations;
            cfg.seed = seed;
            cfg.encoder_mode = itgc::EncoderMode::query_score;
            itgc::KMeansConfig km;
            km.k = num_clusters;
            cfg.clustering = km;
            itgc::OracleGenerator generator(world, criteria, policy);
            itgc::OracleEncoder encoder(world, policy);
            return search_result_to_dict(
                itgc::run_search(task, cfg, {}, generator, encoder));
        },
        py::arg("world"), py::arg("criteria"), py::arg("num_clusters"),
        py::arg("max_iterations") = 10, py::arg("relevance_bias") = 0.5,
        py::arg("pool_mutation_rate") = 0.3, py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 0);
}
