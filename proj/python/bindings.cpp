#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pgmhd/ambiguity.hpp"
#include "pgmhd/bench.hpp"
#include "pgmhd/infer.hpp"
#include "pgmhd/learn.hpp"
#include "pgmhd/persist.hpp"
#include "pgmhd/similar.hpp"

namespace py = pybind11;
using namespace pgmhd;

namespace {

std::vector<Observation> to_observations(const std::vector<std::vector<std::string>>& paths) {
    std::vector<Observation> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(Observation{p, 0});
    return out;
}

py::list scores_to_list(const Classification& c) {
    py::list out;
    for (const auto& s : c.scores) out.append(py::make_tuple(s.label, s.score, s.rank));
    return out;
}

py::list similarity_to_list(const std::vector<SimilarityResult>& results) {
    py::list out;
    for (const auto& r : results) out.append(py::make_tuple(r.outcome, r.co, r.common_parents));
    return out;
}

}  // namespace

PYBIND11_MODULE(_pgmhd, m) {
    m.doc() = "Leveled frequency graphs: progressive training, classification, similarity and ambiguity queries";

    static py::exception<Error> error(m, "Error");
    py::register_exception<StructuralError>(m, "StructuralError", error.ptr());
    py::register_exception<LookupError>(m, "LookupError", error.ptr());
    py::register_exception<ArgumentError>(m, "ArgumentError", error.ptr());
    py::register_exception<UndefinedDistribution>(m, "UndefinedDistribution", error.ptr());
    py::register_exception<MutationError>(m, "MutationError", error.ptr());
    py::register_exception<CorruptionError>(m, "CorruptionError", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<FormatError>(m, "FormatError", error.ptr());

    py::class_<LeveledGraph>(m, "LeveledGraph")
        .def(py::init<std::size_t>(), py::arg("levels"))
        .def_property_readonly("levels", &LeveledGraph::levels)
        .def_property_readonly("observations", &LeveledGraph::observations)
        .def_property_readonly("frozen", &LeveledGraph::frozen)
        .def("node_count", py::overload_cast<>(&LeveledGraph::node_count, py::const_))
        .def("level_node_count", py::overload_cast<std::size_t>(&LeveledGraph::node_count, py::const_), py::arg("level"))
        .def("arc_count", py::overload_cast<>(&LeveledGraph::arc_count, py::const_))
        .def("transition_total", &LeveledGraph::transition_total, py::arg("parent_level"))
        .def("freeze", &LeveledGraph::freeze)
        .def("learn_path",
             [](LeveledGraph& g, const std::vector<std::string>& labels) {
                 std::vector<std::string_view> views(labels.begin(), labels.end());
                 g.learn_path(views);
             },
             py::arg("labels"))
        .def("add_arc_increment",
             [](LeveledGraph& g, std::size_t parent_level, const std::string& parent, const std::string& child,
                Frequency delta) { return g.add_arc_increment({parent_level, parent}, {parent_level + 1, child}, delta); },
             py::arg("parent_level"), py::arg("parent"), py::arg("child"), py::arg("delta") = 1)
        .def("merge_from", &LeveledGraph::merge_from, py::arg("other"))
        .def("contains", [](const LeveledGraph& g, std::size_t level, const std::string& label) { return g.contains({level, label}); })
        .def("in_weight", [](const LeveledGraph& g, std::size_t level, const std::string& label) { return g.in_weight({level, label}); })
        .def("out_weight", [](const LeveledGraph& g, std::size_t level, const std::string& label) { return g.out_weight({level, label}); })
        .def("arc_frequency",
             [](const LeveledGraph& g, std::size_t parent_level, const std::string& parent, const std::string& child) {
                 return g.arc_frequency({parent_level, parent}, {parent_level + 1, child});
             })
        .def("memory_footprint", &LeveledGraph::memory_footprint)
        .def("__eq__", [](const LeveledGraph& a, const LeveledGraph& b) { return a == b; });

    m.def("merge", &merge, py::arg("a"), py::arg("b"));
    m.def("validate", [](const LeveledGraph& g) {
        py::list out;
        for (const auto& v : validate(g)) out.append(py::make_tuple(v.rule, v.subject, v.message));
        return out;
    });

    m.def("parse_paths", [](const std::string& text, bool case_fold) {
        std::istringstream in(text);
        auto file = parse_paths(in, case_fold);
        std::vector<std::vector<std::string>> paths;
        for (auto& o : file.observations) paths.push_back(std::move(o.labels));
        return py::make_tuple(file.levels, paths);
    }, py::arg("text"), py::arg("case_fold") = false);
    m.def("parse_search_log", [](const std::string& text, bool case_fold) {
        std::istringstream in(text);
        const auto log = parse_search_log(in, case_fold);
        py::list rows;
        for (const auto& r : log.rows) rows.append(py::make_tuple(r.user_id, r.classification, r.terms));
        return rows;
    }, py::arg("text"), py::arg("case_fold") = true);

    m.def("train_sharded", [](std::size_t levels, const std::vector<std::vector<std::string>>& paths, std::size_t shards) {
        const auto obs = to_observations(paths);
        py::gil_scoped_release release;
        return train_sharded(levels, obs, shards);
    }, py::arg("levels"), py::arg("paths"), py::arg("shards") = 1);
    m.def("train_search_log", [](const std::string& text, bool case_fold, std::size_t shards) {
        std::istringstream in(text);
        auto batch = read_observations(in, InputFormat::searchlog, case_fold);
        if (batch.report.errors > 0) throw FormatError(batch.report.messages.front());
        return train_sharded(2, batch.observations, shards);
    }, py::arg("text"), py::arg("case_fold") = true, py::arg("shards") = 1);

    m.def("to_model_string", [](const LeveledGraph& g) { return py::bytes(to_model_string(g)); });
    m.def("from_model_string", [](const py::bytes& b) { return from_model_string(std::string(b)); });
    m.def("save_file", [](const LeveledGraph& g, const std::string& path) { return save_file(g, path); });
    m.def("load_file", [](const std::string& path) { return load_file(path); });

    m.def("classification_score", [](const LeveledGraph& g, std::size_t level, const std::string& parent, const std::string& child) {
        return classification_score(g, {level - 1, parent}, {level, child});
    }, py::arg("graph"), py::arg("level"), py::arg("parent"), py::arg("child"));
    m.def("m_estimate_score", [](const LeveledGraph& g, std::size_t level, const std::string& parent, const std::string& child,
                                 double m_est, double p_prior) {
        return m_estimate_score(g, {level - 1, parent}, {level, child}, {m_est, p_prior});
    }, py::arg("graph"), py::arg("level"), py::arg("parent"), py::arg("child"), py::arg("m_est") = 1.0, py::arg("p_prior") = 0.1);

    auto classify = [](auto fn) {
        return [fn](const LeveledGraph& g, const std::vector<std::string>& items, std::size_t level, double m_est,
                    double p_prior, std::size_t top_k, double threshold, bool normalize) {
            const auto c = fn(g, level, items, ClassifyOptions{{m_est, p_prior}, top_k, threshold, normalize});
            return py::make_tuple(scores_to_list(c), c.diagnostics);
        };
    };
    m.def("classify_instance",
          classify([](const LeveledGraph& g, std::size_t level, const std::vector<std::string>& f, const ClassifyOptions& o) {
              return classify_instance(g, level, f, o);
          }),
          py::arg("graph"), py::arg("features"), py::arg("level") = 1, py::arg("m_est") = 1.0, py::arg("p_prior") = 0.1,
          py::arg("top_k") = 10, py::arg("threshold") = 0.0, py::arg("normalize") = false);
    m.def("classify_path",
          classify([](const LeveledGraph& g, std::size_t level, const std::vector<std::string>& p, const ClassifyOptions& o) {
              return classify_path(g, level, p, o);
          }),
          py::arg("graph"), py::arg("path"), py::arg("level") = 1, py::arg("m_est") = 1.0, py::arg("p_prior") = 0.1,
          py::arg("top_k") = 10, py::arg("threshold") = 0.0, py::arg("normalize") = false);

    m.def("edge_prob", [](const LeveledGraph& g, std::size_t level, const std::string& parent, const std::string& child) {
        return edge_prob(g, {level - 1, parent}, {level, child});
    }, py::arg("graph"), py::arg("level"), py::arg("parent"), py::arg("child"));
    m.def("co_score", [](const LeveledGraph& g, std::size_t level, const std::string& x, const std::string& y) {
        return co_score(g, {level, x}, {level, y});
    }, py::arg("graph"), py::arg("level"), py::arg("x"), py::arg("y"));
    m.def("related_terms", [](const LeveledGraph& g, const std::string& term, std::size_t level, std::size_t top_k, double min_co) {
        return similarity_to_list(related_terms(g, {level, term}, top_k, min_co));
    }, py::arg("graph"), py::arg("term"), py::arg("level") = 1, py::arg("top_k") = 10, py::arg("min_co") = 0.0);

    m.def("npmi", [](const LeveledGraph& g, std::size_t level, const std::string& parent, const std::string& child) {
        return npmi(g, {level - 1, parent}, {level, child});
    }, py::arg("graph"), py::arg("level"), py::arg("parent"), py::arg("child"));

    py::class_<AmbiguityReport>(m, "AmbiguityReport")
        .def_readonly("term", &AmbiguityReport::term)
        .def_readonly("ambiguous", &AmbiguityReport::ambiguous)
        .def_property_readonly("parent_scores", [](const AmbiguityReport& r) {
            py::list out;
            for (const auto& p : r.parent_scores) out.append(py::make_tuple(p.parent, p.npmi));
            return out;
        })
        .def_property_readonly("senses", [](const AmbiguityReport& r) {
            py::list out;
            for (const auto& s : r.senses) out.append(py::make_tuple(s.parents, similarity_to_list(s.related)));
            return out;
        });
    m.def("ambiguity_report", [](const LeveledGraph& g, const std::string& term, std::size_t level, double tau,
                                 double sim_threshold, std::size_t related_k) {
        return ambiguity_report(g, {level, term}, AmbiguityOptions{tau, sim_threshold, related_k});
    }, py::arg("graph"), py::arg("term"), py::arg("level") = 1, py::arg("tau") = 0.1, py::arg("sim_threshold") = 0.2,
          py::arg("related_k") = 5);

    m.def("dense_cpt_entries", &bench::dense_cpt_entries, py::arg("classes"), py::arg("distinct_terms"));
}
