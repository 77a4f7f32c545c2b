#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pgmhd/graph.hpp"
#include "pgmhd/ingest.hpp"
#include "pgmhd/learn.hpp"

namespace fixtures {

// Classified job-search log: five users, their class and their search terms.
inline const std::string kJobSearchLog =
    "user1\tJava Developer\tJava|Java Developer|C#|Software Engineer\n"
    "user2\tNurse\tRN|Rigistered Nurse|Health Care\n"
    "user3\t.NET Developer\tC#|ASP|VB|Software Engineer|SE\n"
    "user4\tJava Developer\tJava|JEE|Struts|Software Engineer|SE\n"
    "user5\tHealth Care\tHealth Care Rep|HealthCare\n";

inline std::vector<pgmhd::Observation> job_search_observations(const std::string& text = kJobSearchLog) {
    std::istringstream in(text);
    const auto log = pgmhd::parse_search_log(in, /*case_fold=*/false);
    std::vector<pgmhd::Observation> out;
    for (const auto& row : log.rows) {
        for (auto& obs : pgmhd::rows_to_observations(row)) out.push_back(std::move(obs));
    }
    return out;
}

inline pgmhd::LeveledGraph job_search_graph() {
    pgmhd::LeveledGraph g(2);
    pgmhd::train_stream(g, job_search_observations());
    return g;
}

inline pgmhd::NodeRef root(std::string_view label) { return {0, label}; }
inline pgmhd::NodeRef term(std::string_view label) { return {1, label}; }

/// Random complete or partial paths over a small alphabet per level, so
/// labels collide often and arcs accumulate real counts.
inline std::vector<pgmhd::Observation> random_paths(std::mt19937_64& rng, std::size_t levels, std::size_t count,
                                                    std::size_t alphabet, bool allow_partial = true) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet - 1);
    std::uniform_int_distribution<std::size_t> len(2, levels);
    std::vector<pgmhd::Observation> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = allow_partial ? len(rng) : levels;
        pgmhd::Observation obs;
        for (std::size_t l = 0; l < n; ++l) obs.labels.push_back("L" + std::to_string(l) + "_" + std::to_string(pick(rng)));
        out.push_back(std::move(obs));
    }
    return out;
}

inline pgmhd::LeveledGraph train(std::size_t levels, const std::vector<pgmhd::Observation>& obs) {
    pgmhd::LeveledGraph g(levels);
    pgmhd::train_stream(g, obs);
    return g;
}

}  // namespace fixtures
