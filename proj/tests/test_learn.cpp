#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "pgmhd/learn.hpp"
#include "pgmhd/persist.hpp"

using namespace pgmhd;
using fixtures::root;
using fixtures::term;

TEST_CASE("train_stream on the job-search log") {
    LeveledGraph g(2);
    std::istringstream in(fixtures::kJobSearchLog);
    const auto report = train_stream(g, in, InputFormat::searchlog, false);
    CHECK(report.rows == 5);
    CHECK(report.observations == 19);
    CHECK(report.errors == 0);
    CHECK(g.observations() == 19);
    CHECK(g.node_count(0) == 4);
    CHECK(g.node_count(1) == 14);
    CHECK(g.arc_count() == 17);
}

TEST_CASE("train_stream on a paths file") {
    LeveledGraph g(3);
    std::istringstream in("levels 3\nG1\tF1\tF2\nG1\tF1\nG2\tF1\tF3\n");
    const auto report = train_stream(g, in, InputFormat::paths, false);
    CHECK(report.observations == 3);
    CHECK(g.observations() == 3);
    CHECK(g.transition_total(0) == 3);
    CHECK(g.transition_total(1) == 2);
    CHECK(g.in_weight({1, "F1"}) == 3);
    CHECK(g.out_weight({1, "F1"}) == 2);
}

TEST_CASE("malformed rows are reported and skipped") {
    LeveledGraph g(2);
    std::istringstream in("u1\tA\tx\nbroken row\nu2\tB\t|\nu3\tA\ty\n");
    const auto report = train_stream(g, in, InputFormat::searchlog, true);
    CHECK(report.rows == 2);
    CHECK(report.errors == 1);
    CHECK(report.skipped == 1);
    REQUIRE(report.messages.size() == 1);
    CHECK(report.messages[0].find("line 2") != std::string::npos);
    CHECK(g.observations() == 2);
}

TEST_CASE("path longer than the graph is rejected") {
    LeveledGraph g(2);
    CHECK_THROWS_AS(learn_observation(g, Observation{{"a", "b", "c"}, 1}), StructuralError);
    CHECK(g.node_count() == 0);
}

TEST_CASE("training is order independent") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 30; ++round) {
        auto paths = fixtures::random_paths(rng, 3, 100, 5);
        const auto a = fixtures::train(3, paths);
        std::shuffle(paths.begin(), paths.end(), rng);
        const auto b = fixtures::train(3, paths);
        CHECK(to_model_string(a) == to_model_string(b));
    }
}

TEST_CASE("train_sharded equals sequential training") {
    std::mt19937_64 rng(33);
    const auto paths = fixtures::random_paths(rng, 4, 500, 8);
    const auto expected = to_model_string(fixtures::train(4, paths));
    for (std::size_t shards : {1, 2, 3, 7, 64, 1000}) {
        CHECK(to_model_string(train_sharded(4, paths, shards)) == expected);
    }
    CHECK_THROWS_AS(train_sharded(4, paths, 0), ArgumentError);
}

TEST_CASE("train_sharded with a generator source") {
    const PathSource source = [](std::size_t i, std::vector<std::string_view>& out) {
        static const std::string_view classes[] = {"a", "b", "c"};
        static const std::string_view terms[] = {"x", "y", "z", "w"};
        if (i % 10 == 9) return;  // skipped row
        out.push_back(classes[i % 3]);
        out.push_back(terms[i % 4]);
    };
    const auto one = train_sharded(2, 1000, source, 1);
    const auto four = train_sharded(2, 1000, source, 4);
    CHECK(one.observations() == 900);
    CHECK(one == four);
}

TEST_CASE("a failing shard propagates its error") {
    const PathSource source = [](std::size_t i, std::vector<std::string_view>& out) {
        out.push_back("a");
        out.push_back("b");
        if (i == 37) out.push_back("too deep");
    };
    CHECK_THROWS_AS(train_sharded(2, 100, source, 4), StructuralError);
}
