#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "pgmhd/ambiguity.hpp"

using namespace pgmhd;
using doctest::Approx;
using fixtures::root;
using fixtures::term;

TEST_CASE("npmi on the job-search log") {
    const auto g = fixtures::job_search_graph();
    CHECK(*npmi(g, root("Java Developer"), term("Java")) == Approx(std::log(19.0 / 9.0) / std::log(19.0 / 2.0)).epsilon(1e-12));
    CHECK(*npmi(g, root(".NET Developer"), term("C#")) == Approx(std::log(1.9) / std::log(19.0)).epsilon(1e-12));
    CHECK_FALSE(npmi(g, root("Nurse"), term("Java")).has_value());
    CHECK_THROWS_AS(npmi(g, root("Nurse"), term("Cobol")), LookupError);
}

TEST_CASE("npmi of a certain pair is one") {
    LeveledGraph g(2);
    g.add_arc_increment(root("A"), term("x"), 5);
    CHECK(*npmi(g, root("A"), term("x")) == 1.0);
}

TEST_CASE("npmi stays within [-1, 1]") {
    std::mt19937_64 rng(707);
    for (int round = 0; round < 100; ++round) {
        const auto g = fixtures::train(2, fixtures::random_paths(rng, 2, 1 + rng() % 200, 1 + rng() % 8));
        for (NodeIndex v = 0; v < g.node_count(1); ++v) {
            for (NodeIndex w : g.parents_of(1, v)) {
                const auto s = npmi(g, root(g.label(0, w)), term(g.label(1, v)));
                REQUIRE(s.has_value());
                CHECK(*s >= -1.0);
                CHECK(*s <= 1.0);
            }
        }
    }
}

TEST_CASE("child distribution cosine") {
    const auto g = fixtures::job_search_graph();
    const auto jd = *g.find(root("Java Developer"));
    const auto net = *g.find(root(".NET Developer"));
    const auto nurse = *g.find(root("Nurse"));
    CHECK(child_distribution_cosine(g, 0, jd, net) == Approx(4.0 / std::sqrt(65.0)).epsilon(1e-12));
    CHECK(child_distribution_cosine(g, 0, jd, nurse) == 0.0);
    CHECK(child_distribution_cosine(g, 0, jd, jd) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ambiguity_report on the job-search log") {
    const auto g = fixtures::job_search_graph();
    SUBCASE("defaults: only .NET Developer clears tau") {
        const auto r = ambiguity_report(g, term("C#"));
        CHECK(r.term == "C#");
        REQUIRE(r.parent_scores.size() == 2);
        CHECK(r.parent_scores[0].parent == ".NET Developer");
        CHECK(r.senses.size() == 1);
        CHECK_FALSE(r.ambiguous);
    }
    SUBCASE("tau 0 with a strict similarity threshold splits the parents") {
        const auto r = ambiguity_report(g, term("C#"), {0.0, 0.9, 5});
        REQUIRE(r.senses.size() == 2);
        CHECK(r.ambiguous);
        CHECK(r.senses[0].parents == std::vector<std::string>{".NET Developer"});
        CHECK(r.senses[1].parents == std::vector<std::string>{"Java Developer"});
        for (const auto& s : r.senses) {
            CHECK_FALSE(s.related.empty());
            for (const auto& x : s.related) CHECK(x.outcome != "C#");
        }
    }
    SUBCASE("tau 0 with a loose threshold keeps one sense") {
        const auto r = ambiguity_report(g, term("C#"), {0.0, 0.2, 5});
        REQUIRE(r.senses.size() == 1);
        CHECK(r.senses[0].parents.size() == 2);
    }
    SUBCASE("bad options") {
        CHECK_THROWS_AS(ambiguity_report(g, term("C#"), {2.0, 0.2, 5}), ArgumentError);
        CHECK_THROWS_AS(ambiguity_report(g, root("Nurse")), ArgumentError);
        CHECK_THROWS_AS(ambiguity_report(g, term("Cobol")), LookupError);
    }
}

TEST_CASE("senses partition the qualifying parents") {
    std::mt19937_64 rng(808);
    for (int round = 0; round < 60; ++round) {
        const auto g = fixtures::train(2, fixtures::random_paths(rng, 2, 300, 6));
        const AmbiguityOptions opts{-0.2 + 0.1 * (round % 5), 0.1 * (round % 10), 3};
        for (NodeIndex v = 0; v < g.node_count(1); ++v) {
            const auto r = ambiguity_report(g, term(g.label(1, v)), opts);
            std::set<std::string> qualifying;
            for (const auto& p : r.parent_scores) {
                if (p.npmi >= opts.tau) qualifying.insert(p.parent);
            }
            std::multiset<std::string> covered;
            for (const auto& s : r.senses) {
                CHECK_FALSE(s.parents.empty());
                covered.insert(s.parents.begin(), s.parents.end());
            }
            CHECK(covered.size() == qualifying.size());
            CHECK(std::set<std::string>(covered.begin(), covered.end()) == qualifying);
            CHECK(r.ambiguous == (r.senses.size() >= 2));
        }
    }
}
