#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drcycle/calculus.hpp"
#include "drcycle/enumerate.hpp"
#include "drcycle/verify.hpp"

using namespace drc;

namespace {

CheckParams P(const json& j) { return CheckParams::from_json(j); }

}  // namespace

TEST_CASE("polynomiality reports degrees") {
    auto rep = check_polynomiality(P({{"g", 1}, {"A", {0}}, {"c", 1}, {"mode", "moduli"}}));
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.details["max_degree"] == 2);
    auto g0 = check_polynomiality(P({{"g", 0}, {"A", {1, 2, -3, 0}}, {"c", 0}, {"mode", "moduli"}}));
    CHECK(g0.verdict == Verdict::Pass);
    CHECK(g0.details["max_degree"] == 0);
    auto under = check_polynomiality(P({{"g", 1}, {"A", {0}}, {"c", 1}, {"mode", "moduli"}, {"D", 0}}));
    CHECK(under.verdict == Verdict::Fail);
    CHECK(under.witness.contains("r"));
}

TEST_CASE("vanishing in genus zero and one") {
    auto g0 = check_vanishing(P({{"g", 0}, {"A", {2, -1, 0, 0, -1}}, {"c", 1}}));
    CHECK(g0.verdict == Verdict::Pass);
    CHECK(g0.details["certificate"] == "perfect pairing");
    auto g1 = check_vanishing(P({{"g", 1}, {"A", {1, -1}}, {"c", 2}}));
    CHECK(g1.verdict == Verdict::Pass);
    CHECK(g1.details["certificate"] == "necessary condition");
    CHECK_THROWS(check_vanishing(P({{"g", 1}, {"A", {1, -1}}, {"c", 1}})));
    auto ctl = check_vanishing(P({{"g", 0}, {"A", {2, -1, 0, 0, -1}}, {"c", 1}, {"perturb", true}}));
    CHECK(ctl.verdict == Verdict::Fail);
}

TEST_CASE("invariances on (1,2,0)") {
    for (const char* w : {"I", "II", "IV"}) {
        auto rep = check_invariance(P({{"which", w}, {"g", 1}, {"A", {1, -1}}, {"c", 2}}));
        CHECK_MESSAGE(rep.verdict == Verdict::Pass, w);
    }
    auto III = check_invariance(P({{"which", "III"}, {"g", 1}, {"A", {1, -1}}, {"c", 2}, {"shift", {1, -1}}}));
    CHECK(III.verdict == Verdict::Pass);
    auto trunc = check_invariance(P({{"which", "I"}, {"g", 1}, {"A", {1, -1}}, {"c", 2}, {"max_edges", 1}}));
    CHECK(trunc.verdict == Verdict::Inconclusive);
    CHECK_THROWS(check_invariance(P({{"which", "VII"}})));
}

TEST_CASE("separating coefficient difference") {
    // d1 = 3 with one leg of weight 1 on that side: -(3-1-1)^2 + (3-1)^2 = 3
    Graph here({0, 1}, {{0, 1}}, {0, 1}, {3, -3});
    Graph shifted({0, 1}, {{0, 1}}, {0, 1}, {2, -2});
    std::vector<int> A{1, -1};
    CHECK(separating_coefficient(shifted, A) - separating_coefficient(here, A) == 3);
    auto V = check_invariance(P({{"which", "V"}, {"g", 1}, {"A", {1, -1}}, {"c", 1}, {"bound", 3}}));
    CHECK(V.verdict == Verdict::Pass);
    CHECK(V.details["comparisons"] > 0);
    auto VI = check_invariance(P({{"which", "VI"}, {"c", 3}}));
    CHECK(VI.verdict == Verdict::Pass);
}

TEST_CASE("compact type and conjecture A") {
    CHECK(check_compact_type(P({{"g", 1}, {"A", {1, -1}}})).verdict == Verdict::Pass);
    CHECK(check_compact_type(P({{"g", 2}, {"A", json::array()}})).verdict == Verdict::Pass);
    auto a = check_conjectureA(P({{"g", 1}, {"A", {0}}, {"k", 0}}));
    CHECK(a.verdict == Verdict::Pass);
    CHECK(a.details["integrals"][0]["dr"] == "-1/24");
    auto g0 = check_conjectureA(P({{"g", 0}, {"A", {1, 2, -3, 0}}}));
    CHECK(g0.verdict == Verdict::Pass);
    for (auto& row : g0.details["integrals"]) CHECK(row["dr"] == row["oracle"]);
    auto r1 = check_conjectureA(P({{"g", 1}, {"A", {1, -1}}, {"k", 0}}));
    auto r2 = check_conjectureA(P({{"g", 1}, {"A", {2, -2}}, {"k", 0}}));
    CHECK(r1.verdict == Verdict::Pass);
    CHECK(r2.verdict == Verdict::Pass);
}

TEST_CASE("twist pullback and dualization are involutive where expected") {
    PixtonRequest req;
    req.g = 1;
    req.n = 2;
    req.A = {2, -1};
    req.d = 1;
    req.c = 1;
    req.degree_bound = 3;
    auto x = pixton_class(req);
    CHECK(dualize(dualize(x)) == x);
    auto there = twist_pullback(x, {1, 0});
    auto back = twist_pullback(there, {-1, 0});
    CHECK(back == x);
    CHECK(base_twist_defect(x).empty());
}

TEST_CASE("decorated strata") {
    // codimension one on M_{1,1}: psi_1, kappa_1 and the loop
    CHECK(decorated_strata(1, 1, 1).size() == 3);
    // codimension zero is the fundamental class only
    CHECK(decorated_strata(2, 0, 0).size() == 1);
    for (auto& s : decorated_strata(0, 5, 1)) CHECK(s.codim() == 1);
}

TEST_CASE("runner keeps job order") {
    std::vector<CheckJob> jobs{{"compact_type", P({{"g", 1}, {"A", {1, -1}}})},
                               {"invariance", P({{"which", "VI"}, {"c", 2}})},
                               {"polynomiality", P({{"g", 1}, {"A", {0}}, {"c", 1}, {"mode", "moduli"}, {"D", 0}})}};
    auto reps = run_checks(jobs);
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].name == "compact_type");
    CHECK(reps[2].verdict == Verdict::Fail);
    auto table = report_table(reps);
    CHECK(table.find("inconclusive") == std::string::npos);
    CHECK(reps[1].to_json()["verdict"] == "pass");
}
