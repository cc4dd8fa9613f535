#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "phecp/serialize.hpp"

using namespace phecp;
using cd = std::complex<double>;

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(90) == "90");
    CHECK(format_double(0) == "0");
    CHECK(format_double(1e-300) == "1e-300");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("state JSON round-trip is bit exact") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        ModeRegistry reg{mechanical("u1", Owner::alice), optical("C", Owner::alice), mechanical("u2", Owner::bob),
                         optical("x", Owner::none)};
        auto s = oracle::random_state(rng, reg, 3, 3, 12);
        const std::string text = dump(state_to_json(s));
        auto back = state_from_json(Json::parse(text));
        CHECK(back.modes() == s.modes());
        CHECK(back.cutoff() == s.cutoff());
        REQUIRE(back.size() == s.size());
        auto it = back.begin();
        for (const auto& [k, a] : s) {
            CHECK(it->first == k);
            CHECK(it->second.real() == a.real());
            CHECK(it->second.imag() == a.imag());
            ++it;
        }
        CHECK(dump(state_to_json(back)) == text);
    }
}

TEST_CASE("state JSON layout") {
    ModeRegistry reg{mechanical("u1", Owner::alice), mechanical("u2", Owner::bob)};
    auto s = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(0, -1)}});
    const auto j = state_to_json(s);
    CHECK(j["modes"][0]["name"] == "u1");
    CHECK(j["modes"][0]["kind"] == "mechanical");
    CHECK(j["modes"][1]["owner"] == "bob");
    CHECK(j["cutoff"] == 2);
    // Keys sort with mode 0 most significant: |01> before |10>.
    CHECK(j["amplitudes"][0][0] == Json::array({0, 1}));
    CHECK(j["amplitudes"][0][2].get<double>() == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(state_to_text(s).find("|10>") != std::string::npos);
    CHECK(state_to_text(s).find("[u1 u2]") != std::string::npos);
}

TEST_CASE("state_from_json rejects malformed input") {
    auto good = Json::parse(R"({"modes":[{"name":"a","kind":"optical","owner":"none"}],"cutoff":2,
                                "amplitudes":[[[1],1.0,0.0]]})");
    CHECK_NOTHROW(state_from_json(good));
    auto bad = good;
    bad["amplitudes"][0][1] = 0.5;
    CHECK_THROWS_AS(state_from_json(bad), NotNormalized);
    bad = good;
    bad["amplitudes"][0][0] = Json::array({3});
    CHECK_THROWS_AS(state_from_json(bad), ParseError);
    bad = good;
    bad["modes"][0]["kind"] = "phononic";
    CHECK_THROWS_AS(state_from_json(bad), ParseError);
    bad = good;
    bad.erase("cutoff");
    CHECK_THROWS_AS(state_from_json(bad), ParseError);
    bad = good;
    bad["amplitudes"].push_back(Json::array({Json::array({1}), 0.0, 0.0}));
    CHECK_THROWS_AS(state_from_json(bad), ParseError);
    CHECK_THROWS_AS(state_from_json(Json::array()), ParseError);
}

TEST_CASE("report JSON is deterministic and complete") {
    SystemParams p;
    const double t = std::numbers::pi / p.g;
    auto e = run_bell_ecp(p, t, exhaustive);
    const auto a = dump(to_json(e)), b = dump(to_json(run_bell_ecp(p, t, exhaustive)));
    CHECK(a == b);
    auto j = Json::parse(a);
    CHECK(j["pipeline"] == "bell");
    CHECK(j["outcomes"].size() == 4);
    CHECK(j["class_probabilities"]["same"].get<double>() == doctest::Approx(0.5));
    auto final_state = state_from_json(j["outcomes"][0]["final_state"]);
    CHECK(fidelity(final_state, bell_target()) == doctest::Approx(1).epsilon(1e-12));

    auto mc = monte_carlo(Pipeline::bell, p, t, 1000, 1);
    auto mj = to_json(mc);
    CHECK(mj["outcomes"].size() == 4);
    CHECK(mj["trials"] == 1000);
    std::ostringstream csv;
    write_montecarlo_csv(csv, mc);
    CHECK(csv.str().rfind("outcome,count,frequency,expected\n", 0) == 0);

    std::ostringstream ecsv;
    write_enumeration_csv(ecsv, e);
    std::istringstream lines(ecsv.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 5);
}
