#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "phecp/fock.hpp"

using namespace phecp;
using cd = std::complex<double>;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

ModeRegistry pair_registry(std::string a, std::string b, ModeKind kind = ModeKind::mechanical) {
    return ModeRegistry{{a, kind, Owner::alice}, {b, kind, Owner::bob}};
}

}  // namespace

TEST_CASE("registry rejects duplicate names") {
    ModeRegistry reg{mechanical("b1"), mechanical("b2")};
    CHECK_THROWS_AS(reg.add(optical("b1")), ModeCollision);
    CHECK(reg.at("b2").kind == ModeKind::mechanical);
    CHECK_THROWS_AS(reg.at("zz"), ModeMismatch);
}

TEST_CASE("make_state") {
    auto reg = pair_registry("b1", "b2");

    SUBCASE("Bell input alpha|10> + beta|01>") {
        const cd alpha(std::sqrt(0.8)), beta(std::sqrt(0.2));
        auto s = make_state<double>(reg, {{{1, 0}, alpha}, {{0, 1}, beta}});
        CHECK(std::abs(s.amplitude({1, 0}) - alpha) < 1e-15);
        CHECK(std::abs(s.amplitude({0, 1}) - beta) < 1e-15);
        CHECK(s.size() == 2);
    }
    SUBCASE("single term normalizes to unit amplitude") {
        auto s = make_state<double>(reg, {{{0, 0}, cd(5)}});
        CHECK(s.amplitude({0, 0}) == cd(1));
    }
    SUBCASE("equal terms") {
        auto s = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(1)}});
        CHECK(std::abs(s.amplitude({1, 0}) - inv_sqrt2) < 1e-15);
        CHECK(std::abs(s.amplitude({0, 1}) - inv_sqrt2) < 1e-15);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(make_state<double>(reg, {{{1, 0}, cd(0)}}), ZeroVector);
        CHECK_THROWS_AS(make_state<double>(reg, {{{1, 0}, cd(1)}, {{1, 0}, cd(-1)}}), ZeroVector);
        CHECK_THROWS_AS(make_state<double>(reg, {{{1}, cd(1)}}), BadOccupation);
        CHECK_THROWS_AS(make_state<double>(reg, {{{3, 0}, cd(1)}}), BadOccupation);
        CHECK_THROWS_AS(make_state<double>(reg, {{{-1, 0}, cd(1)}}), BadOccupation);
    }
    SUBCASE("amplitudes below prune epsilon are dropped") {
        auto s = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(1e-16)}});
        CHECK(s.size() == 1);
    }
}

TEST_CASE("tensor") {
    ModeRegistry ra{optical("A")}, rb{optical("B")};
    auto one = basis_state<double>(ra, {1});
    auto zero = basis_state<double>(rb, {0});

    SUBCASE("basis product") {
        auto p = tensor(one, zero);
        REQUIRE(p.num_modes() == 2);
        CHECK(p.modes()[0].name == "A");
        CHECK(p.amplitude({1, 0}) == cd(1));
    }
    SUBCASE("two input pairs give alpha^2, alpha beta, beta alpha, beta^2") {
        const cd alpha(0.6, 0.0), beta(0.0, 0.8);
        auto u = make_state<double>(pair_registry("u1", "u2"), {{{1, 0}, alpha}, {{0, 1}, beta}});
        auto v = make_state<double>(pair_registry("v1", "v2"), {{{1, 0}, alpha}, {{0, 1}, beta}});
        auto uv = tensor(u, v);
        CHECK(std::abs(uv.amplitude({1, 0, 1, 0}) - alpha * alpha) < 1e-15);
        CHECK(std::abs(uv.amplitude({1, 0, 0, 1}) - alpha * beta) < 1e-15);
        CHECK(std::abs(uv.amplitude({0, 1, 1, 0}) - beta * alpha) < 1e-15);
        CHECK(std::abs(uv.amplitude({0, 1, 0, 1}) - beta * beta) < 1e-15);
        CHECK(std::abs(uv.squared_norm() - 1) < 1e-12);
    }
    SUBCASE("tensor with a vacuum mode adds a zero column") {
        auto u = make_state<double>(pair_registry("u1", "u2"), {{{1, 0}, cd(0.6)}, {{0, 1}, cd(0.8)}});
        auto p = tensor(u, zero);
        CHECK(p.size() == u.size());
        CHECK(p.amplitude({1, 0, 0}) == u.amplitude({1, 0}));
        CHECK(p.amplitude({0, 1, 0}) == u.amplitude({0, 1}));
    }
    SUBCASE("collision") {
        CHECK_THROWS_AS(tensor(one, one), ModeCollision);
    }
}

TEST_CASE("inner and fidelity") {
    auto reg = pair_registry("b1", "b2");
    auto plus = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(1)}});
    auto minus = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(-1)}});
    CHECK(fidelity(plus, plus) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(plus, minus) == doctest::Approx(0.0));
    for (double phi : {0.1, 1.0, 2.5, -3.0}) {
        auto rotated = make_state<double>(reg, {{{1, 0}, std::polar(1.0, phi)}, {{0, 1}, std::polar(1.0, phi)}});
        CHECK(std::abs(fidelity(rotated, plus) - 1.0) < 1e-12);
    }
    auto other = make_state<double>(pair_registry("b2", "b1"), {{{1, 0}, cd(1)}});
    CHECK_THROWS_AS(inner(plus, other), ModeMismatch);
}

TEST_CASE("inner agrees with dense dot product") {
    std::mt19937_64 rng(11);
    ModeRegistry reg{optical("A"), optical("B"), mechanical("u")};
    for (int trial = 0; trial < 50; ++trial) {
        auto a = oracle::random_state(rng, reg, 2);
        auto b = oracle::random_state(rng, reg, 2);
        const cd dense = oracle::dense(a).dot(oracle::dense(b));  // conjugates the left operand
        CHECK(std::abs(inner(a, b) - dense) < 1e-14);
    }
}

TEST_CASE("project") {
    SUBCASE("onto a product factor returns the other factor") {
        ModeRegistry photons{optical("A"), optical("B")};
        auto phi = make_state<double>(pair_registry("u1", "u2"), {{{1, 0}, cd(0.6)}, {{0, 1}, cd(0, 0.8)}});
        auto s = tensor(basis_state<double>(photons, {1, 0}), phi);
        auto r = project(s, basis_state<double>(photons, {1, 0}));
        CHECK(r.probability == doctest::Approx(1.0).epsilon(1e-15));
        REQUIRE(r.heralded());
        CHECK(r.state->same_modes(phi));
        CHECK(std::abs(fidelity(*r.state, phi) - 1) < 1e-12);
    }
    SUBCASE("orthogonal target gives probability zero and no state") {
        ModeRegistry ab{optical("A"), optical("B")};
        auto s = make_state<double>(ab, {{{1, 0}, cd(1)}, {{0, 1}, cd(1)}});
        auto r = project(s, basis_state<double>(ab, {1, 1}));
        CHECK(r.probability == 0.0);
        CHECK_FALSE(r.heralded());
    }
    SUBCASE("target modes may be given in any order") {
        ModeRegistry abc{optical("A"), optical("B"), optical("C")};
        auto s = make_state<double>(abc, {{{1, 0, 0}, cd(1)}, {{0, 1, 1}, cd(1)}});
        auto r = project(s, basis_state<double>(ModeRegistry{optical("C"), optical("A")}, {1, 0}));
        CHECK(r.probability == doctest::Approx(0.5));
        REQUIRE(r.heralded());
        CHECK(r.state->amplitude({1}) == cd(1));
    }
    SUBCASE("mismatched target") {
        ModeRegistry ab{optical("A"), optical("B")};
        auto s = basis_state<double>(ab, {1, 0});
        CHECK_THROWS_AS(project(s, basis_state<double>(ModeRegistry{optical("Z")}, {1})), ModeMismatch);
        CHECK_THROWS_AS(project(s, basis_state<double>(ModeRegistry{mechanical("A")}, {1})), ModeMismatch);
    }
}

TEST_CASE("property: complete projection families sum to one and collapse to unit norm") {
    std::mt19937_64 rng(2024);
    ModeRegistry reg{optical("A"), optical("B"), mechanical("u1"), mechanical("u2")};
    ModeRegistry ab{optical("A"), optical("B")};
    for (int trial = 0; trial < 100; ++trial) {
        auto s = oracle::random_state(rng, reg, 2, 2, 8);
        // Bell-type basis on the {|10>,|01>} sector plus the remaining number states.
        std::vector<FockVectord> family{
            make_state<double>(ab, {{{1, 0}, cd(1)}, {{0, 1}, cd(1)}}),
            make_state<double>(ab, {{{1, 0}, cd(1)}, {{0, 1}, cd(-1)}}),
        };
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b)
                if (a + b != 1) family.push_back(basis_state<double>(ab, {a, b}));
        double total = 0;
        for (const auto& t : family) {
            auto r = project(s, t);
            total += r.probability;
            if (r.heralded()) CHECK(std::abs(r.state->squared_norm() - 1) < 1e-12);
        }
        CHECK(std::abs(total - 1) < 1e-12);
    }
}

TEST_CASE("drop_vacuum_modes") {
    ModeRegistry reg{mechanical("u"), mechanical("v")};
    auto s = make_state<double>(reg, {{{1, 0}, cd(0.6)}, {{0, 0}, cd(0.8)}});
    std::vector<std::string> v{"v"};
    auto d = drop_vacuum_modes(s, std::span<const std::string>(v));
    CHECK(d.num_modes() == 1);
    CHECK(d.amplitude({1}) == s.amplitude({1, 0}));
    std::vector<std::string> u{"u"};
    CHECK_THROWS_AS(drop_vacuum_modes(s, std::span<const std::string>(u)), ModesNotVacuum);
}

TEST_CASE("sample_measurement") {
    // State after the Hadamards of the Bell protocol, written out by hand:
    // [(|10>-|01>)(|00>-|11>) + (|10>+|01>)(|10>-|01>)] / (2 sqrt2) on (u1,u2,C,B).
    ModeRegistry reg{mechanical("u1"), mechanical("u2"), optical("C"), optical("B")};
    const cd q(1.0 / (2 * std::sqrt(2.0)));
    auto s = make_state<double>(reg, {
                                         {{1, 0, 0, 0}, q},  {{1, 0, 1, 1}, -q}, {{0, 1, 0, 0}, -q}, {{0, 1, 1, 1}, q},
                                         {{1, 0, 1, 0}, q},  {{1, 0, 0, 1}, -q}, {{0, 1, 1, 0}, q},  {{0, 1, 0, 1}, -q},
                                     });
    const std::vector<std::string> photons{"C", "B"};

    SUBCASE("Born distribution is uniform over the four outcomes") {
        auto dist = outcome_distribution(s, std::span<const std::string>(photons));
        REQUIRE(dist.size() == 4);
        for (const auto& [occ, p] : dist) CHECK(std::abs(p - 0.25) < 1e-12);
    }
    SUBCASE("empirical frequencies, 1e6 draws") {
        MeasurementSampler<double> sampler(s, photons);
        std::mt19937_64 rng(7);
        const int n = 1'000'000;
        std::map<Occupation, int> counts;
        for (int i = 0; i < n; ++i) counts[sampler.distribution()[sampler.sample_index(rng)].first]++;
        for (const auto& [occ, c] : counts) {
            const double sigma = std::sqrt(0.25 * 0.75 / n);
            CHECK(std::abs(double(c) / n - 0.25) < 4 * sigma);
        }
    }
    SUBCASE("collapse leaves the phonon pair") {
        std::mt19937_64 rng(3);
        auto m = sample_measurement(s, photons, rng);
        REQUIRE(m.herald.heralded());
        CHECK(m.herald.probability == doctest::Approx(0.25));
        CHECK(m.herald.state->num_modes() == 2);
        CHECK(std::abs(m.herald.state->squared_norm() - 1) < 1e-12);
    }
    SUBCASE("certain outcome") {
        auto one = basis_state<double>(ModeRegistry{optical("c")}, {1});
        std::mt19937_64 rng(1);
        auto m = sample_measurement(one, {"c"}, rng);
        CHECK(m.outcome == Occupation{1});
        CHECK(m.herald.probability == 1.0);
    }
    SUBCASE("fixed seed gives identical sequences") {
        MeasurementSampler<double> sampler(s, photons);
        std::mt19937_64 r1(99), r2(99);
        for (int i = 0; i < 1000; ++i) CHECK(sampler.sample_index(r1) == sampler.sample_index(r2));
    }
    SUBCASE("empty subset") {
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(sample_measurement(s, {}, rng), ModeMismatch);
    }
}

TEST_CASE("property: sampled frequencies match Born probabilities within 4 sigma") {
    std::mt19937_64 gen(5);
    ModeRegistry reg{optical("A"), optical("B"), mechanical("u")};
    const int n = 100'000;
    for (int trial = 0; trial < 5; ++trial) {
        auto s = oracle::random_state(gen, reg, 2, 2, 6);
        MeasurementSampler<double> sampler(s, {"A", "u"});
        std::vector<int> counts(sampler.distribution().size(), 0);
        std::mt19937_64 rng(1000 + trial);
        for (int i = 0; i < n; ++i) counts[sampler.sample_index(rng)]++;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const double p = sampler.distribution()[k].second;
            CHECK(std::abs(double(counts[k]) / n - p) <= 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
        }
    }
}

TEST_CASE("to_dense uses mixed-radix order") {
    ModeRegistry reg{optical("A"), optical("B")};
    auto s = basis_state<double>(reg, {1, 2});
    auto v = s.to_dense();
    CHECK(v.size() == 9);
    CHECK(v(1 * 3 + 2) == cd(1));
    CHECK((v - oracle::ket({1, 2}, 3)).norm() == 0.0);
}

TEST_CASE("cast between scalar types") {
    ModeRegistry reg{optical("A"), optical("B")};
    auto s = make_state<double>(reg, {{{1, 0}, cd(1)}, {{0, 1}, cd(0, 1)}});
    auto f = s.cast<float>();
    CHECK(std::abs(f.amplitude({0, 1}) - std::complex<float>(0, float(inv_sqrt2))) < 1e-6f);
    auto back = f.cast<double>();
    CHECK(fidelity(back, s) == doctest::Approx(1.0).epsilon(1e-6));
}
