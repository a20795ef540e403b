#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ftqc/noise.hpp"

using namespace ftqc;

TEST_CASE("p=0 gives empty fault set, p=1 all locations", "[noise]") {
    NoiseSpec off;
    off.p_loc = 0.0;
    REQUIRE(sample_fault_set(1000, off, 1).empty());

    NoiseSpec on;
    on.p_loc = 1.0;
    auto f = sample_fault_set(50, on, 1);
    REQUIRE(f.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) REQUIRE(f[i] == i);
}

TEST_CASE("seed determinism", "[noise]") {
    NoiseSpec spec;
    spec.p_loc = 0.3;
    spec.seed = 77;
    auto a = sample_fault_set(200, spec, 5);
    auto b = sample_fault_set(200, spec, 5);
    REQUIRE(a == b);
    auto c = sample_fault_set(200, spec, 6);
    REQUIRE(a != c);
}

TEST_CASE("pair containment probability matches p^2", "[noise]") {
    NoiseSpec spec;
    spec.p_loc = 0.1;
    spec.seed = 2024;
    const std::size_t trials = 1000000;
    std::size_t hits = 0, hit_i = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        auto f = sample_fault_set(16, spec, t);
        bool has3 = false, has11 = false;
        for (auto l : f) {
            has3 |= (l == 3);
            has11 |= (l == 11);
        }
        if (has3) ++hit_i;
        if (has3 && has11) ++hits;
    }
    double p_pair = double(hits) / trials;
    double p_single = double(hit_i) / trials;
    // 3 sigma binomial intervals around 0.01 and 0.1
    REQUIRE(std::abs(p_pair - 0.01) < 3 * std::sqrt(0.01 * 0.99 / trials));
    REQUIRE(std::abs(p_single - 0.1) < 3 * std::sqrt(0.1 * 0.9 / trials));
}

TEST_CASE("overrides and bounded regime", "[noise]") {
    NoiseSpec spec;
    spec.p_loc = 0.5;
    spec.overrides[3] = 0.0;
    REQUIRE(spec.p_at(3) == 0.0);
    REQUIRE(spec.p_at(4) == 0.5);
    spec.overrides[5] = 0.9;
    REQUIRE_THROWS(spec.p_at(5));
    spec.assume_bounded = false;
    REQUIRE(spec.p_at(5) == 0.9);
}

TEST_CASE("uniform nontrivial pauli frequencies", "[noise]") {
    auto rng = make_rng(55);
    std::size_t cx = 0, cy = 0, cz = 0, trials = 90000;
    for (std::size_t t = 0; t < trials; ++t) {
        auto p = random_nontrivial_pauli(1, rng);
        if (p.x.get(0) && p.z.get(0))
            ++cy;
        else if (p.x.get(0))
            ++cx;
        else
            ++cz;
    }
    for (std::size_t c : {cx, cy, cz})
        REQUIRE(std::abs(double(c) / trials - 1.0 / 3) < 0.01);
}

TEST_CASE("two-qubit fault support covers both qubits", "[noise]") {
    auto rng = make_rng(57);
    bool saw_both = false;
    for (int t = 0; t < 200; ++t) {
        auto p = random_nontrivial_pauli(2, rng);
        REQUIRE(p.n == 2);
        REQUIRE((p.x.any() || p.z.any()));
        if ((p.x.get(0) || p.z.get(0)) && (p.x.get(1) || p.z.get(1))) saw_both = true;
    }
    REQUIRE(saw_both);
}

TEST_CASE("qubit/syndrome noise basics", "[noise]") {
    auto z = sample_qubit_syndrome_noise(20, 10, 0.0, 0.0, 1);
    REQUIRE(z.data.none());
    REQUIRE(z.syndrome.none());
    auto d = sample_qubit_syndrome_noise(20, 10, 0.3, 0.0, 1);
    REQUIRE(d.syndrome.none());
    REQUIRE_THROWS(sample_qubit_syndrome_noise(5, 5, 1.5, 0.0, 1));
}

TEST_CASE("joint containment probability factorizes", "[noise]") {
    const std::size_t trials = 400000;
    std::size_t joint = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        auto s = sample_qubit_syndrome_noise(8, 8, 0.2, 0.1, 31, t);
        if (s.data.get(2) && s.syndrome.get(5)) ++joint;
    }
    double expect = 0.2 * 0.1;
    REQUIRE(std::abs(double(joint) / trials - expect) < 3 * std::sqrt(expect * (1 - expect) / trials));
}

TEST_CASE("noise config parsing", "[noise]") {
    std::stringstream ss("p_loc=1e-3\nseed=42\noverride.7=5e-4\n# comment\n");
    auto spec = parse_noise_config(ss);
    REQUIRE(spec.p_loc == Catch::Approx(1e-3));
    REQUIRE(spec.seed == 42);
    REQUIRE(spec.p_at(7) == Catch::Approx(5e-4));

    std::stringstream bad("p_loc 0.1\n");
    REQUIRE_THROWS(parse_noise_config(bad));
    std::stringstream bad2("p_loc=2.0\n");
    REQUIRE_THROWS(parse_noise_config(bad2));
}
