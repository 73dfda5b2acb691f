#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "btl/model.hpp"
#include "btl/rng.hpp"

using namespace btl;

TEST_CASE("btl_probability basic values") {
    CHECK(btl_probability(0.5, 0.5) == 0.5);
    // logistic(2)
    CHECK(btl_probability(1.0, -1.0) == doctest::Approx(0.8807970779778823).epsilon(1e-12));
}

TEST_CASE("btl_probability complements sum to one") {
    rng::Stream s(11);
    for (int i = 0; i < 200; ++i) {
        const double a = 10.0 * (s.next_unit() - 0.5);
        const double b = 10.0 * (s.next_unit() - 0.5);
        CHECK(btl_probability(a, b) + btl_probability(b, a) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("btl_probability is shift invariant") {
    // dyadic grid keeps the shifts exact, so the check itself can be exact
    rng::Stream s(12);
    const double grid = 0x1.0p-20;
    for (int i = 0; i < 100; ++i) {
        const double a = grid * std::floor(4e6 * (s.next_unit() - 0.5));
        const double b = grid * std::floor(4e6 * (s.next_unit() - 0.5));
        const double c = grid * std::floor(8e6 * (s.next_unit() - 0.5));
        CHECK(btl_probability(a + c, b + c) == btl_probability(a, b));
    }
}

TEST_CASE("btl_probability saturates without overflow") {
    const double p = btl_probability(700.0, 0.0);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    const double q = btl_probability(0.0, 700.0);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
}

TEST_CASE("worst_case family") {
    const auto theta = make_true_params({Family::worst_case, 1.0, {}}, 10);
    CHECK(theta.values[0] == 1.0);
    for (int i = 1; i < 10; ++i) {
        CHECK(theta.values[i] == doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
    }
}

TEST_CASE("all_zeros family") {
    const auto theta = make_true_params({Family::all_zeros, 1.0, {}}, 5);
    for (double v : theta.values) CHECK(v == 0.0);
}

TEST_CASE("linear family endpoints and centering") {
    const auto theta = make_true_params({Family::linear, 1.0, {}}, 3);
    CHECK(theta.values[0] == -1.0);
    CHECK(theta.values[1] == 0.0);
    CHECK(theta.values[2] == 1.0);
}

TEST_CASE("every family lands in the centered box") {
    for (Family family : {Family::worst_case, Family::worst_case_half, Family::bipolar,
                          Family::linear, Family::all_zeros}) {
        for (int d : {2, 4, 10, 26}) {
            for (double B : {0.5, 1.0, 2.0}) {
                const auto theta = make_true_params({family, B, {}}, d);
                const BoundedDomain domain{B, d};
                CHECK(domain.contains(theta.values));
            }
        }
    }
}

TEST_CASE("bipolar rejects odd d") {
    CHECK_THROWS_AS(make_true_params({Family::bipolar, 1.0, {}}, 5), Error);
}

TEST_CASE("custom family validates the domain") {
    CHECK_NOTHROW(make_true_params({Family::custom, 1.0, {0.5, -0.5}}, 2));
    // not centered
    CHECK_THROWS_AS(make_true_params({Family::custom, 1.0, {0.5, 0.5}}, 2), Error);
    // outside the box
    CHECK_THROWS_AS(make_true_params({Family::custom, 1.0, {1.5, -1.5}}, 2), Error);
}

TEST_CASE("league sampling compares every pair k times") {
    const auto theta = make_true_params({Family::linear, 1.0, {}}, 4);
    const auto data = sample_comparisons(theta, ObservationDesign::league(5), 99);
    validate(data);
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) CHECK(data.counts[i][j] == 5);
    }
}

TEST_CASE("sampling is reproducible bit for bit") {
    const auto theta = make_true_params({Family::linear, 1.0, {}}, 8);
    const auto design = ObservationDesign::random(3, 0.6);
    const auto a = sample_comparisons(theta, design, 1234);
    const auto b = sample_comparisons(theta, design, 1234);
    CHECK(a.wins == b.wins);
    CHECK(a.counts == b.counts);
    const auto c = sample_comparisons(theta, design, 1235);
    CHECK(c.wins != a.wins);
}

TEST_CASE("symmetric truth concentrates near one half") {
    const auto theta = make_true_params({Family::all_zeros, 1.0, {}}, 2);
    const auto data = sample_comparisons(theta, ObservationDesign::league(10000), 5);
    const double fraction =
        static_cast<double>(data.wins[0][1]) / static_cast<double>(data.counts[0][1]);
    CHECK(std::abs(fraction - 0.5) < 0.02);
}

TEST_CASE("random design inclusion rate matches p_obs") {
    const auto theta = make_true_params({Family::all_zeros, 1.0, {}}, 50);
    const auto data = sample_comparisons(theta, ObservationDesign::random(5, 0.5), 314);
    int observed = 0;
    const int pairs = 50 * 49 / 2;
    for (int i = 0; i < 50; ++i) {
        for (int j = i + 1; j < 50; ++j) {
            if (data.counts[i][j] > 0) {
                CHECK(data.counts[i][j] == 5);
                ++observed;
            }
        }
    }
    // binomial proportion, 5 standard deviations
    const double sd = std::sqrt(0.25 / pairs);
    CHECK(std::abs(static_cast<double>(observed) / pairs - 0.5) < 5.0 * sd);
}

TEST_CASE("win_fractions arithmetic") {
    auto data = make_comparison_data(2);
    data.counts[0][1] = data.counts[1][0] = 5;
    data.wins[0][1] = 3;
    data.wins[1][0] = 2;
    const auto mu = win_fractions(data);
    CHECK(mu.mu[0][1] == 0.6);
    CHECK(mu.mu[1][0] == 0.4);
    CHECK(mu.observed[0][1] == 1);
}

TEST_CASE("win_fractions marks unobserved pairs") {
    auto data = make_comparison_data(3);
    data.counts[0][1] = data.counts[1][0] = 4;
    data.wins[0][1] = 4;
    const auto mu = win_fractions(data);
    CHECK(mu.mu[0][1] == 1.0);
    CHECK(mu.mu[1][0] == 0.0);
    CHECK(mu.observed[0][2] == 0);
    CHECK(mu.observed[1][2] == 0);
}

TEST_CASE("sampled win fractions satisfy mu + mu^T = 1 on the mask") {
    const auto theta = make_true_params({Family::linear, 1.0, {}}, 12);
    const auto data = sample_comparisons(theta, ObservationDesign::random(7, 0.4), 2718);
    const auto mu = win_fractions(data);
    for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
            CHECK(mu.observed[i][j] == mu.observed[j][i]);
            if (mu.observed[i][j]) {
                CHECK(mu.mu[i][j] + mu.mu[j][i] == doctest::Approx(1.0).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("comparison data JSON round trip") {
    const auto theta = make_true_params({Family::linear, 1.0, {}}, 6);
    const auto data = sample_comparisons(theta, ObservationDesign::random(4, 0.7), 55);
    const auto parsed = comparison_data_from_json(to_json(data));
    CHECK(parsed.d == data.d);
    CHECK(parsed.wins == data.wins);
    CHECK(parsed.counts == data.counts);
}

TEST_CASE("comparison data JSON rejects malformed input") {
    CHECK_THROWS_AS(comparison_data_from_json("not json"), Error);
    CHECK_THROWS_AS(comparison_data_from_json("{\"d\":2}"), Error);
    // wins exceed count
    CHECK_THROWS_AS(comparison_data_from_json(
                        R"({"d":2,"pairs":[{"i":0,"j":1,"count":3,"wins_i":4}]})"),
                    Error);
    // duplicate pair
    CHECK_THROWS_AS(comparison_data_from_json(
                        R"({"d":2,"pairs":[{"i":0,"j":1,"count":3,"wins_i":1},
                                            {"i":0,"j":1,"count":3,"wins_i":1}]})"),
                    Error);
    // i >= j
    CHECK_THROWS_AS(comparison_data_from_json(
                        R"({"d":2,"pairs":[{"i":1,"j":0,"count":3,"wins_i":1}]})"),
                    Error);
}

TEST_CASE("parameter vector validation") {
    CHECK_THROWS_AS(make_parameter_vector({1.0}), Error);
    CHECK_THROWS_AS(make_parameter_vector({1.0, 1.0}), Error);
    CHECK_THROWS_AS(make_parameter_vector({std::nan(""), 0.0}), Error);
    CHECK_NOTHROW(make_parameter_vector({1.0, -1.0}));
}
