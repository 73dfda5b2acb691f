#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "btl/likelihood.hpp"
#include "btl/model.hpp"
#include "btl/rng.hpp"

using namespace btl;

namespace {

// Random league instance with arbitrary win splits.
ComparisonData random_instance(int d, int k, rng::Stream& s) {
    auto data = make_comparison_data(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const auto w = static_cast<long long>(s.next_unit() * (k + 1));
            data.counts[i][j] = data.counts[j][i] = k;
            data.wins[i][j] = std::min<long long>(w, k);
            data.wins[j][i] = k - data.wins[i][j];
        }
    }
    return data;
}

std::vector<double> random_centered(int d, double scale, rng::Stream& s) {
    std::vector<double> v(d);
    for (double& x : v) x = scale * (2.0 * s.next_unit() - 1.0);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / d;
    for (double& x : v) x -= mean;
    return v;
}

WinFractionMatrix uniform_mu(int d, double value) {
    WinFractionMatrix mu;
    mu.d = d;
    mu.mu.assign(d, std::vector<double>(d, 0.0));
    mu.observed.assign(d, std::vector<std::uint8_t>(d, 0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            mu.mu[i][j] = i < j ? value : 1.0 - value;
            mu.observed[i][j] = 1;
        }
    }
    return mu;
}

}  // namespace

TEST_CASE("nll at zero is k * pairs * log 2") {
    for (int d : {2, 5, 9}) {
        const auto mu = uniform_mu(d, 0.5);
        const ParameterVector theta{std::vector<double>(d, 0.0)};
        const double pairs = d * (d - 1) / 2.0;
        CHECK(nll(mu, theta, 4.0) ==
              doctest::Approx(4.0 * pairs * std::log(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("nll two-item hand value") {
    const auto mu = uniform_mu(2, 0.5);
    const ParameterVector theta{{0.0, 0.0}};
    CHECK(nll(mu, theta, 4.0) == doctest::Approx(2.772588722239781).epsilon(1e-12));
}

TEST_CASE("nll is shift invariant") {
    rng::Stream s(31);
    const auto data = random_instance(6, 7, s);
    const auto mu = win_fractions(data);
    for (int rep = 0; rep < 20; ++rep) {
        auto base = random_centered(6, 3.0, s);
        const ParameterVector theta{base};
        const double c = 10.0 * (s.next_unit() - 0.5);
        auto shifted = base;
        for (double& x : shifted) x += c;
        const double a = nll(mu, theta, 7.0);
        const double b = nll(pair_terms(mu, 7.0), shifted);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("gradient vanishes at zero for tied observations") {
    const auto mu = uniform_mu(5, 0.5);
    const ParameterVector theta{std::vector<double>(5, 0.0)};
    for (double g : nll_gradient(mu, theta, 3.0)) CHECK(g == 0.0);
}

TEST_CASE("gradient two-item hand value") {
    const auto mu = uniform_mu(2, 0.8);
    const ParameterVector theta{{0.0, 0.0}};
    const auto grad = nll_gradient(mu, theta, 5.0);
    CHECK(grad[0] == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(grad[1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("gradient entries sum to zero") {
    rng::Stream s(32);
    for (int rep = 0; rep < 30; ++rep) {
        const int d = 2 + static_cast<int>(s.next_unit() * 10);
        const auto data = random_instance(d, 5, s);
        const auto terms = pair_terms(data);
        const auto theta = random_centered(d, 2.0, s);
        std::vector<double> grad(d);
        nll_gradient(terms, theta, grad);
        CHECK(std::abs(std::accumulate(grad.begin(), grad.end(), 0.0)) < 1e-12);
    }
}

TEST_CASE("gradient matches central finite differences") {
    rng::Stream s(33);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 2 + static_cast<int>(s.next_unit() * 8);
        const auto data = random_instance(d, 6, s);
        const auto terms = pair_terms(data);
        auto theta = random_centered(d, 2.0, s);
        std::vector<double> grad(d);
        nll_gradient(terms, theta, grad);
        const double h = 1e-5;
        for (int m = 0; m < d; ++m) {
            const double keep = theta[m];
            theta[m] = keep + h;
            const double up = nll(terms, theta);
            theta[m] = keep - h;
            const double down = nll(terms, theta);
            theta[m] = keep;
            const double numeric = (up - down) / (2.0 * h);
            worst = std::max(worst,
                             std::abs(grad[m] - numeric) / std::max(1.0, std::abs(grad[m])));
        }
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("residual vanishes for tied observations at zero") {
    const auto mu = uniform_mu(4, 0.5);
    const ParameterVector theta{std::vector<double>(4, 0.0)};
    for (double r : first_order_residual(mu, theta)) CHECK(r == 0.0);
}

TEST_CASE("gradient handles heterogeneous pair counts") {
    rng::Stream s(36);
    auto data = make_comparison_data(6);
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            const long long c = 1 + static_cast<long long>(s.next_unit() * 9);
            data.counts[i][j] = data.counts[j][i] = c;
            data.wins[i][j] = static_cast<long long>(s.next_unit() * (c + 1));
            data.wins[i][j] = std::min(data.wins[i][j], c);
            data.wins[j][i] = c - data.wins[i][j];
        }
    }
    const auto terms = pair_terms(data);
    auto theta = random_centered(6, 1.5, s);
    std::vector<double> grad(6);
    nll_gradient(terms, theta, grad);
    const double h = 1e-5;
    for (int m = 0; m < 6; ++m) {
        const double keep = theta[m];
        theta[m] = keep + h;
        const double up = nll(terms, theta);
        theta[m] = keep - h;
        const double down = nll(terms, theta);
        theta[m] = keep;
        CHECK(grad[m] == doctest::Approx((up - down) / (2.0 * h)).epsilon(1e-6));
    }
}

TEST_CASE("residual vanishes at the two-item closed form") {
    const auto mu = uniform_mu(2, 0.8);
    const double top = -0.5 * std::log(1.0 / 0.8 - 1.0);  // interior optimum
    const ParameterVector theta{{top, -top}};
    for (double r : first_order_residual(mu, theta)) CHECK(std::abs(r) <= 1e-10);
}

TEST_CASE("residual equals gradient over k on league data") {
    rng::Stream s(34);
    const int d = 7, k = 9;
    const auto data = random_instance(d, k, s);
    const auto mu = win_fractions(data);
    const ParameterVector theta{random_centered(d, 1.5, s)};
    const auto grad = nll_gradient(mu, theta, k);
    const auto residual = first_order_residual(mu, theta);
    for (int m = 0; m < d; ++m) {
        CHECK(residual[m] == doctest::Approx(grad[m] / k).epsilon(1e-12));
    }
}

TEST_CASE("convexity along random segments") {
    rng::Stream s(35);
    for (int rep = 0; rep < 40; ++rep) {
        const int d = 2 + static_cast<int>(s.next_unit() * 9);
        const auto data = random_instance(d, 4, s);
        const auto terms = pair_terms(data);
        const auto a = random_centered(d, 3.0, s);
        const auto b = random_centered(d, 3.0, s);
        const double t = 0.05 + 0.9 * s.next_unit();
        std::vector<double> mid(d);
        double max_gap = 0.0;
        for (int m = 0; m < d; ++m) {
            mid[m] = t * a[m] + (1.0 - t) * b[m];
            max_gap = std::max(max_gap, std::abs(a[m] - b[m]));
        }
        const double lhs = nll(terms, mid);
        const double rhs = t * nll(terms, a) + (1.0 - t) * nll(terms, b);
        CHECK(lhs <= rhs + 1e-9);
        if (max_gap > 0.1) CHECK(lhs < rhs);  // strict away from shifts
    }
}

TEST_CASE("dimension mismatch is rejected") {
    const auto mu = uniform_mu(3, 0.5);
    const ParameterVector theta{{0.0, 0.0}};
    CHECK_THROWS_AS(nll(mu, theta, 1.0), Error);
    CHECK_THROWS_AS(nll_gradient(mu, theta, 1.0), Error);
    CHECK_THROWS_AS(first_order_residual(mu, theta), Error);
}

TEST_CASE("unobserved pairs drop out of the sums") {
    // two observed pairs out of three
    auto data = make_comparison_data(3);
    data.counts[0][1] = data.counts[1][0] = 4;
    data.wins[0][1] = 3;
    data.wins[1][0] = 1;
    data.counts[1][2] = data.counts[2][1] = 4;
    data.wins[1][2] = 2;
    data.wins[2][1] = 2;
    const auto terms = pair_terms(data);
    CHECK(terms.size() == 2);
    const std::vector<double> theta{0.2, 0.0, -0.2};
    std::vector<double> grad(3);
    nll_gradient(terms, theta, grad);
    // item 0 only touches the (0,1) pair
    CHECK(grad[0] == doctest::Approx(4.0 * (btl_probability(0.2, 0.0) - 0.75)).epsilon(1e-12));
}
