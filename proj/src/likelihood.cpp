#include "btl/likelihood.hpp"

#include <algorithm>
#include <cmath>

namespace btl {

namespace {

void check_dimension(std::span<const PairTerm> terms, std::span<const double> theta) {
    const int d = static_cast<int>(theta.size());
    for (const auto& t : terms) {
        if (t.i < 0 || t.j <= t.i || t.j >= d) {
            throw Error(ErrorCode::InvalidInput, "pair term out of range for theta");
        }
    }
}

void check_matrix(const WinFractionMatrix& mu, const ParameterVector& theta) {
    if (mu.d != theta.dimension()) {
        throw Error(ErrorCode::InvalidInput, "win-fraction matrix and theta dimensions differ");
    }
}

}  // namespace

std::vector<PairTerm> pair_terms(const ComparisonData& data) {
    validate(data);
    std::vector<PairTerm> terms;
    for (int i = 0; i < data.d; ++i) {
        for (int j = i + 1; j < data.d; ++j) {
            const long long c = data.counts[i][j];
            if (c == 0) continue;
            terms.push_back(PairTerm{i, j, static_cast<double>(c),
                                     static_cast<double>(data.wins[i][j]) /
                                         static_cast<double>(c)});
        }
    }
    return terms;
}

std::vector<PairTerm> pair_terms(const WinFractionMatrix& mu, double k) {
    if (!(k > 0)) throw Error(ErrorCode::InvalidInput, "pair weight k must be positive");
    std::vector<PairTerm> terms;
    for (int i = 0; i < mu.d; ++i) {
        for (int j = i + 1; j < mu.d; ++j) {
            if (!mu.observed[i][j]) continue;
            terms.push_back(PairTerm{i, j, k, mu.mu[i][j]});
        }
    }
    return terms;
}

double nll(std::span<const PairTerm> terms, std::span<const double> theta) {
    check_dimension(terms, theta);
    double total = 0.0;
    for (const auto& t : terms) {
        const double ti = theta[t.i];
        const double tj = theta[t.j];
        const double log_sum = std::max(ti, tj) + std::log1p(std::exp(-std::abs(ti - tj)));
        total += t.weight * (log_sum - t.mu_ij * ti - (1.0 - t.mu_ij) * tj);
    }
    return total;
}

void nll_gradient(std::span<const PairTerm> terms, std::span<const double> theta,
                  std::span<double> grad) {
    check_dimension(terms, theta);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& t : terms) {
        const double g = t.weight * (btl_probability(theta[t.i], theta[t.j]) - t.mu_ij);
        grad[t.i] += g;
        grad[t.j] -= g;
    }
}

void first_order_residual(std::span<const PairTerm> terms, std::span<const double> theta,
                          std::span<double> residual) {
    check_dimension(terms, theta);
    std::fill(residual.begin(), residual.end(), 0.0);
    for (const auto& t : terms) {
        const double r = btl_probability(theta[t.i], theta[t.j]) - t.mu_ij;
        residual[t.i] += r;
        residual[t.j] -= r;
    }
}

void gradient_and_residual(std::span<const PairTerm> terms, std::span<const double> theta,
                           std::span<double> grad, std::span<double> residual) {
    check_dimension(terms, theta);
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(residual.begin(), residual.end(), 0.0);
    for (const auto& t : terms) {
        const double r = btl_probability(theta[t.i], theta[t.j]) - t.mu_ij;
        residual[t.i] += r;
        residual[t.j] -= r;
        grad[t.i] += t.weight * r;
        grad[t.j] -= t.weight * r;
    }
}

double nll(const WinFractionMatrix& mu, const ParameterVector& theta, double k) {
    check_matrix(mu, theta);
    const auto terms = pair_terms(mu, k);
    return nll(terms, theta.values);
}

std::vector<double> nll_gradient(const WinFractionMatrix& mu, const ParameterVector& theta,
                                 double k) {
    check_matrix(mu, theta);
    const auto terms = pair_terms(mu, k);
    std::vector<double> grad(theta.values.size());
    nll_gradient(terms, theta.values, grad);
    return grad;
}

std::vector<double> first_order_residual(const WinFractionMatrix& mu,
                                         const ParameterVector& theta) {
    check_matrix(mu, theta);
    const auto terms = pair_terms(mu, 1.0);
    std::vector<double> residual(theta.values.size());
    first_order_residual(terms, theta.values, residual);
    return residual;
}

}  // namespace btl
