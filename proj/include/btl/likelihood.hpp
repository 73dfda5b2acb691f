#pragma once

#include <span>
#include <vector>

#include "btl/model.hpp"

namespace btl {

// One observed pair in the likelihood sum. Unobserved pairs never appear.
struct PairTerm {
    int i = 0;
    int j = 0;           // i < j
    double weight = 1;   // comparisons held between i and j
    double mu_ij = 0.5;  // fraction won by i; item j won 1 - mu_ij
};

std::vector<PairTerm> pair_terms(const ComparisonData& data);
std::vector<PairTerm> pair_terms(const WinFractionMatrix& mu, double k);

// Negative log-likelihood
//   sum over pairs of w_ij * [log(e^{theta_i} + e^{theta_j})
//                             - mu_ij * theta_i - mu_ji * theta_j],
// with the log-sum evaluated as max + log1p(exp(-|diff|)).
double nll(std::span<const PairTerm> terms, std::span<const double> theta);

// d/dtheta_m of the nll: sum over i != m of w_mi * (p(theta_m, theta_i) - mu_mi).
void nll_gradient(std::span<const PairTerm> terms, std::span<const double> theta,
                  std::span<double> grad);

// Scale-free optimality certificate: component m equals
// sum_{i != m} p(theta_m, theta_i) - sum_{i != m} mu_mi over observed pairs.
// Vanishes at a finite unconstrained optimum.
void first_order_residual(std::span<const PairTerm> terms, std::span<const double> theta,
                          std::span<double> residual);

// Single pass filling both the weighted gradient and the unit-weight residual.
void gradient_and_residual(std::span<const PairTerm> terms, std::span<const double> theta,
                           std::span<double> grad, std::span<double> residual);

double nll(const WinFractionMatrix& mu, const ParameterVector& theta, double k);
std::vector<double> nll_gradient(const WinFractionMatrix& mu, const ParameterVector& theta,
                                 double k);
std::vector<double> first_order_residual(const WinFractionMatrix& mu,
                                         const ParameterVector& theta);

}  // namespace btl
