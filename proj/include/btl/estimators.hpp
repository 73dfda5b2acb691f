#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btl/errors.hpp"
#include "btl/model.hpp"

namespace btl {

struct SolverSettings {
    // Stop when the projected-gradient mapping (per-comparison scale,
    // unit probe step) has infinity norm at most grad_tol. For the
    // unconstrained solver this is the first-order residual norm.
    double grad_tol = 1e-10;
    long max_iters = 100000;
    double backtrack_shrink = 0.5;
    double sufficient_decrease = 1e-4;
};

enum class EstimatorKind { standard, stretched, unconstrained };

EstimatorKind estimator_kind_from_string(const std::string& name);
const char* estimator_kind_name(EstimatorKind kind);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::standard;
    double bound = 1.0;  // box half-width: B for standard, A for stretched
    SolverSettings settings;
};

struct FitResult {
    ParameterVector theta_hat;
    long iterations = 0;
    double final_residual = 0.0;
    // Whether ||theta_hat||_inf is within 1e-8 of the box bound.
    bool constraint_active = false;
};

// Non-convergence carries the best iterate rather than discarding it.
class MaxItersError : public Error {
public:
    MaxItersError(const std::string& message, FitResult best)
        : Error(ErrorCode::MaxItersExceeded, message), best_(std::move(best)) {}

    const FitResult& best_iterate() const { return best_; }

private:
    FitResult best_;
};

// Euclidean projection onto {||theta||_inf <= bound, sum(theta) = 0}:
// clip(v - tau, -bound, bound) with tau chosen by bisection (then an exact
// solve on the identified face) so the clipped vector sums to zero.
std::vector<double> project_to_domain(std::span<const double> v, double bound);

// Box-constrained maximum likelihood via projected gradient descent with
// backtracking line search, started from zero. bound = B gives the standard
// estimator, bound = A > B the stretched one.
FitResult fit_mle(const ComparisonData& data, double bound,
                  const SolverSettings& settings = {});

// Maximum likelihood with only the centering constraint. Requires a strongly
// connected comparison graph, otherwise no finite optimum exists.
FitResult fit_unconstrained(const ComparisonData& data, const SolverSettings& settings = {});

FitResult fit(const ComparisonData& data, const EstimatorSpec& spec);

// Closed-form estimate of theta_1 for d = 2 (theta_2 = -theta_1): the
// logit -log(1/mu - 1) / 2 clipped to [-bound, bound] for the box-constrained
// kinds. Unconstrained with mu in {0, 1} has no finite value.
double closed_form_two_items(double mu, EstimatorKind kind, double bound = 1.0);

// Closed-form fits against the symmetrized observations that give item 1 the
// win fraction mu_1 and tie all other pairs. Used as an independent test
// oracle for league data.
struct OracleEstimates {
    double mu_1 = 0.5;
    // First coordinate of [t, -t/(d-1), ..., -t/(d-1)]; empty when mu_1 is
    // 0 or 1 and the unconstrained form diverges.
    std::optional<double> unconstrained_1;
    double constrained_1 = 0.0;
};

OracleEstimates oracle_from_mu(double mu_1, int d, double B);
OracleEstimates oracle_estimates(const ComparisonData& data, double B);

std::string to_json(const FitResult& result);

}  // namespace btl
