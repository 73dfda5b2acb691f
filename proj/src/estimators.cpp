#include "btl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "json.hpp"

#include "btl/graph.hpp"
#include "btl/likelihood.hpp"

namespace btl {

namespace {

constexpr double kMinStep = 1e-18;
constexpr double kActiveTol = 1e-8;

// Armijo acceptance slack: near the optimum the true decrease drops below the
// rounding noise of the objective, so the comparison carries an absolute
// tolerance scaled to the objective magnitude.
double armijo_slack(double value) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(value) + 1.0);
}

// Barzilai-Borwein trial step for the next line search. Matches the local
// curvature along the last accepted move, so the backtracking loop almost
// always passes on the first try.
double spectral_step(std::span<const double> theta, std::span<const double> prev_theta,
                     std::span<const double> grad, std::span<const double> prev_grad,
                     double fallback, double step_min, double step_max) {
    double sty = 0.0;
    double sts = 0.0;
    for (std::size_t m = 0; m < theta.size(); ++m) {
        const double s = theta[m] - prev_theta[m];
        const double y = grad[m] - prev_grad[m];
        sty += s * y;
        sts += s * s;
    }
    if (!(sty > 0.0) || sts == 0.0) return fallback;
    return std::clamp(sts / sty, step_min, step_max);
}

void check_settings(const SolverSettings& settings) {
    if (!(settings.grad_tol > 0)) {
        throw Error(ErrorCode::InvalidInput, "grad_tol must be positive");
    }
    if (settings.max_iters < 1) {
        throw Error(ErrorCode::InvalidInput, "max_iters must be at least 1");
    }
    if (!(settings.backtrack_shrink > 0 && settings.backtrack_shrink < 1)) {
        throw Error(ErrorCode::InvalidInput, "backtrack shrink must lie in (0, 1)");
    }
    if (!(settings.sufficient_decrease > 0 && settings.sufficient_decrease < 1)) {
        throw Error(ErrorCode::InvalidInput, "sufficient decrease must lie in (0, 1)");
    }
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_weight(std::span<const PairTerm> terms) {
    double m = 1.0;
    for (const auto& t : terms) m = std::max(m, t.weight);
    return m;
}

void recenter(std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    for (double& x : v) x -= mean;
}

FitResult make_result(std::vector<double> theta, long iterations, double residual,
                      double bound) {
    const bool active = bound > 0 && max_abs(theta) >= bound - kActiveTol;
    return FitResult{make_parameter_vector(std::move(theta)), iterations, residual, active};
}

}  // namespace

EstimatorKind estimator_kind_from_string(const std::string& name) {
    if (name == "standard") return EstimatorKind::standard;
    if (name == "stretched") return EstimatorKind::stretched;
    if (name == "unconstrained") return EstimatorKind::unconstrained;
    throw Error(ErrorCode::InvalidInput, "unknown estimator kind '" + name + "'");
}

const char* estimator_kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::standard: return "standard";
        case EstimatorKind::stretched: return "stretched";
        case EstimatorKind::unconstrained: return "unconstrained";
    }
    return "unknown";
}

std::vector<double> project_to_domain(std::span<const double> v, double bound) {
    if (v.size() < 2) {
        throw Error(ErrorCode::InvalidInput, "projection needs d >= 2");
    }
    if (!(bound > 0) || !std::isfinite(bound)) {
        throw Error(ErrorCode::InvalidInput, "projection bound must be positive and finite");
    }
    const auto clipped_sum = [&](double tau) {
        double sum = 0.0;
        for (double x : v) sum += std::clamp(x - tau, -bound, bound);
        return sum;
    };
    // clipped_sum is nonincreasing in tau and brackets zero on this interval
    double lo = *std::min_element(v.begin(), v.end()) - bound;
    double hi = *std::max_element(v.begin(), v.end()) + bound;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_sum(mid) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double tau = 0.5 * (lo + hi);
    // exact multiplier on the face the bisection identified
    for (int round = 0; round < 4; ++round) {
        double free_sum = 0.0;
        long n_free = 0;
        long imbalance = 0;  // clipped-high minus clipped-low
        for (double x : v) {
            const double t = x - tau;
            if (t > bound) {
                ++imbalance;
            } else if (t < -bound) {
                --imbalance;
            } else {
                free_sum += x;
                ++n_free;
            }
        }
        if (n_free == 0) break;
        const double refined = (free_sum + static_cast<double>(imbalance) * bound) / n_free;
        if (refined == tau) break;
        tau = refined;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i] - tau, -bound, bound);
    return out;
}

FitResult fit_mle(const ComparisonData& data, double bound, const SolverSettings& settings) {
    check_settings(settings);
    if (!(bound > 0) || !std::isfinite(bound)) {
        throw Error(ErrorCode::InvalidInput, "box bound must be positive and finite");
    }
    const ComparisonGraph graph = build_comparison_graph(data);
    if (!is_connected_undirected(graph)) {
        throw Error(ErrorCode::NotConnected,
                    "observation graph is disconnected; the fit is not identifiable");
    }
    const auto terms = pair_terms(data);
    const int d = data.d;
    const double k_scale = max_weight(terms);
    const double step_min = 1e-12 / k_scale;
    const double step_max = 1e8 / k_scale;

    std::vector<double> theta(d, 0.0);
    std::vector<double> grad(d), probe(d), trial(d), prev_theta(d), prev_grad(d);
    double value = nll(terms, theta);
    nll_gradient(terms, theta, grad);
    double step = 1.0 / k_scale;

    long iterations = 0;
    double certificate = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (true) {
        // projected-gradient mapping at unit step on the per-comparison scale
        for (int m = 0; m < d; ++m) probe[m] = theta[m] - grad[m] / k_scale;
        const auto mapped = project_to_domain(probe, bound);
        certificate = 0.0;
        for (int m = 0; m < d; ++m) {
            certificate = std::max(certificate, std::abs(theta[m] - mapped[m]));
        }
        if (certificate <= settings.grad_tol) {
            converged = true;
            break;
        }
        if (iterations >= settings.max_iters) break;

        bool accepted = false;
        while (step >= kMinStep) {
            for (int m = 0; m < d; ++m) probe[m] = theta[m] - step * grad[m];
            trial = project_to_domain(probe, bound);
            double decrease = 0.0;
            double moved = 0.0;
            for (int m = 0; m < d; ++m) {
                const double diff = trial[m] - theta[m];
                decrease += grad[m] * diff;
                moved = std::max(moved, std::abs(diff));
            }
            if (moved == 0.0) break;  // step too small to move off the current point
            const double trial_value = nll(terms, trial);
            if (trial_value <=
                value + settings.sufficient_decrease * decrease + armijo_slack(value)) {
                prev_theta.swap(theta);
                theta.swap(trial);
                value = trial_value;
                accepted = true;
                break;
            }
            step *= settings.backtrack_shrink;
        }
        if (!accepted) break;
        prev_grad.swap(grad);
        nll_gradient(terms, theta, grad);
        step = spectral_step(theta, prev_theta, grad, prev_grad, 1.0 / k_scale, step_min,
                             step_max);
        ++iterations;
    }

    FitResult result = make_result(std::move(theta), iterations, certificate, bound);
    if (!converged) {
        throw MaxItersError("box-constrained fit did not reach grad_tol", std::move(result));
    }
    return result;
}

FitResult fit_unconstrained(const ComparisonData& data, const SolverSettings& settings) {
    check_settings(settings);
    const ComparisonGraph graph = build_comparison_graph(data);
    if (!is_strongly_connected(graph)) {
        throw Error(ErrorCode::NotStronglyConnected,
                    "comparison graph is not strongly connected; no finite optimum exists");
    }
    const auto terms = pair_terms(data);
    const int d = data.d;
    const double k_scale = max_weight(terms);
    const double step_min = 1e-12 / k_scale;
    const double step_max = 1e8 / k_scale;

    std::vector<double> theta(d, 0.0);
    std::vector<double> grad(d), residual(d), trial(d), prev_theta(d), prev_grad(d);
    double value = nll(terms, theta);
    gradient_and_residual(terms, theta, grad, residual);
    double step = 1.0 / k_scale;

    long iterations = 0;
    double certificate = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (true) {
        certificate = max_abs(residual);
        if (certificate <= settings.grad_tol) {
            converged = true;
            break;
        }
        if (iterations >= settings.max_iters) break;

        bool accepted = false;
        while (step >= kMinStep) {
            for (int m = 0; m < d; ++m) trial[m] = theta[m] - step * grad[m];
            recenter(trial);
            double decrease = 0.0;
            for (int m = 0; m < d; ++m) decrease += grad[m] * (trial[m] - theta[m]);
            const double trial_value = nll(terms, trial);
            if (trial_value <=
                value + settings.sufficient_decrease * decrease + armijo_slack(value)) {
                prev_theta.swap(theta);
                theta.swap(trial);
                value = trial_value;
                accepted = true;
                break;
            }
            step *= settings.backtrack_shrink;
        }
        if (!accepted) break;
        prev_grad.swap(grad);
        gradient_and_residual(terms, theta, grad, residual);
        step = spectral_step(theta, prev_theta, grad, prev_grad, 1.0 / k_scale, step_min,
                             step_max);
        ++iterations;
    }

    recenter(theta);
    FitResult result = make_result(std::move(theta), iterations, certificate, 0.0);
    if (!converged) {
        throw MaxItersError("unconstrained fit did not reach grad_tol", std::move(result));
    }
    return result;
}

FitResult fit(const ComparisonData& data, const EstimatorSpec& spec) {
    if (spec.kind == EstimatorKind::unconstrained) {
        return fit_unconstrained(data, spec.settings);
    }
    return fit_mle(data, spec.bound, spec.settings);
}

double closed_form_two_items(double mu, EstimatorKind kind, double bound) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "mu must lie in [0, 1]");
    }
    if (kind == EstimatorKind::unconstrained) {
        if (mu == 0.0 || mu == 1.0) {
            throw Error(ErrorCode::DivergentEstimate,
                        "unconstrained two-item estimate diverges at mu of 0 or 1");
        }
        return -(0.5 * std::log(1.0 / mu - 1.0));
    }
    if (!(bound > 0) || !std::isfinite(bound)) {
        throw Error(ErrorCode::InvalidInput, "box bound must be positive and finite");
    }
    const double mu_minus = 1.0 / (1.0 + std::exp(2.0 * bound));
    const double mu_plus = 1.0 / (1.0 + std::exp(-(2.0 * bound)));
    if (mu <= mu_minus) return -bound;
    if (mu >= mu_plus) return bound;
    return -(0.5 * std::log(1.0 / mu - 1.0));
}

OracleEstimates oracle_from_mu(double mu_1, int d, double B) {
    if (d < 2) throw Error(ErrorCode::InvalidInput, "oracle needs d >= 2");
    if (!(B > 0) || !std::isfinite(B)) {
        throw Error(ErrorCode::InvalidInput, "oracle bound must be positive and finite");
    }
    if (!(mu_1 >= 0.0 && mu_1 <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "mu_1 must lie in [0, 1]");
    }
    OracleEstimates result;
    result.mu_1 = mu_1;
    const double ratio = static_cast<double>(d) / (d - 1);
    const double factor = (d - 1.0) / d;
    const double mu_minus = 1.0 / (1.0 + std::exp(ratio * B));
    const double mu_plus = 1.0 / (1.0 + std::exp(-(ratio * B)));
    if (mu_1 > 0.0 && mu_1 < 1.0) {
        result.unconstrained_1 = -(factor * std::log(1.0 / mu_1 - 1.0));
    }
    if (mu_1 <= mu_minus) {
        result.constrained_1 = -B;
    } else if (mu_1 >= mu_plus) {
        result.constrained_1 = B;
    } else {
        result.constrained_1 = -(factor * std::log(1.0 / mu_1 - 1.0));
    }
    return result;
}

OracleEstimates oracle_estimates(const ComparisonData& data, double B) {
    validate(data);
    const int d = data.d;
    const long long k = data.counts[0][1];
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (data.counts[i][j] != k || k == 0) {
                throw Error(ErrorCode::InvalidInput,
                            "oracle estimates require league data (equal counts on all pairs)");
            }
        }
    }
    double sum = 0.0;
    for (int m = 1; m < d; ++m) {
        sum += static_cast<double>(data.wins[0][m]) / static_cast<double>(k);
    }
    return oracle_from_mu(sum / (d - 1), d, B);
}

std::string to_json(const FitResult& result) {
    nlohmann::json doc{{"theta_hat", result.theta_hat.values},
                       {"iterations", result.iterations},
                       {"final_residual", result.final_residual},
                       {"constraint_active", result.constraint_active}};
    return doc.dump();
}

}  // namespace btl
