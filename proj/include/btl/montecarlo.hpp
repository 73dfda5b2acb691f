#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btl/estimators.hpp"
#include "btl/model.hpp"

namespace btl {

// The parallel path partitions iterations across OpenMP threads; per-iteration
// seeds depend only on (master_seed, iteration index) and the reduction walks
// recorded values in iteration order, so both paths produce identical bytes.
enum class ExecMode { serial, parallel };

struct MetricsReport {
    std::vector<double> per_item_bias;     // mean(theta_hat_i) - theta_star_i
    std::vector<double> per_item_bias_se;  // standard error of that mean
    double max_abs_bias = 0.0;
    double max_abs_bias_se = 0.0;  // standard error at the maximizing item
    double mse = 0.0;              // mean ||theta_hat - theta_star||_2^2
    double mse_se = 0.0;
    double clipping_frequency = 0.0;
    long iterations_run = 0;        // iterations contributing to the statistics
    long iterations_discarded = 0;  // connectivity discards (no fit attempted)
    long iterations_failed = 0;     // solver non-convergence (excluded from stats)
};

// Estimates bias and mean squared error of an estimator at a fixed truth.
// Iterations with a disconnected observation graph are discarded; for the
// unconstrained estimator, iterations without a strongly connected comparison
// graph are discarded as well. Throws AllIterationsDiscarded if nothing
// remains and MaxItersExceeded if more than 1% of iterations fail to converge.
MetricsReport run_monte_carlo(const ParameterVector& theta_star,
                              const ObservationDesign& design,
                              const EstimatorSpec& estimator, long n_iters,
                              std::uint64_t master_seed,
                              ExecMode mode = ExecMode::parallel);

struct SweepCell {
    int d = 2;
    ObservationDesign design;
    TrueParameterFamily family;
    EstimatorSpec estimator;
};

struct SweepRow {
    SweepCell cell;
    long n_iters = 0;
    std::vector<double> theta_star;
    std::optional<MetricsReport> report;
    std::string error;  // nonempty when the cell failed
};

// One report per cell; cell seeds derive from (master_seed, cell index).
// Per-cell errors are recorded in the row, not fatal to the sweep.
std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, long n_iters,
                            std::uint64_t master_seed, ExecMode mode = ExecMode::parallel);

// Least-squares slope of log(metric) against log(swept). Requires at least 3
// points spanning a factor of 4 in the swept variable.
double rate_slope(std::span<const double> swept, std::span<const double> metric);

// Summary table, one row per cell:
// d,k,p_obs,family,estimator_kind,bound,n_iters,n_discarded,max_abs_bias,
// max_abs_bias_se,mse,mse_se,clipping_frequency
// p_obs is empty for league designs, bound for the unconstrained estimator,
// and the metric columns for errored cells. Doubles are printed with 17
// significant digits so parsing reproduces them exactly.
std::string summary_csv(const std::vector<SweepRow>& rows);

// Companion per-item table for bias-by-item plots:
// d,k,p_obs,family,estimator_kind,bound,item_index,theta_star,bias,se
std::string per_item_csv(const std::vector<SweepRow>& rows);

std::vector<SweepRow> parse_summary_csv(const std::string& text);

}  // namespace btl
