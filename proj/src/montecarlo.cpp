#include "btl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "btl/graph.hpp"
#include "btl/rng.hpp"

namespace btl {

namespace {

enum class IterStatus : unsigned char { ok, discarded, failed };

struct IterRecord {
    IterStatus status = IterStatus::failed;
    bool clipped = false;
    std::vector<double> theta;
};

void run_iteration(long t, const ParameterVector& theta_star, const ObservationDesign& design,
                   const EstimatorSpec& estimator, std::uint64_t master_seed,
                   IterRecord& record) {
    const std::uint64_t seed =
        rng::substream(master_seed, rng::kTagIteration, static_cast<std::uint64_t>(t));
    try {
        const ComparisonData data = sample_comparisons(theta_star, design, seed);
        if (design.kind == ObservationDesign::Kind::random ||
            estimator.kind == EstimatorKind::unconstrained) {
            const ComparisonGraph graph = build_comparison_graph(data);
            if (design.kind == ObservationDesign::Kind::random &&
                !is_connected_undirected(graph)) {
                record.status = IterStatus::discarded;
                return;
            }
            if (estimator.kind == EstimatorKind::unconstrained &&
                !is_strongly_connected(graph)) {
                record.status = IterStatus::discarded;
                return;
            }
        }
        FitResult result = fit(data, estimator);
        record.status = IterStatus::ok;
        record.clipped = result.constraint_active;
        record.theta = std::move(result.theta_hat.values);
    } catch (const Error&) {
        record.status = IterStatus::failed;
    }
}

}  // namespace

MetricsReport run_monte_carlo(const ParameterVector& theta_star,
                              const ObservationDesign& design, const EstimatorSpec& estimator,
                              long n_iters, std::uint64_t master_seed, ExecMode mode) {
    if (n_iters < 2) throw Error(ErrorCode::InvalidInput, "need n_iters >= 2");
    const int d = theta_star.dimension();

    std::vector<IterRecord> records(n_iters);
    if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long t = 0; t < n_iters; ++t) {
            run_iteration(t, theta_star, design, estimator, master_seed, records[t]);
        }
    } else {
        for (long t = 0; t < n_iters; ++t) {
            run_iteration(t, theta_star, design, estimator, master_seed, records[t]);
        }
    }

    long n_ok = 0, n_discarded = 0, n_failed = 0, n_clipped = 0;
    for (const auto& rec : records) {
        switch (rec.status) {
            case IterStatus::ok:
                ++n_ok;
                if (rec.clipped) ++n_clipped;
                break;
            case IterStatus::discarded: ++n_discarded; break;
            case IterStatus::failed: ++n_failed; break;
        }
    }
    if (n_failed * 100 > n_iters) {
        throw Error(ErrorCode::MaxItersExceeded,
                    "solver failed to converge on more than 1% of iterations");
    }
    if (n_ok == 0) {
        throw Error(ErrorCode::AllIterationsDiscarded,
                    "no iteration produced a usable fit");
    }

    // Two-pass reduction in iteration order: identical bytes for any thread count.
    std::vector<double> mean(d, 0.0);
    double mse_mean = 0.0;
    for (const auto& rec : records) {
        if (rec.status != IterStatus::ok) continue;
        double sq = 0.0;
        for (int i = 0; i < d; ++i) {
            mean[i] += rec.theta[i];
            const double diff = rec.theta[i] - theta_star.values[i];
            sq += diff * diff;
        }
        mse_mean += sq;
    }
    for (int i = 0; i < d; ++i) mean[i] /= static_cast<double>(n_ok);
    mse_mean /= static_cast<double>(n_ok);

    std::vector<double> var(d, 0.0);
    double mse_var = 0.0;
    for (const auto& rec : records) {
        if (rec.status != IterStatus::ok) continue;
        double sq = 0.0;
        for (int i = 0; i < d; ++i) {
            const double dev = rec.theta[i] - mean[i];
            var[i] += dev * dev;
            const double diff = rec.theta[i] - theta_star.values[i];
            sq += diff * diff;
        }
        const double dev = sq - mse_mean;
        mse_var += dev * dev;
    }

    MetricsReport report;
    report.per_item_bias.resize(d);
    report.per_item_bias_se.resize(d);
    const double denom = n_ok > 1 ? static_cast<double>(n_ok - 1) : 1.0;
    int max_item = 0;
    for (int i = 0; i < d; ++i) {
        report.per_item_bias[i] = mean[i] - theta_star.values[i];
        report.per_item_bias_se[i] = std::sqrt(var[i] / denom / static_cast<double>(n_ok));
        if (std::abs(report.per_item_bias[i]) > std::abs(report.per_item_bias[max_item])) {
            max_item = i;
        }
    }
    report.max_abs_bias = std::abs(report.per_item_bias[max_item]);
    report.max_abs_bias_se = report.per_item_bias_se[max_item];
    report.mse = mse_mean;
    report.mse_se = std::sqrt(mse_var / denom / static_cast<double>(n_ok));
    report.clipping_frequency = static_cast<double>(n_clipped) / static_cast<double>(n_ok);
    report.iterations_run = n_ok;
    report.iterations_discarded = n_discarded;
    report.iterations_failed = n_failed;
    return report;
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, long n_iters,
                            std::uint64_t master_seed, ExecMode mode) {
    if (grid.empty()) throw Error(ErrorCode::InvalidInput, "sweep grid is empty");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t index = 0; index < grid.size(); ++index) {
        const SweepCell& cell = grid[index];
        SweepRow row;
        row.cell = cell;
        row.n_iters = n_iters;
        const std::uint64_t cell_seed =
            rng::substream(master_seed, rng::kTagCell, static_cast<std::uint64_t>(index));
        try {
            const ParameterVector theta_star = make_true_params(cell.family, cell.d);
            row.theta_star = theta_star.values;
            row.report = run_monte_carlo(theta_star, cell.design, cell.estimator, n_iters,
                                         cell_seed, mode);
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double rate_slope(std::span<const double> swept, std::span<const double> metric) {
    if (swept.size() != metric.size() || swept.size() < 3) {
        throw Error(ErrorCode::InvalidInput, "rate_slope needs at least 3 matched points");
    }
    const auto [min_it, max_it] = std::minmax_element(swept.begin(), swept.end());
    if (!(*min_it > 0) || *max_it < 4.0 * *min_it) {
        throw Error(ErrorCode::InvalidInput,
                    "rate_slope needs the swept variable to span a factor of 4");
    }
    const std::size_t n = swept.size();
    double mean_x = 0.0, mean_y = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(metric[i] > 0)) {
            throw Error(ErrorCode::InvalidInput, "rate_slope needs positive metric values");
        }
        lx[i] = std::log(swept[i]);
        ly[i] = std::log(metric[i]);
        mean_x += lx[i];
        mean_y += ly[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mean_x) * (ly[i] - mean_y);
        sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
    }
    return sxy / sxx;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void append_cell_key(std::string& out, const SweepRow& row) {
    const auto& cell = row.cell;
    out += std::to_string(cell.d);
    out += ',';
    out += std::to_string(cell.design.k);
    out += ',';
    if (cell.design.kind == ObservationDesign::Kind::random) {
        out += format_double(cell.design.p_obs);
    }
    out += ',';
    out += family_name(cell.family.family);
    out += ',';
    out += estimator_kind_name(cell.estimator.kind);
    out += ',';
    if (cell.estimator.kind != EstimatorKind::unconstrained) {
        out += format_double(cell.estimator.bound);
    }
}

constexpr const char* kSummaryHeader =
    "d,k,p_obs,family,estimator_kind,bound,n_iters,n_discarded,max_abs_bias,"
    "max_abs_bias_se,mse,mse_se,clipping_frequency";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_double_field(const std::string& field) {
    return std::strtod(field.c_str(), nullptr);
}

}  // namespace

std::string summary_csv(const std::vector<SweepRow>& rows) {
    std::string out = kSummaryHeader;
    out += '\n';
    for (const auto& row : rows) {
        append_cell_key(out, row);
        out += ',';
        out += std::to_string(row.n_iters);
        out += ',';
        if (row.report) {
            const auto& r = *row.report;
            out += std::to_string(r.iterations_discarded);
            out += ',';
            out += format_double(r.max_abs_bias);
            out += ',';
            out += format_double(r.max_abs_bias_se);
            out += ',';
            out += format_double(r.mse);
            out += ',';
            out += format_double(r.mse_se);
            out += ',';
            out += format_double(r.clipping_frequency);
        } else {
            out += ",,,,,";
        }
        out += '\n';
    }
    return out;
}

std::string per_item_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "d,k,p_obs,family,estimator_kind,bound,item_index,theta_star,bias,se\n";
    for (const auto& row : rows) {
        if (!row.report) continue;
        const auto& r = *row.report;
        for (std::size_t i = 0; i < r.per_item_bias.size(); ++i) {
            append_cell_key(out, row);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(row.theta_star[i]);
            out += ',';
            out += format_double(r.per_item_bias[i]);
            out += ',';
            out += format_double(r.per_item_bias_se[i]);
            out += '\n';
        }
    }
    return out;
}

std::vector<SweepRow> parse_summary_csv(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line) || line != kSummaryHeader) {
        throw Error(ErrorCode::InvalidInput, "summary CSV has an unexpected header");
    }
    std::vector<SweepRow> rows;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 13) {
            throw Error(ErrorCode::InvalidInput, "summary CSV row has wrong column count");
        }
        SweepRow row;
        row.cell.d = std::atoi(fields[0].c_str());
        const int k = std::atoi(fields[1].c_str());
        row.cell.design = fields[2].empty()
                              ? ObservationDesign::league(k)
                              : ObservationDesign::random(k, parse_double_field(fields[2]));
        row.cell.family.family = family_from_string(fields[3]);
        row.cell.estimator.kind = estimator_kind_from_string(fields[4]);
        if (!fields[5].empty()) row.cell.estimator.bound = parse_double_field(fields[5]);
        row.n_iters = std::atol(fields[6].c_str());
        if (!fields[7].empty()) {
            MetricsReport report;
            report.iterations_discarded = std::atol(fields[7].c_str());
            report.max_abs_bias = parse_double_field(fields[8]);
            report.max_abs_bias_se = parse_double_field(fields[9]);
            report.mse = parse_double_field(fields[10]);
            report.mse_se = parse_double_field(fields[11]);
            report.clipping_frequency = parse_double_field(fields[12]);
            report.iterations_run = row.n_iters - report.iterations_discarded;
            row.report = std::move(report);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace btl
