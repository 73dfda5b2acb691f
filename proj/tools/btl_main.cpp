#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "btl/estimators.hpp"
#include "btl/model.hpp"
#include "btl/montecarlo.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path);
    if (!file) {
        throw btl::Error(btl::ErrorCode::InvalidInput, "cannot open input file " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream file(path);
    if (!file) {
        throw btl::Error(btl::ErrorCode::InvalidInput, "cannot write " + path.string());
    }
    file << contents;
}

struct FitOptions {
    std::string input;
    std::string kind = "standard";
    double bound = 1.0;
    double grad_tol = btl::SolverSettings{}.grad_tol;
    long max_iters = btl::SolverSettings{}.max_iters;
};

int run_fit(const FitOptions& opts) {
    const btl::ComparisonData data = btl::comparison_data_from_json(read_input(opts.input));
    btl::EstimatorSpec spec;
    spec.kind = btl::estimator_kind_from_string(opts.kind);
    spec.bound = opts.bound;
    spec.settings.grad_tol = opts.grad_tol;
    spec.settings.max_iters = opts.max_iters;
    const btl::FitResult result = btl::fit(data, spec);
    std::cout << btl::to_json(result) << "\n";
    return kExitOk;
}

struct SweepConfig {
    std::vector<btl::SweepCell> grid;
    long n_iters = 0;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
};

btl::EstimatorSpec make_estimator(btl::EstimatorKind kind, double B, double A) {
    btl::EstimatorSpec spec;
    spec.kind = kind;
    spec.bound = kind == btl::EstimatorKind::stretched ? A : B;
    return spec;
}

// Cells expand in the order d, k, p_obs, family, estimator; the A grid applies
// to the stretched estimator only. Cell index in this order seeds the cell.
std::vector<btl::SweepCell> expand_grid(const std::vector<int>& ds, const std::vector<int>& ks,
                                        const std::vector<double>& p_obs_list, bool league,
                                        const std::vector<double>& As,
                                        const std::vector<btl::Family>& families,
                                        const std::vector<btl::EstimatorKind>& estimators,
                                        double B) {
    std::vector<btl::SweepCell> cells;
    for (int d : ds) {
        for (int k : ks) {
            std::vector<btl::ObservationDesign> designs;
            if (league) {
                designs.push_back(btl::ObservationDesign::league(k));
            } else {
                for (double p : p_obs_list) {
                    designs.push_back(btl::ObservationDesign::random(k, p));
                }
            }
            for (const auto& design : designs) {
                for (btl::Family family : families) {
                    for (btl::EstimatorKind kind : estimators) {
                        if (kind == btl::EstimatorKind::stretched) {
                            for (double A : As) {
                                cells.push_back({d, design,
                                                 btl::TrueParameterFamily{family, B, {}},
                                                 make_estimator(kind, B, A)});
                            }
                        } else {
                            cells.push_back({d, design,
                                             btl::TrueParameterFamily{family, B, {}},
                                             make_estimator(kind, B, 0.0)});
                        }
                    }
                }
            }
        }
    }
    return cells;
}

SweepConfig parse_sweep_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw btl::Error(btl::ErrorCode::InvalidInput,
                         std::string("malformed config JSON: ") + e.what());
    }
    try {
        const json& grid = doc.at("grid");
        const auto ds = grid.at("d").get<std::vector<int>>();
        const auto ks = grid.at("k").get<std::vector<int>>();
        std::vector<double> p_obs_list;
        bool league = true;
        if (grid.contains("p_obs") && !grid.at("p_obs").is_null()) {
            p_obs_list = grid.at("p_obs").get<std::vector<double>>();
            league = p_obs_list.empty();
        }
        std::vector<double> As;
        if (grid.contains("A") && !grid.at("A").is_null()) {
            As = grid.at("A").get<std::vector<double>>();
        }
        std::vector<btl::Family> families;
        for (const auto& name : grid.at("families").get<std::vector<std::string>>()) {
            families.push_back(btl::family_from_string(name));
        }
        std::vector<btl::EstimatorKind> estimators;
        for (const auto& name : doc.at("estimators").get<std::vector<std::string>>()) {
            estimators.push_back(btl::estimator_kind_from_string(name));
        }
        const double B = doc.value("B", 1.0);

        if (ds.empty() || ks.empty() || families.empty() || estimators.empty()) {
            throw btl::Error(btl::ErrorCode::InvalidInput, "config grid has an empty axis");
        }
        for (int d : ds) {
            if (d < 2) throw btl::Error(btl::ErrorCode::InvalidInput, "grid d must be >= 2");
            if (d % 2 != 0 &&
                std::count(families.begin(), families.end(), btl::Family::bipolar) > 0) {
                throw btl::Error(btl::ErrorCode::InvalidInput,
                                 "bipolar family needs even d");
            }
        }
        for (int k : ks) {
            if (k < 1) throw btl::Error(btl::ErrorCode::InvalidInput, "grid k must be >= 1");
        }
        for (double p : p_obs_list) {
            if (!(p > 0.0 && p < 1.0)) {
                throw btl::Error(btl::ErrorCode::InvalidInput,
                                 "grid p_obs entries must lie in (0, 1)");
            }
        }
        for (double A : As) {
            if (!(A > 0.0)) {
                throw btl::Error(btl::ErrorCode::InvalidInput, "grid A entries must be positive");
            }
        }
        if (!(B > 0.0)) throw btl::Error(btl::ErrorCode::InvalidInput, "B must be positive");
        const bool wants_stretched =
            std::count(estimators.begin(), estimators.end(), btl::EstimatorKind::stretched) > 0;
        if (wants_stretched && As.empty()) {
            throw btl::Error(btl::ErrorCode::InvalidInput,
                             "stretched estimator requested but grid A is empty");
        }

        SweepConfig config;
        config.grid = expand_grid(ds, ks, p_obs_list, league, As, families, estimators, B);
        config.n_iters = doc.at("n_iters").get<long>();
        if (config.n_iters < 2) {
            throw btl::Error(btl::ErrorCode::InvalidInput, "n_iters must be >= 2");
        }
        config.seed = doc.at("seed").get<std::uint64_t>();
        config.out_dir = doc.value("out_dir", std::string("out"));
        return config;
    } catch (const json::exception& e) {
        throw btl::Error(btl::ErrorCode::InvalidInput,
                         std::string("invalid config: ") + e.what());
    }
}

void write_outputs(const std::filesystem::path& dir, const std::string& prefix,
                   const std::vector<btl::SweepRow>& rows) {
    std::filesystem::create_directories(dir);
    write_file(dir / (prefix + "summary.csv"), btl::summary_csv(rows));
    write_file(dir / (prefix + "per_item.csv"), btl::per_item_csv(rows));
}

std::vector<btl::SweepRow> run_cells(const std::vector<btl::SweepCell>& cells, long n_iters,
                                     std::uint64_t seed) {
    std::cerr << "running " << cells.size() << " cell(s) x " << n_iters << " iterations\n";
    const auto rows = btl::sweep(cells, n_iters, seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].error.empty()) {
            std::cerr << "cell " << i << " failed: " << rows[i].error << "\n";
        }
    }
    return rows;
}

struct FigurePreset {
    std::vector<btl::SweepCell> cells;
    long n_iters = 0;
};

FigurePreset figure_preset(int number) {
    const double B = 1.0;
    const std::vector<double> a_grid = {0.5,  0.75, 1.0,  1.25, 1.5, 1.75,
                                        2.0,  2.25, 2.5,  2.75, 3.0};
    const std::vector<int> k_grid = {1, 2, 5, 10, 20, 50, 100};
    const std::vector<btl::EstimatorKind> both = {btl::EstimatorKind::standard,
                                                  btl::EstimatorKind::stretched};
    switch (number) {
        case 1:
            return {expand_grid({25}, {5}, {}, true, {2.0}, {btl::Family::linear}, both, B),
                    5000};
        case 3:
            return {expand_grid({10, 25, 50, 100}, {5}, {}, true, {2.0},
                                {btl::Family::worst_case}, both, B),
                    10000};
        case 4:
            return {expand_grid({10}, k_grid, {}, true, {2.0}, {btl::Family::worst_case},
                                both, B),
                    10000};
        case 5:
            return {expand_grid({10}, k_grid, {}, true, a_grid, {btl::Family::worst_case},
                                {btl::EstimatorKind::stretched}, B),
                    5000};
        case 6:
            return {expand_grid({10}, {5}, {}, true, a_grid,
                                {btl::Family::worst_case, btl::Family::worst_case_half,
                                 btl::Family::bipolar, btl::Family::linear,
                                 btl::Family::all_zeros},
                                {btl::EstimatorKind::stretched}, B),
                    5000};
        case 7: {
            std::vector<btl::SweepCell> cells;
            for (int d : {10, 25, 50, 100}) {
                auto part = expand_grid({d}, {5}, {1.0 / std::sqrt(static_cast<double>(d))},
                                        false, {2.0}, {btl::Family::worst_case}, both, B);
                cells.insert(cells.end(), part.begin(), part.end());
            }
            return {std::move(cells), 10000};
        }
        default:
            throw btl::Error(btl::ErrorCode::InvalidInput,
                             "unknown figure number " + std::to_string(number) +
                                 " (supported: 1, 3, 4, 5, 6, 7)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bradley-Terry-Luce estimation toolkit"};
    app.require_subcommand(1);

    FitOptions fit_opts;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one dataset and print the result JSON");
    fit_cmd->add_option("--input", fit_opts.input, "comparison data JSON file ('-' for stdin)")
        ->required();
    fit_cmd->add_option("--kind", fit_opts.kind, "standard | stretched | unconstrained");
    fit_cmd->add_option("--bound", fit_opts.bound, "box half-width (B or A)");
    fit_cmd->add_option("--tol", fit_opts.grad_tol, "convergence tolerance");
    fit_cmd->add_option("--max-iters", fit_opts.max_iters, "iteration budget");

    std::string config_path;
    std::string out_override;
    long iters_override = 0;
    std::uint64_t seed_override = 0;
    bool have_seed_override = false;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a config-driven experiment grid");
    sweep_cmd->add_option("--config", config_path, "sweep config JSON file")->required();
    sweep_cmd->add_option("--out", out_override, "output directory (overrides config)");
    sweep_cmd->add_option("--iters", iters_override, "iteration count (overrides config)");
    sweep_cmd->add_option("--seed", seed_override, "master seed (overrides config)")
        ->each([&](const std::string&) { have_seed_override = true; });

    int figure_number = 0;
    long figure_iters = 0;
    std::uint64_t figure_seed = 1;
    std::string figure_out = "out";
    CLI::App* figure_cmd =
        app.add_subcommand("figure", "emit the data behind a preset simulation study");
    figure_cmd->add_option("number", figure_number, "preset number (1, 3, 4, 5, 6, 7)")
        ->required();
    figure_cmd->add_option("--iters", figure_iters, "iteration count override");
    figure_cmd->add_option("--seed", figure_seed, "master seed");
    figure_cmd->add_option("--out", figure_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) {
            return run_fit(fit_opts);
        }
        if (sweep_cmd->parsed()) {
            SweepConfig config = parse_sweep_config(read_input(config_path));
            if (iters_override > 0) config.n_iters = iters_override;
            if (have_seed_override) config.seed = seed_override;
            if (!out_override.empty()) config.out_dir = out_override;
            const auto rows = run_cells(config.grid, config.n_iters, config.seed);
            write_outputs(config.out_dir, "", rows);
            return kExitOk;
        }
        if (figure_cmd->parsed()) {
            FigurePreset preset = figure_preset(figure_number);
            if (figure_iters > 0) preset.n_iters = figure_iters;
            const auto rows = run_cells(preset.cells, preset.n_iters, figure_seed);
            write_outputs(figure_out, "fig" + std::to_string(figure_number) + "_", rows);
            return kExitOk;
        }
    } catch (const btl::Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == btl::ErrorCode::InvalidInput ? kExitUsage : kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitComputation;
    }
    return kExitUsage;
}
