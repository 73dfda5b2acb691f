#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "btl/errors.hpp"

namespace btl {

// Quality scores, one per item, centered to sum zero. The centering removes
// the shift degeneracy of the model (only score differences are observable).
struct ParameterVector {
    std::vector<double> values;

    int dimension() const { return static_cast<int>(values.size()); }
};

// Validates dimension >= 2, finiteness, and |sum| <= 1e-9.
ParameterVector make_parameter_vector(std::vector<double> values);

bool is_centered(std::span<const double> values, double tol = 1e-9);

// The feasible set {theta : ||theta||_inf <= bound, sum(theta) = 0}.
struct BoundedDomain {
    double bound = 1.0;
    int d = 2;

    bool contains(std::span<const double> theta, double tol = 1e-9) const;
};

// Pairwise win counts. wins[i][j] is the number of comparisons between i and
// j won by i; counts is symmetric with zero diagonal and
// wins[i][j] + wins[j][i] == counts[i][j].
struct ComparisonData {
    int d = 0;
    std::vector<std::vector<long long>> wins;
    std::vector<std::vector<long long>> counts;
};

ComparisonData make_comparison_data(int d);
void validate(const ComparisonData& data);

// Empirical win fractions mu[i][j] = wins[i][j] / counts[i][j] on pairs with
// counts > 0; the mask marks observed pairs.
struct WinFractionMatrix {
    int d = 0;
    std::vector<std::vector<double>> mu;
    std::vector<std::vector<std::uint8_t>> observed;
};

// League: every pair compared k times. Random: each pair is included with
// probability p_obs (drawn once per pair) and compared k times if included.
struct ObservationDesign {
    enum class Kind { league, random };

    Kind kind = Kind::league;
    int k = 1;
    double p_obs = 1.0;

    static ObservationDesign league(int k);
    static ObservationDesign random(int k, double p_obs);
};

enum class Family { worst_case, worst_case_half, bipolar, linear, all_zeros, custom };

Family family_from_string(const std::string& name);
const char* family_name(Family family);

// Named ground-truth vectors inside the box of half-width B:
//   worst_case       [B, -B/(d-1), ..., -B/(d-1)]
//   worst_case_half  the same with B/2
//   bipolar          half the entries +B, half -B (even d only)
//   linear           equally spaced on [-B, B], endpoints included
//   all_zeros        the zero vector
//   custom           caller-supplied values, validated against the box
struct TrueParameterFamily {
    Family family = Family::all_zeros;
    double B = 1.0;
    std::vector<double> custom_values;
};

// Probability that an item with score theta_i beats one with score theta_j:
// logistic(theta_i - theta_j). The exponent is clamped to +-36 so the result
// stays representable and strictly inside (0, 1) for any finite inputs.
double btl_probability(double theta_i, double theta_j);

ParameterVector make_true_params(const TrueParameterFamily& spec, int d);

// Draws synthetic comparison outcomes. Fully reproducible: every pair reads
// from a substream derived from (seed, pair), independent of ordering.
ComparisonData sample_comparisons(const ParameterVector& theta_star,
                                  const ObservationDesign& design, std::uint64_t seed);

WinFractionMatrix win_fractions(const ComparisonData& data);

// Wire format: {"d": int, "pairs": [{"i", "j", "count", "wins_i"}]} with
// i < j; zero-count pairs omitted.
std::string to_json(const ComparisonData& data);
ComparisonData comparison_data_from_json(const std::string& text);

}  // namespace btl
