#include "btl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "json.hpp"

#include "btl/rng.hpp"

namespace btl {

bool is_centered(std::span<const double> values, double tol) {
    double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return std::abs(sum) <= tol;
}

ParameterVector make_parameter_vector(std::vector<double> values) {
    if (values.size() < 2) {
        throw Error(ErrorCode::InvalidInput, "parameter vector needs d >= 2");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidInput, "parameter vector has non-finite entry");
        }
    }
    if (!is_centered(values)) {
        throw Error(ErrorCode::InvalidInput, "parameter vector is not centered");
    }
    return ParameterVector{std::move(values)};
}

bool BoundedDomain::contains(std::span<const double> theta, double tol) const {
    if (static_cast<int>(theta.size()) != d) return false;
    for (double v : theta) {
        if (!(std::abs(v) <= bound + tol)) return false;
    }
    return is_centered(theta, tol);
}

ComparisonData make_comparison_data(int d) {
    if (d < 2) throw Error(ErrorCode::InvalidInput, "comparison data needs d >= 2");
    ComparisonData data;
    data.d = d;
    data.wins.assign(d, std::vector<long long>(d, 0));
    data.counts.assign(d, std::vector<long long>(d, 0));
    return data;
}

void validate(const ComparisonData& data) {
    const int d = data.d;
    if (d < 2 || static_cast<int>(data.wins.size()) != d ||
        static_cast<int>(data.counts.size()) != d) {
        throw Error(ErrorCode::InvalidInput, "comparison data has inconsistent dimension");
    }
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(data.wins[i].size()) != d ||
            static_cast<int>(data.counts[i].size()) != d) {
            throw Error(ErrorCode::InvalidInput, "comparison data has ragged rows");
        }
        if (data.counts[i][i] != 0 || data.wins[i][i] != 0) {
            throw Error(ErrorCode::InvalidInput, "comparison data has nonzero diagonal");
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            long long c = data.counts[i][j];
            if (c < 0 || data.counts[j][i] != c) {
                throw Error(ErrorCode::InvalidInput, "comparison counts not symmetric");
            }
            long long wij = data.wins[i][j];
            long long wji = data.wins[j][i];
            if (wij < 0 || wji < 0 || wij + wji != c) {
                throw Error(ErrorCode::InvalidInput,
                            "wins do not add up to the comparison count");
            }
        }
    }
}

ObservationDesign ObservationDesign::league(int k) {
    if (k < 1) throw Error(ErrorCode::InvalidInput, "league design needs k >= 1");
    return ObservationDesign{Kind::league, k, 1.0};
}

ObservationDesign ObservationDesign::random(int k, double p_obs) {
    if (k < 1) throw Error(ErrorCode::InvalidInput, "random design needs k >= 1");
    if (!(p_obs > 0.0 && p_obs < 1.0)) {
        throw Error(ErrorCode::InvalidInput, "random design needs p_obs in (0, 1)");
    }
    return ObservationDesign{Kind::random, k, p_obs};
}

Family family_from_string(const std::string& name) {
    if (name == "worst_case") return Family::worst_case;
    if (name == "worst_case_half") return Family::worst_case_half;
    if (name == "bipolar") return Family::bipolar;
    if (name == "linear") return Family::linear;
    if (name == "all_zeros") return Family::all_zeros;
    if (name == "custom") return Family::custom;
    throw Error(ErrorCode::InvalidInput, "unknown parameter family '" + name + "'");
}

const char* family_name(Family family) {
    switch (family) {
        case Family::worst_case: return "worst_case";
        case Family::worst_case_half: return "worst_case_half";
        case Family::bipolar: return "bipolar";
        case Family::linear: return "linear";
        case Family::all_zeros: return "all_zeros";
        case Family::custom: return "custom";
    }
    return "unknown";
}

double btl_probability(double theta_i, double theta_j) {
    double diff = theta_i - theta_j;
    if (diff > 36.0) diff = 36.0;
    if (diff < -36.0) diff = -36.0;
    return 1.0 / (1.0 + std::exp(-diff));
}

namespace {

std::vector<double> spiked_vector(double top, int d) {
    std::vector<double> values(d, -top / (d - 1));
    values[0] = top;
    return values;
}

}  // namespace

ParameterVector make_true_params(const TrueParameterFamily& spec, int d) {
    if (d < 2) throw Error(ErrorCode::InvalidInput, "parameter families need d >= 2");
    if (!(spec.B > 0.0) || !std::isfinite(spec.B)) {
        throw Error(ErrorCode::InvalidInput, "family bound B must be positive and finite");
    }
    const double B = spec.B;
    std::vector<double> values;
    switch (spec.family) {
        case Family::worst_case:
            values = spiked_vector(B, d);
            break;
        case Family::worst_case_half:
            values = spiked_vector(0.5 * B, d);
            break;
        case Family::bipolar: {
            if (d % 2 != 0) {
                throw Error(ErrorCode::InvalidInput, "bipolar family needs even d");
            }
            values.assign(d, -B);
            std::fill(values.begin(), values.begin() + d / 2, B);
            break;
        }
        case Family::linear: {
            values.resize(d);
            for (int i = 0; i < d; ++i) {
                values[i] = B * ((2.0 * i - (d - 1)) / (d - 1));
            }
            break;
        }
        case Family::all_zeros:
            values.assign(d, 0.0);
            break;
        case Family::custom: {
            if (static_cast<int>(spec.custom_values.size()) != d) {
                throw Error(ErrorCode::InvalidInput, "custom family has wrong dimension");
            }
            BoundedDomain domain{B, d};
            if (!domain.contains(spec.custom_values)) {
                throw Error(ErrorCode::InvalidInput,
                            "custom values violate the centered box domain");
            }
            values = spec.custom_values;
            break;
        }
    }
    return make_parameter_vector(std::move(values));
}

ComparisonData sample_comparisons(const ParameterVector& theta_star,
                                  const ObservationDesign& design, std::uint64_t seed) {
    const int d = theta_star.dimension();
    if (d < 2) throw Error(ErrorCode::InvalidInput, "sampling needs d >= 2");
    ComparisonData data = make_comparison_data(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const auto pair_code =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(d) + j;
            long long count = design.k;
            if (design.kind == ObservationDesign::Kind::random) {
                rng::Stream inclusion(rng::substream(seed, rng::kTagPairInclusion, pair_code));
                if (!(inclusion.next_unit() < design.p_obs)) count = 0;
            }
            if (count == 0) continue;
            const double p = btl_probability(theta_star.values[i], theta_star.values[j]);
            rng::Stream outcomes(rng::substream(seed, rng::kTagPairOutcome, pair_code));
            long long wins_i = 0;
            for (long long r = 0; r < count; ++r) {
                if (outcomes.next_unit() < p) ++wins_i;
            }
            data.wins[i][j] = wins_i;
            data.wins[j][i] = count - wins_i;
            data.counts[i][j] = count;
            data.counts[j][i] = count;
        }
    }
    return data;
}

WinFractionMatrix win_fractions(const ComparisonData& data) {
    validate(data);
    const int d = data.d;
    WinFractionMatrix result;
    result.d = d;
    result.mu.assign(d, std::vector<double>(d, 0.0));
    result.observed.assign(d, std::vector<std::uint8_t>(d, 0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j || data.counts[i][j] == 0) continue;
            result.mu[i][j] = static_cast<double>(data.wins[i][j]) /
                              static_cast<double>(data.counts[i][j]);
            result.observed[i][j] = 1;
        }
    }
    return result;
}

std::string to_json(const ComparisonData& data) {
    validate(data);
    nlohmann::json pairs = nlohmann::json::array();
    for (int i = 0; i < data.d; ++i) {
        for (int j = i + 1; j < data.d; ++j) {
            if (data.counts[i][j] == 0) continue;
            pairs.push_back({{"i", i},
                             {"j", j},
                             {"count", data.counts[i][j]},
                             {"wins_i", data.wins[i][j]}});
        }
    }
    nlohmann::json doc{{"d", data.d}, {"pairs", std::move(pairs)}};
    return doc.dump();
}

ComparisonData comparison_data_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
    try {
        const int d = doc.at("d").get<int>();
        ComparisonData data = make_comparison_data(d);
        for (const auto& pair : doc.at("pairs")) {
            const int i = pair.at("i").get<int>();
            const int j = pair.at("j").get<int>();
            const long long count = pair.at("count").get<long long>();
            const long long wins_i = pair.at("wins_i").get<long long>();
            if (i < 0 || j <= i || j >= d) {
                throw Error(ErrorCode::InvalidInput, "pair indices must satisfy 0 <= i < j < d");
            }
            if (data.counts[i][j] != 0) {
                throw Error(ErrorCode::InvalidInput, "duplicate pair in JSON input");
            }
            if (count <= 0 || wins_i < 0 || wins_i > count) {
                throw Error(ErrorCode::InvalidInput, "pair has invalid count or wins");
            }
            data.counts[i][j] = count;
            data.counts[j][i] = count;
            data.wins[i][j] = wins_i;
            data.wins[j][i] = count - wins_i;
        }
        validate(data);
        return data;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace btl
