#pragma once

#include <utility>
#include <vector>

#include "cubifs/ifs_profile.hpp"
#include "cubifs/survey.hpp"

namespace cubifs {

/// Which fuzzy proportion feeds the item weights: mean membership (the
/// Zani pairing) or mean uncertainty (the CUB pairing).
enum class WeightMode { membership_proportions, uncertainty_proportions };

const char* to_string(WeightMode mode);

struct WeightVector {
    std::vector<double> weights;
    WeightMode mode = WeightMode::uncertainty_proportions;
    bool clamped = false; // some g_k was clamped away from {0,1} before logging

    std::size_t size() const { return weights.size(); }

    /// w_k > 0 and sum w = 1 within 1e-12.
    void validate() const;
};

struct ScoreTriple {
    double mu_bar = 0.0;
    double nu_bar = 0.0;
    double u_bar = 0.0; // 1 - mu_bar - nu_bar by construction
};

/// g(X_k): mean profile value at the observed ratings of item k, using mu
/// (membership_proportions) or u (uncertainty_proportions). The matrix must
/// be complete (apply complete_cases first).
std::vector<double> fuzzy_proportions(const std::vector<FuzzyProfile>& profiles,
                                      const RatingMatrix& matrix, WeightMode mode);

/// w_k = ln(1/g_k) / sum_l ln(1/g_l). In strict mode any g outside (0,1)
/// raises domain_error naming the item; otherwise g is clamped to
/// [1e-6, 1-1e-6] and the result is flagged.
WeightVector log_inverse_weights(const std::vector<double>& g, WeightMode mode,
                                 bool strict = false);

/// One respondent's IWAM pair: (sum_k w_k mu_k(r_jk), sum_k w_k nu_k(r_jk)).
std::pair<double, double> iwam_respondent(const std::vector<FuzzyProfile>& profiles,
                                          const WeightVector& weights,
                                          const std::vector<int>& ratings_row);

/// Equal-weight second-stage aggregation over respondents plus the residual
/// uncertainty score.
ScoreTriple final_scores(const std::vector<std::pair<double, double>>& per_respondent);

} // namespace cubifs
