#include "cubifs/aggregation.hpp"

#include <cmath>
#include <string>

namespace cubifs {

namespace {

constexpr double kProportionFloor = 1e-6; // clamp bound for g before logging

void check_profiles_match(const std::vector<FuzzyProfile>& profiles, const RatingMatrix& matrix) {
    if (profiles.size() != matrix.item_count())
        throw domain_error("profile count " + std::to_string(profiles.size()) +
                           " mismatches item count " + std::to_string(matrix.item_count()));
    for (std::size_t k = 0; k < profiles.size(); ++k)
        if (!profiles[k].item_id.empty() && profiles[k].item_id != matrix.items[k])
            throw domain_error("profile order mismatch at column " + std::to_string(k) +
                               ": profile " + profiles[k].item_id + " vs item " + matrix.items[k]);
}

} // namespace

const char* to_string(WeightMode mode) {
    return mode == WeightMode::membership_proportions ? "mu" : "u";
}

void WeightVector::validate() const {
    if (weights.empty())
        throw domain_error("empty weight vector");
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] > 0.0))
            throw domain_error("weight " + std::to_string(k) + " is not positive");
        sum += weights[k];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw domain_error("weights sum to " + std::to_string(sum) + ", expected 1");
}

std::vector<double> fuzzy_proportions(const std::vector<FuzzyProfile>& profiles,
                                      const RatingMatrix& matrix, WeightMode mode) {
    check_profiles_match(profiles, matrix);
    const std::size_t n = matrix.respondent_count();
    if (n == 0)
        throw domain_error("cannot compute fuzzy proportions of an empty matrix");
    std::vector<double> g(profiles.size(), 0.0);
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const std::vector<double>& curve =
            mode == WeightMode::membership_proportions ? profiles[k].mu : profiles[k].u;
        long double acc = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            const int r = matrix.rows[j][k];
            if (r == missing_rating)
                throw domain_error("missing rating at row " + std::to_string(j + 1) + ", item " +
                                   matrix.items[k] + "; aggregate complete cases only");
            if (!matrix.scale.contains(r))
                throw domain_error("rating " + std::to_string(r) + " outside the scale at row " +
                                   std::to_string(j + 1));
            acc += curve[static_cast<std::size_t>(r - 1)];
        }
        g[k] = static_cast<double>(acc / static_cast<long double>(n));
    }
    return g;
}

WeightVector log_inverse_weights(const std::vector<double>& g, WeightMode mode, bool strict) {
    if (g.empty())
        throw domain_error("empty proportion vector");
    WeightVector w;
    w.mode = mode;
    w.weights.resize(g.size());
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double gk = g[k];
        if (!(gk > 0.0) || gk >= 1.0) {
            if (strict)
                throw domain_error("fuzzy proportion for item " + std::to_string(k + 1) + " is " +
                                   std::to_string(gk) + ", outside (0,1)");
            gk = std::min(std::max(gk, kProportionFloor), 1.0 - kProportionFloor);
            w.clamped = true;
        }
        w.weights[k] = std::log(1.0 / gk);
        total += w.weights[k];
    }
    for (double& wk : w.weights)
        wk /= total;
    w.validate();
    return w;
}

std::pair<double, double> iwam_respondent(const std::vector<FuzzyProfile>& profiles,
                                          const WeightVector& weights,
                                          const std::vector<int>& ratings_row) {
    if (profiles.size() != weights.size() || profiles.size() != ratings_row.size())
        throw domain_error("profiles, weights and ratings row must share one length");
    double mu_j = 0.0;
    double nu_j = 0.0;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const int r = ratings_row[k];
        if (r == missing_rating)
            throw domain_error("missing rating at item " + std::to_string(k + 1) +
                               " rejected under the strict policy");
        mu_j += weights.weights[k] * profiles[k].mu[static_cast<std::size_t>(r - 1)];
        nu_j += weights.weights[k] * profiles[k].nu[static_cast<std::size_t>(r - 1)];
    }
    return {mu_j, nu_j};
}

ScoreTriple final_scores(const std::vector<std::pair<double, double>>& per_respondent) {
    if (per_respondent.empty())
        throw domain_error("final scores need at least one respondent");
    long double mu_acc = 0.0L;
    long double nu_acc = 0.0L;
    for (const auto& [mu_j, nu_j] : per_respondent) {
        mu_acc += mu_j;
        nu_acc += nu_j;
    }
    const long double n = static_cast<long double>(per_respondent.size());
    ScoreTriple s;
    s.mu_bar = static_cast<double>(mu_acc / n);
    s.nu_bar = static_cast<double>(nu_acc / n);
    s.u_bar = 1.0 - s.mu_bar - s.nu_bar;
    return s;
}

} // namespace cubifs
