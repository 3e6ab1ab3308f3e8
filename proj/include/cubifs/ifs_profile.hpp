#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubifs/frequency.hpp"
#include "cubifs/rating_scale.hpp"

namespace cubifs {

enum class FuzzyVariant { zani, cub_ifs };

const char* to_string(FuzzyVariant v);

/// Per-item intuitionistic fuzzy profile: membership mu, non-membership nu
/// and residual uncertainty u = 1 - mu - nu over categories 1..m.
struct FuzzyProfile {
    std::string item_id;
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<double> u;
    FuzzyVariant variant = FuzzyVariant::cub_ifs;
    std::optional<double> pi_hat; // cub_ifs only

    // Set when a normalizing block had zero empirical mass and the
    // corresponding increments were forced to 0.
    bool degenerate_mu = false;
    bool degenerate_nu = false;

    double mu_at(int r) const { return mu[static_cast<std::size_t>(r - 1)]; }
    double nu_at(int r) const { return nu[static_cast<std::size_t>(r - 1)]; }
    double u_at(int r) const { return u[static_cast<std::size_t>(r - 1)]; }

    /// Verifies monotonicity, the IFS constraint and the residual identity.
    void validate(const RatingScale& scale) const;
};

/// Membership or non-membership curve before assembly into a profile.
struct CurvePart {
    std::vector<double> values;
    bool degenerate_block = false; // zero-mass normalizer, increments forced to 0
};

/// Cumulative membership: 0 up to l_b, relative-frequency increments
/// normalized by 1 - F(l_b) strictly between the bounds, 1 from u_b on.
/// nu is identically zero under this variant.
FuzzyProfile membership_zani(const FrequencyTable& freq, const RatingScale& scale);

/// CUB-penalized membership: 0 below i_p, (1-pi_hat)/m at i_p, increments
/// scaled by pi_hat and normalized by F(u_b-1) - F(i_p) up to u_b, 1 after.
CurvePart membership_cub(const FrequencyTable& freq, const RatingScale& scale, double pi_hat);

/// Mirror-image non-membership: 0 above i_p, (1-pi_hat)/m at i_p, increments
/// normalized by F(l_b) - F(1) walking down to category 2, and 1 at r = 1.
CurvePart nonmembership_cub(const FrequencyTable& freq, const RatingScale& scale, double pi_hat);

/// u_r = 1 - mu_r - nu_r. Throws consistency_error naming the first
/// category where mu + nu > 1.
std::vector<double> uncertainty_profile(const std::vector<double>& mu,
                                        const std::vector<double>& nu);

/// Assembles a complete, invariant-satisfying profile for one item.
/// pi_hat is required for (and only used by) the cub_ifs variant.
FuzzyProfile build_profile(const FrequencyTable& freq, const RatingScale& scale,
                           FuzzyVariant variant, std::optional<double> pi_hat = std::nullopt,
                           std::string item_id = {});

} // namespace cubifs
