#pragma once

#include <cstdint>
#include <vector>

#include "cubifs/frequency.hpp"
#include "cubifs/rating_scale.hpp"

namespace cubifs {

/// CUB mixture parameters. `pi` weights the shifted Binomial (feeling)
/// component, 1-pi the discrete Uniform share; `xi` is the feeling
/// parameter (1-xi measures preference for higher categories).
struct CubParams {
    double pi = 0.5;
    double xi = 0.5;

    void validate() const;
};

struct EmOptions {
    double tolerance = 1e-6; // absolute log-likelihood change
    int max_iter = 500;
};

struct FitResult {
    CubParams params;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> loglik_trace; // trace[0] is the initial value
};

/// b_r(xi) = C(m-1, r-1) xi^(m-r) (1-xi)^(r-1), r = 1..m.
std::vector<double> shifted_binomial_pmf(const RatingScale& scale, double xi);

/// pi * b_r(xi) + (1-pi)/m, r = 1..m.
std::vector<double> cub_pmf(const RatingScale& scale, const CubParams& params);

/// Inverse-CDF sampling of the CUB distribution. Deterministic for a fixed
/// seed; the generator state is explicit, never ambient.
std::vector<int> sample(const RatingScale& scale, const CubParams& params, std::size_t n,
                        std::uint64_t seed);

/// Normalized Gini heterogeneity index (m/(m-1)) (1 - sum f_r^2), in [0,1].
double gini_index(const FrequencyTable& freq, const RatingScale& scale);

/// Closed-form preliminary estimate of pi from the Gini relation
/// G_obs = 1 - pi^2 (1 - G_SB(xi)), clamped to [0,1]. Exposed for
/// diagnostics; ML via fit_em is the reported estimate.
double preliminary_pi(const FrequencyTable& freq, const RatingScale& scale, double xi);

/// EM starting point: xi0 from the sample mean, pi0 from preliminary_pi
/// (0.5 fallback), both clamped away from the boundary.
CubParams moment_init(const FrequencyTable& freq, const RatingScale& scale);

/// Sum over observations of log cub_pmf[r_j].
double log_likelihood(const std::vector<int>& ratings, const RatingScale& scale,
                      const CubParams& params);

/// Same likelihood evaluated from per-category counts.
double log_likelihood_counts(const std::vector<std::int64_t>& counts, const RatingScale& scale,
                             const CubParams& params);

/// Maximum-likelihood fit of (pi, xi) by EM from moment_init. The trace is
/// nondecreasing; convergence is |delta loglik| < tolerance.
FitResult fit_em(const std::vector<int>& ratings, const RatingScale& scale,
                 const EmOptions& options = {});

/// EM on per-category counts (sufficient statistics for the CUB likelihood).
FitResult fit_em_counts(const std::vector<std::int64_t>& counts, const RatingScale& scale,
                        const EmOptions& options = {});

/// Counts of ratings per category; rejects out-of-range values.
std::vector<std::int64_t> category_counts(const std::vector<int>& ratings,
                                          const RatingScale& scale);

/// Independent sub-stream seed for stream index k under a base seed.
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t stream);

} // namespace cubifs
